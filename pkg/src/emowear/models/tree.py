"""CART regression trees on top of the kernel backends.

Trees grow greedily to purity or single-sample leaves (nodes below two
samples never split). Split quality is either plain squared-error gain,

    gain = SSE(parent) - SSE(left) - SSE(right),

or the Friedman improvement

    gain = n_L * n_R / (n_L + n_R) * (mean_L - mean_R)^2.

Candidate thresholds are midpoints of adjacent distinct sorted feature
values; ties in gain go to the lowest feature index, then the lowest
threshold. The hot scan lives in emowear.kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..errors import DimensionMismatch

CRITERIA = {
    "squared_error": kernels.CRITERION_SQUARED_ERROR,
    "friedman_mse": kernels.CRITERION_FRIEDMAN_MSE,
}


@dataclass(frozen=True)
class SplitCandidate:
    """A chosen split: feature, threshold, and its impurity gain."""

    feature_index: int
    threshold: float
    impurity_gain: float


def cart_best_split(X, y, criterion: str = "squared_error") -> SplitCandidate | None:
    """Best single split of (X, y), or None when no split improves.

    Degenerate inputs (all targets equal, or no feature with two distinct
    values) return None rather than raising.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.shape[0] < 2:
        return None
    tree = kernels.grow_tree(X, y, CRITERIA[criterion], max_depth=1)
    feature, threshold, gain = tree[0], tree[1], tree[6]
    if feature[0] < 0:
        return None
    return SplitCandidate(int(feature[0]), float(threshold[0]), float(gain[0]))


class DecisionTreeRegressor:
    """Greedy CART regression tree."""

    def __init__(self, criterion: str = "squared_error", max_depth: int | None = None):
        if criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {criterion!r}")
        self.criterion = criterion
        self.max_depth = max_depth

    def fit(self, X, y):
        depth = -1 if self.max_depth is None else int(self.max_depth)
        self.tree_ = kernels.grow_tree(X, y, CRITERIA[self.criterion], max_depth=depth)
        self.n_features_ = X.shape[1]
        return self

    def predict(self, X):
        if X.shape[1] != self.n_features_:
            raise DimensionMismatch(f"{X.shape[1]} columns, model trained on {self.n_features_}")
        return kernels.apply_tree(self.tree_, X)

    @property
    def node_count(self) -> int:
        return int(self.tree_[0].shape[0])

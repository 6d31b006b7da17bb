"""K-nearest-neighbors regression with a Minkowski metric."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch


class KNNRegressor:
    """Stores the training set; predicts the unweighted mean of the k
    nearest training targets. Distance ties break on the lower training
    row index, which keeps predictions deterministic."""

    def __init__(self, k: int = 3, weights: str = "uniform", metric: str = "minkowski",
                 p: int = 2):
        if weights != "uniform":
            raise ValueError(f"unsupported weights {weights!r}")
        if metric != "minkowski":
            raise ValueError(f"unsupported metric {metric!r}")
        if k < 1 or p < 1:
            raise ValueError("k and p must be >= 1")
        self.k = int(k)
        self.weights = weights
        self.metric = metric
        self.p = p

    def fit(self, X, y):
        self.X_ = np.array(X, dtype=np.float64)
        self.y_ = np.array(y, dtype=np.float64)
        return self

    def predict(self, X):
        if X.shape[1] != self.X_.shape[1]:
            raise DimensionMismatch(f"{X.shape[1]} columns, model trained on {self.X_.shape[1]}")
        k = min(self.k, self.X_.shape[0])
        out = np.empty(X.shape[0])
        for i, q in enumerate(X):
            # Monotone in the true Minkowski distance, so the ranking is
            # identical without the final root.
            dist = (np.abs(self.X_ - q) ** self.p).sum(axis=1)
            nearest = np.argsort(dist, kind="stable")[:k]
            out[i] = self.y_[nearest].mean()
        return out

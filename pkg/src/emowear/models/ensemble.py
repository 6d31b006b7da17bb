"""Tree ensembles: bootstrap-averaged forests and gradient boosting."""

from __future__ import annotations

import numpy as np

from ..errors import DimensionMismatch
from .tree import DecisionTreeRegressor


class RandomForestRegressor:
    """Average of trees fit on bootstrap resamples of size n.

    Every split considers all features (with eight input channels there is
    little to gain from feature subsampling). The only randomness is the
    seeded bootstrap, so fits are reproducible bit for bit.
    """

    def __init__(self, n_estimators: int = 100, criterion: str = "squared_error",
                 rng_seed: int = 0):
        self.n_estimators = int(n_estimators)
        self.criterion = criterion
        self.rng_seed = rng_seed

    def fit(self, X, y):
        n = X.shape[0]
        rng = np.random.default_rng(self.rng_seed)
        self.trees_ = []
        for _ in range(self.n_estimators):
            boot = rng.integers(0, n, size=n)
            tree = DecisionTreeRegressor(criterion=self.criterion)
            tree.fit(X[boot], y[boot])
            self.trees_.append(tree)
        self.n_features_ = X.shape[1]
        return self

    def predict(self, X):
        if X.shape[1] != self.n_features_:
            raise DimensionMismatch(f"{X.shape[1]} columns, model trained on {self.n_features_}")
        preds = np.stack([t.predict(X) for t in self.trees_])
        return preds.mean(axis=0)


class GradientBoostingRegressor:
    """Stagewise boosting of depth-limited trees on residuals.

    Prediction is the training-target mean plus learning_rate times the
    sum of stage outputs. ``train_mse_path_`` records the training MSE
    after each stage; with shrinkage in (0, 2) it is non-increasing.
    """

    def __init__(self, n_estimators: int = 100, learning_rate: float = 0.1,
                 split_criterion: str = "friedman_mse", max_depth: int = 3):
        self.n_estimators = int(n_estimators)
        self.learning_rate = float(learning_rate)
        self.split_criterion = split_criterion
        self.max_depth = int(max_depth)

    def fit(self, X, y):
        n = X.shape[0]
        self.base_ = float(y.mean())
        current = np.full(n, self.base_)
        self.trees_ = []
        path = np.empty(self.n_estimators)
        for stage in range(self.n_estimators):
            residual = y - current
            tree = DecisionTreeRegressor(criterion=self.split_criterion, max_depth=self.max_depth)
            tree.fit(X, residual)
            current = current + self.learning_rate * tree.predict(X)
            path[stage] = float(np.mean((y - current) ** 2))
            self.trees_.append(tree)
        self.train_mse_path_ = path
        self.n_features_ = X.shape[1]
        return self

    def predict(self, X):
        if X.shape[1] != self.n_features_:
            raise DimensionMismatch(f"{X.shape[1]} columns, model trained on {self.n_features_}")
        out = np.full(X.shape[0], self.base_)
        for tree in self.trees_:
            out = out + self.learning_rate * tree.predict(X)
        return out

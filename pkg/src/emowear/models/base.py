"""Model configuration and the uniform fit/predict contract.

Nine regression families share one interface. Default hyperparameters are
fixed to the published training setup; widths and other values the source
table leaves open are documented defaults and can be overridden per
config.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..errors import DimensionMismatch

FAMILIES = (
    "Linear",
    "Ridge",
    "BayesianRidge",
    "KNN",
    "DecisionTree",
    "RandomForest",
    "GradientBoosting",
    "MLP",
    "DNN",
)

# Reporting order and display names follow the published results tables.
REPORT_ORDER = (
    "RandomForest",
    "DNN",
    "DecisionTree",
    "KNN",
    "GradientBoosting",
    "MLP",
    "Ridge",
    "BayesianRidge",
    "Linear",
)

DISPLAY_NAMES = {
    "RandomForest": "Random Forest",
    "DNN": "Dense Network",
    "DecisionTree": "Decision Tree",
    "KNN": "K-Nearest Neighbors (KNN)",
    "GradientBoosting": "Gradient Boosting",
    "MLP": "Multi Layer Perceptron",
    "Ridge": "Ridge Regression",
    "BayesianRidge": "Bayesian Ridge Regression",
    "Linear": "Linear Regression",
}

DEFAULT_PARAMS: dict[str, dict[str, Any]] = {
    "Linear": {},
    "Ridge": {"alpha": 1.0, "max_iter": 1000, "tol": 1e-4, "solver": "svd"},
    "BayesianRidge": {
        "max_iter": 1000,
        "tol": 1e-3,
        "alpha_1": 1e-6,
        "alpha_2": 1e-6,
        "lambda_1": 1e-6,
        "lambda_2": 1e-6,
    },
    "KNN": {"k": 3, "weights": "uniform", "metric": "minkowski", "p": 2},
    "DecisionTree": {"criterion": "squared_error"},
    "RandomForest": {"n_estimators": 100, "criterion": "squared_error"},
    "GradientBoosting": {
        "n_estimators": 100,
        "learning_rate": 0.1,
        "loss": "squared_error",
        "split_criterion": "friedman_mse",
        "max_depth": 3,
    },
    "MLP": {
        "hidden_layers": 10,
        "hidden_units": 32,
        "loss": "mse",
        "output_activation": "relu",
        "optimizer": "adam",
        "learning_rate": 1e-3,
        "max_iter": 500,
    },
    "DNN": {
        "hidden_layers": 3,
        "hidden_units": (64, 32, 16),
        "loss": "mse",
        "output_activation": "relu",
        "optimizer": "adam",
        "epochs": 50,
        "learning_rate": 1e-4,
    },
}


@dataclass(frozen=True)
class ModelConfig:
    """A model family, its hyperparameters, and the training seed."""

    family: str
    params: dict[str, Any] = field(default_factory=dict)
    rng_seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(
                f"unknown model family {self.family!r}; valid families: {', '.join(FAMILIES)}"
            )
        unknown = set(self.params) - set(DEFAULT_PARAMS[self.family])
        if unknown:
            raise ValueError(f"{self.family}: unknown parameters {sorted(unknown)}")
        merged = dict(DEFAULT_PARAMS[self.family])
        merged.update(self.params)
        object.__setattr__(self, "params", merged)


def make_config(family: str, rng_seed: int = 0, **overrides) -> ModelConfig:
    return ModelConfig(family=family, params=overrides, rng_seed=rng_seed)


def default_configs(rng_seed: int = 0, families=REPORT_ORDER) -> list[ModelConfig]:
    return [ModelConfig(family=f, rng_seed=rng_seed) for f in families]


@dataclass(frozen=True)
class TrainedModel:
    """A fitted regressor plus the config and training metadata behind it."""

    config: ModelConfig
    regressor: Any
    iterations: int = 0
    final_loss: float = float("nan")

    @property
    def family(self) -> str:
        return self.config.family


def _validate_xy(X, y) -> tuple[np.ndarray, np.ndarray]:
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise DimensionMismatch(f"X must be a nonempty 2-D matrix, got shape {X.shape}")
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise DimensionMismatch(f"y has length {y.shape}, X has {X.shape[0]} rows")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("training data contains NaN or infinite values")
    return X, y


def fit(config: ModelConfig, X, y) -> TrainedModel:
    """Fit one single-output regressor of the configured family."""
    from . import ensemble, linear, neighbors, network, tree

    X, y = _validate_xy(X, y)
    p = config.params
    family = config.family

    if family == "Linear":
        reg = linear.LinearRegressor()
    elif family == "Ridge":
        reg = linear.RidgeRegressor(
            alpha=p["alpha"], max_iter=p["max_iter"], tol=p["tol"], solver=p["solver"]
        )
    elif family == "BayesianRidge":
        reg = linear.BayesianRidgeRegressor(
            max_iter=p["max_iter"],
            tol=p["tol"],
            alpha_1=p["alpha_1"],
            alpha_2=p["alpha_2"],
            lambda_1=p["lambda_1"],
            lambda_2=p["lambda_2"],
        )
    elif family == "KNN":
        reg = neighbors.KNNRegressor(k=p["k"], weights=p["weights"], metric=p["metric"], p=p["p"])
    elif family == "DecisionTree":
        reg = tree.DecisionTreeRegressor(criterion=p["criterion"])
    elif family == "RandomForest":
        reg = ensemble.RandomForestRegressor(
            n_estimators=p["n_estimators"], criterion=p["criterion"], rng_seed=config.rng_seed
        )
    elif family == "GradientBoosting":
        reg = ensemble.GradientBoostingRegressor(
            n_estimators=p["n_estimators"],
            learning_rate=p["learning_rate"],
            split_criterion=p["split_criterion"],
            max_depth=p["max_depth"],
        )
    elif family == "MLP":
        reg = network.NeuralNetRegressor(
            hidden_units=(p["hidden_units"],) * p["hidden_layers"]
            if isinstance(p["hidden_units"], int)
            else tuple(p["hidden_units"]),
            learning_rate=p["learning_rate"],
            n_epochs=p["max_iter"],
            rng_seed=config.rng_seed,
        )
    elif family == "DNN":
        units = p["hidden_units"]
        reg = network.NeuralNetRegressor(
            hidden_units=(units,) * p["hidden_layers"] if isinstance(units, int) else tuple(units),
            learning_rate=p["learning_rate"],
            n_epochs=p["epochs"],
            rng_seed=config.rng_seed,
        )
    else:  # pragma: no cover - guarded by ModelConfig
        raise ValueError(family)

    reg.fit(X, y)
    iterations = getattr(reg, "iterations_", 0)
    final_loss = getattr(reg, "final_loss_", float("nan"))
    return TrainedModel(config=config, regressor=reg, iterations=iterations, final_loss=final_loss)


def predict(model: TrainedModel, X) -> np.ndarray:
    """Deterministic predictions from a fitted model."""
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch(f"X must be 2-D, got shape {X.shape}")
    return model.regressor.predict(X)

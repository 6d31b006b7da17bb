"""Versioned flat-text serialization of trained models.

The format is line oriented and stable across runs, so serialized models
can be diffed byte for byte: floats are written with repr(), which
round-trips exactly. Version 1 layout:

    emowear-model 1
    family <name>
    seed <int>
    params <python-literal dict>
    iterations <int>
    final_loss <float>
    <family payload>
    end
"""

from __future__ import annotations

import ast
from typing import Iterator

import numpy as np

from .base import FAMILIES, ModelConfig, TrainedModel
from .ensemble import GradientBoostingRegressor, RandomForestRegressor
from .linear import BayesianRidgeRegressor, LinearRegressor, RidgeRegressor
from .neighbors import KNNRegressor
from .network import FeedForwardNet, NeuralNetRegressor
from .tree import DecisionTreeRegressor

FORMAT_VERSION = 1


def _vec_line(name: str, v: np.ndarray) -> str:
    vals = " ".join(repr(float(x)) for x in v)
    return f"vec {name} {v.shape[0]} {vals}".rstrip()


def _mat_lines(name: str, m: np.ndarray) -> list[str]:
    lines = [f"mat {name} {m.shape[0]} {m.shape[1]}"]
    for row in m:
        lines.append(" ".join(repr(float(x)) for x in row))
    return lines


def _tree_lines(tree) -> list[str]:
    feature, threshold, left, right, value, n_node, gain = tree
    lines = [f"tree {feature.shape[0]}"]
    for i in range(feature.shape[0]):
        lines.append(
            f"{int(feature[i])} {float(threshold[i])!r} {int(left[i])} {int(right[i])} "
            f"{float(value[i])!r} {int(n_node[i])} {float(gain[i])!r}"
        )
    return lines


def save_model(model: TrainedModel) -> str:
    """Serialize a TrainedModel to the versioned text format."""
    reg = model.regressor
    lines = [
        f"emowear-model {FORMAT_VERSION}",
        f"family {model.family}",
        f"seed {model.config.rng_seed}",
        f"params {model.config.params!r}",
        f"iterations {model.iterations}",
        f"final_loss {model.final_loss!r}",
    ]

    family = model.family
    if family in ("Linear", "Ridge", "BayesianRidge"):
        lines.append(_vec_line("coef", reg.coef_))
        lines.append(f"scalar intercept {reg.intercept_!r}")
        if family == "BayesianRidge":
            lines.append(f"scalar alpha {reg.alpha_!r}")
            lines.append(f"scalar lambda {reg.lambda_!r}")
            lines.extend(_mat_lines("sigma", reg.sigma_))
    elif family == "KNN":
        lines.extend(_mat_lines("X", reg.X_))
        lines.append(_vec_line("y", reg.y_))
    elif family == "DecisionTree":
        lines.extend(_tree_lines(reg.tree_))
    elif family == "RandomForest":
        lines.append(f"forest {len(reg.trees_)}")
        for t in reg.trees_:
            lines.extend(_tree_lines(t.tree_))
    elif family == "GradientBoosting":
        lines.append(f"scalar base {reg.base_!r}")
        lines.append(f"forest {len(reg.trees_)}")
        for t in reg.trees_:
            lines.extend(_tree_lines(t.tree_))
    elif family in ("MLP", "DNN"):
        lines.append(f"net {len(reg.net_.params)}")
        for i, p in enumerate(reg.net_.params):
            if p.ndim == 2:
                lines.extend(_mat_lines(f"p{i}", p))
            else:
                lines.append(_vec_line(f"p{i}", p))
    else:  # pragma: no cover
        raise ValueError(family)

    lines.append("end")
    return "\n".join(lines) + "\n"


class _Reader:
    def __init__(self, text: str):
        self._it: Iterator[str] = iter(text.splitlines())

    def line(self) -> str:
        return next(self._it)

    def vec(self) -> np.ndarray:
        parts = self.line().split()
        assert parts[0] == "vec", parts
        n = int(parts[2])
        return np.array([float(x) for x in parts[3:3 + n]])

    def mat(self) -> np.ndarray:
        parts = self.line().split()
        assert parts[0] == "mat", parts
        rows, cols = int(parts[2]), int(parts[3])
        out = np.empty((rows, cols))
        for i in range(rows):
            out[i] = [float(x) for x in self.line().split()]
        return out

    def scalar(self) -> float:
        parts = self.line().split()
        assert parts[0] == "scalar", parts
        return float(parts[2])

    def tree(self):
        parts = self.line().split()
        assert parts[0] == "tree", parts
        n = int(parts[1])
        feature = np.empty(n, dtype=np.int32)
        threshold = np.empty(n)
        left = np.empty(n, dtype=np.int32)
        right = np.empty(n, dtype=np.int32)
        value = np.empty(n)
        n_node = np.empty(n, dtype=np.int32)
        gain = np.empty(n)
        for i in range(n):
            f, thr, le, ri, val, nn, ga = self.line().split()
            feature[i] = int(f)
            threshold[i] = float(thr)
            left[i] = int(le)
            right[i] = int(ri)
            value[i] = float(val)
            n_node[i] = int(nn)
            gain[i] = float(ga)
        return (feature, threshold, left, right, value, n_node, gain)


def load_model(text: str) -> TrainedModel:
    """Reconstruct a TrainedModel from its serialized text."""
    r = _Reader(text)
    magic = r.line().split()
    if magic[0] != "emowear-model" or int(magic[1]) != FORMAT_VERSION:
        raise ValueError(f"unsupported model format: {magic}")
    family = r.line().split(maxsplit=1)[1]
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}")
    seed = int(r.line().split()[1])
    params = ast.literal_eval(r.line().split(maxsplit=1)[1])
    iterations = int(r.line().split()[1])
    final_loss = float(r.line().split()[1])
    config = ModelConfig(family=family, params=params, rng_seed=seed)
    p = config.params

    if family in ("Linear", "Ridge", "BayesianRidge"):
        if family == "Linear":
            reg = LinearRegressor()
        elif family == "Ridge":
            reg = RidgeRegressor(alpha=p["alpha"], max_iter=p["max_iter"], tol=p["tol"])
        else:
            reg = BayesianRidgeRegressor(max_iter=p["max_iter"], tol=p["tol"])
        reg.coef_ = r.vec()
        reg.intercept_ = r.scalar()
        if family == "BayesianRidge":
            reg.alpha_ = r.scalar()
            reg.lambda_ = r.scalar()
            reg.sigma_ = r.mat()
    elif family == "KNN":
        reg = KNNRegressor(k=p["k"], weights=p["weights"], metric=p["metric"], p=p["p"])
        reg.X_ = r.mat()
        reg.y_ = r.vec()
    elif family == "DecisionTree":
        reg = DecisionTreeRegressor(criterion=p["criterion"])
        reg.tree_ = r.tree()
        reg.n_features_ = _tree_n_features(reg.tree_)
    elif family in ("RandomForest", "GradientBoosting"):
        if family == "GradientBoosting":
            reg = GradientBoostingRegressor(
                n_estimators=p["n_estimators"], learning_rate=p["learning_rate"],
                split_criterion=p["split_criterion"], max_depth=p["max_depth"],
            )
            reg.base_ = r.scalar()
        else:
            reg = RandomForestRegressor(
                n_estimators=p["n_estimators"], criterion=p["criterion"], rng_seed=seed
            )
        count = int(r.line().split()[1])
        reg.trees_ = []
        for _ in range(count):
            sub = DecisionTreeRegressor()
            sub.tree_ = r.tree()
            sub.n_features_ = _tree_n_features(sub.tree_)
            reg.trees_.append(sub)
        reg.n_features_ = max(t.n_features_ for t in reg.trees_)
        for t in reg.trees_:
            t.n_features_ = reg.n_features_
    elif family in ("MLP", "DNN"):
        units = p["hidden_units"]
        hidden = (units,) * p["hidden_layers"] if isinstance(units, int) else tuple(units)
        lr = p["learning_rate"]
        epochs = p["max_iter"] if family == "MLP" else p["epochs"]
        reg = NeuralNetRegressor(hidden, lr, epochs, rng_seed=seed)
        count = int(r.line().split()[1])
        params_list = []
        for i in range(count):
            peek = _peek_kind(r)
            params_list.append(r.mat() if peek == "mat" else r.vec())
        net = FeedForwardNet.__new__(FeedForwardNet)
        net.params = params_list
        reg.net_ = net
        reg.n_features_ = params_list[0].shape[0]
    else:  # pragma: no cover
        raise ValueError(family)

    return TrainedModel(config=config, regressor=reg, iterations=iterations,
                        final_loss=final_loss)


def _tree_n_features(tree) -> int:
    feature = tree[0]
    split_features = feature[feature >= 0]
    return int(split_features.max()) + 1 if split_features.size else 1


def _peek_kind(reader: _Reader) -> str:
    # Reader iterates a list; peek by cloning the remaining lines.
    rest = list(reader._it)
    reader._it = iter(rest)
    return rest[0].split()[0] if rest else ""

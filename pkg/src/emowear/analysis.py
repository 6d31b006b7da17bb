"""Dataset diagnostics: correlation matrix and 2-D PCA projection.

Outputs are plot-ready CSV data (square correlation matrix; projected
coordinates with a dominant-emotion label per row; per-emotion cluster
centroids), not rendered images.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConstantColumn, RankDeficient
from .labels import EMOTIONS


@dataclass(frozen=True)
class CorrelationMatrix:
    labels: tuple[str, ...]
    values: np.ndarray  # symmetric, unit diagonal


@dataclass(frozen=True)
class PCAProjection:
    components: np.ndarray  # k x d, orthonormal rows
    projected: np.ndarray  # n x k
    explained_variance: np.ndarray  # k, non-increasing
    centroids: dict[str, np.ndarray]  # dominant-emotion label -> k-vector


def pearson_matrix(columns: dict[str, np.ndarray]) -> CorrelationMatrix:
    """Pairwise Pearson correlation of named, non-constant columns."""
    names = tuple(columns)
    data = np.column_stack([np.asarray(columns[n], dtype=np.float64) for n in names])
    if data.shape[0] < 2:
        raise ConstantColumn("need at least 2 rows")
    centered = data - data.mean(axis=0)
    norms = np.sqrt((centered * centered).sum(axis=0))
    for name, norm in zip(names, norms):
        if norm == 0.0:
            raise ConstantColumn(f"column {name} is constant")

    d = len(names)
    out = np.eye(d)
    for i in range(d):
        for j in range(i + 1, d):
            r = float(centered[:, i] @ centered[:, j] / (norms[i] * norms[j]))
            out[i, j] = r
            out[j, i] = r
    return CorrelationMatrix(labels=names, values=out)


def pca_project(X, emotion_intensities=None, k: int = 2) -> PCAProjection:
    """Project rows of X onto the top-k principal directions.

    The covariance matrix (population, divisor n) of the mean-centered
    data is eigen-decomposed directly; with eight features that beats any
    iterative scheme. Component signs are fixed by making each component's
    largest-magnitude loading positive. Rank-deficient data still
    projects: trailing components become an arbitrary (but deterministic)
    orthonormal completion with ~0 explained variance, so a point cloud on
    a line yields a second variance of about zero rather than an error.
    Only data with no varying direction at all raises RankDeficient.

    When emotion intensities are given, each row is labeled with its
    argmax emotion and per-label centroids of the projections are
    returned.
    """
    X = np.asarray(X, dtype=np.float64)
    n, d = X.shape
    if not (n > d >= k):
        raise RankDeficient(f"need n > d >= k, got n={n}, d={d}, k={k}")

    centered = X - X.mean(axis=0)
    cov = (centered.T @ centered) / n
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    eigvecs = eigvecs[:, order]

    if eigvals[0] <= 0.0:
        raise RankDeficient("all columns are constant; no principal directions exist")

    components = eigvecs[:, :k].T
    for i in range(k):
        pivot = int(np.argmax(np.abs(components[i])))
        if components[i, pivot] < 0:
            components[i] = -components[i]

    projected = centered @ components.T
    centroids: dict[str, np.ndarray] = {}
    if emotion_intensities is not None:
        dominant = np.argmax(np.asarray(emotion_intensities), axis=1)
        for idx in np.unique(dominant):
            name = EMOTIONS[int(idx)]
            centroids[name] = projected[dominant == idx].mean(axis=0)

    return PCAProjection(
        components=components,
        projected=projected,
        explained_variance=eigvals[:k],
        centroids=centroids,
    )


def correlation_csv(matrix: CorrelationMatrix) -> str:
    lines = ["," + ",".join(matrix.labels)]
    for name, row in zip(matrix.labels, matrix.values):
        lines.append(name + "," + ",".join(repr(float(v)) for v in row))
    return "\n".join(lines) + "\n"


def projection_csv(proj: PCAProjection, emotion_intensities) -> str:
    dominant = np.argmax(np.asarray(emotion_intensities), axis=1)
    lines = ["x,y,dominant_emotion"]
    for (x, y), idx in zip(proj.projected, dominant):
        lines.append(f"{float(x)!r},{float(y)!r},{EMOTIONS[int(idx)]}")
    return "\n".join(lines) + "\n"


def centroids_csv(proj: PCAProjection) -> str:
    lines = ["emotion,x,y"]
    for name in EMOTIONS:
        if name in proj.centroids:
            cx, cy = proj.centroids[name]
            lines.append(f"{name},{float(cx)!r},{float(cy)!r}")
    return "\n".join(lines) + "\n"

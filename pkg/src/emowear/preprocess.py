"""Noise removal and leakage-safe normalization.

The smoothing window is trailing (causal): output row i is the mean of
input rows i-window+1..i, so the series shortens by window-1 rows and the
caller trims labels to the same range. Z-score statistics are fit on
training rows only and applied elsewhere; population std (divisor n) is
used throughout for bit-reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyMatrix, SeriesTooShort

DEFAULT_WINDOW = 60


@dataclass(frozen=True)
class FeatureMatrix:
    """Model-ready feature rows for one participant (or a concatenation)."""

    values: np.ndarray  # n x d float64
    column_names: tuple[str, ...]
    participant_id: str = ""

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 2 or vals.shape[1] != len(self.column_names):
            raise DimensionMismatch(
                f"matrix is {vals.shape}, expected {len(self.column_names)} columns"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("feature matrix contains NaN or infinite entries")

    @property
    def n_rows(self) -> int:
        return int(self.values.shape[0])


@dataclass(frozen=True)
class NormStats:
    """Per-column z-score statistics, computed from training rows only."""

    column_names: tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray  # population std; zero marks a constant column

    @property
    def zero_variance_columns(self) -> tuple[str, ...]:
        return tuple(n for n, s in zip(self.column_names, self.std) if s == 0.0)

    def to_text(self) -> str:
        lines = ["# column mean std"]
        for name, m, s in zip(self.column_names, self.mean, self.std):
            lines.append(f"{name} {float(m)!r} {float(s)!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "NormStats":
        names, means, stds = [], [], []
        for line in text.splitlines():
            if not line.strip() or line.startswith("#"):
                continue
            name, m, s = line.split()
            names.append(name)
            means.append(float(m))
            stds.append(float(s))
        return cls(tuple(names), np.array(means), np.array(stds))


def moving_average(series, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Trailing moving average; output length is len(series) - window + 1."""
    x = np.asarray(series, dtype=np.float64)
    if window < 1:
        raise ValueError("window must be positive")
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size < window:
        raise SeriesTooShort(f"series of length {x.size} < window {window}")
    return np.lib.stride_tricks.sliding_window_view(x, window).mean(axis=1)


def smooth_matrix(values: np.ndarray, window: int = DEFAULT_WINDOW) -> np.ndarray:
    """Column-wise moving_average over an n x d matrix."""
    return np.column_stack([moving_average(values[:, j], window) for j in range(values.shape[1])])


def fit_zscore(train: FeatureMatrix) -> NormStats:
    """Column means and population stds over the training rows."""
    if train.n_rows == 0:
        raise EmptyMatrix("cannot fit z-score statistics on an empty matrix")
    return NormStats(
        column_names=train.column_names,
        mean=train.values.mean(axis=0),
        std=train.values.std(axis=0),
    )


def apply_zscore(m: FeatureMatrix, s: NormStats) -> FeatureMatrix:
    """(x - mean) / std per column; zero-variance columns map to 0."""
    if m.values.shape[1] != len(s.column_names):
        raise DimensionMismatch(
            f"matrix has {m.values.shape[1]} columns, stats have {len(s.column_names)}"
        )
    std = np.where(s.std == 0.0, 1.0, s.std)
    out = (m.values - s.mean) / std
    out[:, s.std == 0.0] = 0.0
    return FeatureMatrix(out, m.column_names, m.participant_id)

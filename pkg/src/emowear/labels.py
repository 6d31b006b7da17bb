"""Emotion ground-truth labels from facial-expression-analysis exports.

Parses the 12-channel intensity CSV, aligns samples to the sensor feature
timeline by nearest timestamp, computes the per-emotion baseline table
(mean intensity and percentage of samples farther than one std from it),
and builds the three-channel target matrix with leakage-safe min-max
scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ChannelTooShort,
    DegenerateRange,
    EmptyStream,
    MissingChannelColumn,
    NonMonotonicTime,
    NoOverlap,
)

EMOTIONS = (
    "Joy",
    "Anger",
    "Surprise",
    "Fear",
    "Contempt",
    "Disgust",
    "Sadness",
    "Neutral",
    "Positive",
    "Negative",
    "Confusion",
    "Frustration",
)

TARGET_EMOTIONS = ("Neutral", "Positive", "Negative")


@dataclass(frozen=True)
class EmotionTimeSeries:
    """Twelve intensity channels on a shared, strictly increasing timeline."""

    timestamps: np.ndarray
    intensities: np.ndarray  # n x 12, columns in EMOTIONS order
    dropped_rows: int = 0

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.float64)
        vals = np.asarray(self.intensities, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "intensities", vals)
        if vals.ndim != 2 or vals.shape[1] != len(EMOTIONS):
            raise MissingChannelColumn(f"expected {len(EMOTIONS)} channels, got shape {vals.shape}")
        if vals.shape[0] != ts.size:
            raise NonMonotonicTime("timestamp/intensity length mismatch")
        if ts.size > 1 and not np.all(np.diff(ts) > 0):
            raise NonMonotonicTime("label timestamps not strictly increasing")

    def channel(self, name: str) -> np.ndarray:
        return self.intensities[:, EMOTIONS.index(name)]


@dataclass(frozen=True)
class EmotionBaselineTable:
    """Per-emotion mean intensity and % of samples outside one std."""

    baselines: dict[str, float]
    pct_outside_1std: dict[str, float]

    def __post_init__(self):
        for name, pct in self.pct_outside_1std.items():
            if not 0.0 <= pct <= 100.0:
                raise ValueError(f"{name}: percentage {pct} outside [0, 100]")


@dataclass(frozen=True)
class TargetScaling:
    """Per-channel (min, max) fitted on training rows only."""

    channel_names: tuple[str, ...]
    minimum: np.ndarray
    maximum: np.ndarray

    def to_text(self) -> str:
        lines = ["# channel min max"]
        for name, lo, hi in zip(self.channel_names, self.minimum, self.maximum):
            lines.append(f"{name} {float(lo)!r} {float(hi)!r}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class TargetMatrix:
    """Scaled Neutral/Positive/Negative intensities in [0, 1]."""

    values: np.ndarray  # n x 3
    channel_names: tuple[str, ...]
    scaling: TargetScaling


def parse_fea_export(source) -> EmotionTimeSeries:
    """Parse a facial-expression-analysis intensity export.

    The header must name a timestamp column plus all twelve emotion
    columns. Rows with any missing or unparseable cell are dropped and
    counted in ``dropped_rows``.
    """
    from .ingest import _decode  # shared text/bytes handling

    text = _decode(source)
    lines = text.splitlines()
    if not lines:
        raise EmptyStream("empty label export")
    header = [h.strip() for h in lines[0].split(",")]
    missing = [e for e in EMOTIONS if e not in header]
    if missing:
        raise MissingChannelColumn(f"label export lacks columns {missing}")
    if "timestamp" not in header:
        raise MissingChannelColumn("label export lacks a timestamp column")
    t_col = header.index("timestamp")
    cols = [header.index(e) for e in EMOTIONS]

    times: list[float] = []
    rows: list[list[float]] = []
    dropped = 0
    for raw in lines[1:]:
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) <= max(max(cols), t_col):
            dropped += 1
            continue
        try:
            t = float(cells[t_col])
            row = [float(cells[c]) for c in cols]
        except ValueError:
            dropped += 1
            continue
        times.append(t)
        rows.append(row)

    if not rows:
        raise EmptyStream("label export has no usable rows")
    return EmotionTimeSeries(
        timestamps=np.array(times),
        intensities=np.array(rows),
        dropped_rows=dropped,
    )


def align_labels(
    labels: EmotionTimeSeries, feature_timestamps, tolerance: float
) -> tuple[np.ndarray, np.ndarray]:
    """Pair each feature row with the nearest-in-time label sample.

    Returns (kept_feature_indexes, intensities) where intensities is one
    label row per kept feature row. Feature rows with no label within
    ``tolerance`` seconds are dropped from the pairing; the caller drops
    the same rows from the feature matrix, keeping the two aligned.
    """
    ft = np.asarray(feature_timestamps, dtype=np.float64)
    lt = labels.timestamps
    if ft.size == 0:
        raise NoOverlap("empty feature timeline")
    if lt[-1] < ft[0] - tolerance or lt[0] > ft[-1] + tolerance:
        raise NoOverlap("label span does not overlap the feature timeline")

    right = np.searchsorted(lt, ft)
    left = np.clip(right - 1, 0, lt.size - 1)
    right = np.clip(right, 0, lt.size - 1)
    pick_right = np.abs(lt[right] - ft) < np.abs(lt[left] - ft)
    nearest = np.where(pick_right, right, left)
    within = np.abs(lt[nearest] - ft) <= tolerance
    if not within.any():
        raise NoOverlap("no feature row has a label within tolerance")
    kept = np.nonzero(within)[0]
    return kept, labels.intensities[nearest[kept]]


def baseline_stats(labels: EmotionTimeSeries) -> EmotionBaselineTable:
    """Mean intensity and % of samples with |x - mean| > std, per emotion."""
    n = labels.timestamps.size
    if n < 2:
        raise ChannelTooShort(f"need at least 2 samples, got {n}")
    baselines = {}
    pct = {}
    for i, name in enumerate(EMOTIONS):
        col = labels.intensities[:, i]
        mean = float(col.mean())
        std = float(col.std())
        baselines[name] = mean
        outside = np.abs(col - mean) > std
        pct[name] = 100.0 * float(np.count_nonzero(outside)) / n
    return EmotionBaselineTable(baselines=baselines, pct_outside_1std=pct)


def render_baseline_table(table: EmotionBaselineTable) -> str:
    """Aligned two-block text table: emotion, baseline, % outside 1st std."""
    half = len(EMOTIONS) // 2
    left_block = EMOTIONS[:half]
    right_block = EMOTIONS[half:]
    header = f"{'Emotion':<12}{'Baseline':>12}{'% out 1std':>12}"
    lines = [header + "    " + header, "-" * (len(header) * 2 + 4)]
    for lname, rname in zip(left_block, right_block):
        lrow = f"{lname:<12}{table.baselines[lname]:>12.7g}{table.pct_outside_1std[lname]:>12.2f}"
        rrow = f"{rname:<12}{table.baselines[rname]:>12.7g}{table.pct_outside_1std[rname]:>12.2f}"
        lines.append(lrow + "    " + rrow)
    return "\n".join(lines) + "\n"


def fit_target_scaling(intensities: np.ndarray, channel_names=TARGET_EMOTIONS) -> TargetScaling:
    """Min-max range per target channel over training rows."""
    cols = [EMOTIONS.index(c) for c in channel_names]
    sub = intensities[:, cols]
    lo = sub.min(axis=0)
    hi = sub.max(axis=0)
    for name, a, b in zip(channel_names, lo, hi):
        if a == b:
            raise DegenerateRange(f"target channel {name} is constant on the training rows")
    return TargetScaling(tuple(channel_names), lo, hi)


def apply_target_scaling(intensities: np.ndarray, scaling: TargetScaling) -> np.ndarray:
    """Scale to [0, 1] with training params; out-of-range values clip."""
    cols = [EMOTIONS.index(c) for c in scaling.channel_names]
    sub = intensities[:, cols]
    scaled = (sub - scaling.minimum) / (scaling.maximum - scaling.minimum)
    return np.clip(scaled, 0.0, 1.0)


def select_targets(intensities: np.ndarray, training_row_mask) -> TargetMatrix:
    """Build the Neutral/Positive/Negative target matrix.

    Scaling is fitted on rows where ``training_row_mask`` is True and then
    applied to every row; non-training rows may clip at the [0, 1] edges.
    """
    mask = np.asarray(training_row_mask, dtype=bool)
    scaling = fit_target_scaling(intensities[mask])
    return TargetMatrix(
        values=apply_target_scaling(intensities, scaling),
        channel_names=TARGET_EMOTIONS,
        scaling=scaling,
    )

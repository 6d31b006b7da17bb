"""Per-participant plumbing from raw files to model-ready arrays.

For each participant: parse channels and markers, align the eight streams
onto the uniform session grid, smooth each channel with the trailing
moving average (trimming the first window-1 rows), then attach the
nearest-in-time label row to every remaining feature row. Rows without a
label within tolerance are dropped from features and labels together.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import ingest, labels as labels_mod, preprocess
from .errors import EmowearError

DEFAULT_RATE = 4.0


@dataclass(frozen=True)
class ParticipantData:
    """Smoothed, label-aligned arrays for one participant."""

    participant_id: str
    features: np.ndarray  # n x 8, smoothed channels (unnormalized)
    feature_names: tuple[str, ...]
    targets: np.ndarray  # n x 12 emotion intensities, EMOTIONS order
    timestamps: np.ndarray
    dropped_rows: int = 0  # feature rows without a label within tolerance


def prepare_participant(
    session: ingest.SessionRecording,
    labels_path,
    window: int = preprocess.DEFAULT_WINDOW,
    tolerance: float | None = None,
) -> ParticipantData:
    """Build one participant's aligned feature/target arrays."""
    timeline, matrix, names = ingest.session_timeline(session)
    smoothed = preprocess.smooth_matrix(matrix, window)
    feature_ts = timeline[window - 1:]

    series = labels_mod.parse_fea_export(labels_path)
    if tolerance is None:
        tolerance = 1.0 / session.sample_rate_out
    kept, intensities = labels_mod.align_labels(series, feature_ts, tolerance)

    return ParticipantData(
        participant_id=session.participant_id,
        features=smoothed[kept],
        feature_names=names,
        targets=intensities,
        timestamps=feature_ts[kept],
        dropped_rows=int(feature_ts.size - kept.size),
    )


def load_participant(
    manifest_path,
    window: int = preprocess.DEFAULT_WINDOW,
    rate: float = DEFAULT_RATE,
    tolerance: float | None = None,
) -> ParticipantData:
    session, labels_path = ingest.load_session(manifest_path, sample_rate_out=rate)
    if labels_path is None:
        raise EmowearError(f"{manifest_path}: manifest names no label export")
    return prepare_participant(session, labels_path, window=window, tolerance=tolerance)


def load_dataset(
    root,
    window: int = preprocess.DEFAULT_WINDOW,
    rate: float = DEFAULT_RATE,
    tolerance: float | None = None,
    participant_ids: list[str] | None = None,
) -> list[ParticipantData]:
    """Load every participant under a dataset root, sorted by id.

    Each participant is loaded independently from its own files, so the
    result for one participant never depends on which other participant
    directories exist on disk.
    """
    manifests = ingest.discover_manifests(root)
    if not manifests:
        raise EmowearError(f"no participant manifests under {Path(root)}")
    out = []
    for path in manifests:
        try:
            part = load_participant(path, window=window, rate=rate, tolerance=tolerance)
        except EmowearError as exc:
            exc.args = (f"{path.parent.name}: {exc}",)
            raise
        if participant_ids is None or part.participant_id in participant_ids:
            out.append(part)
    out.sort(key=lambda p: p.participant_id)
    return out


def pooled_arrays(dataset: list[ParticipantData]) -> tuple[np.ndarray, np.ndarray]:
    """Stack features and targets across participants (sorted id order)."""
    parts = sorted(dataset, key=lambda p: p.participant_id)
    features = np.vstack([p.features for p in parts])
    targets = np.vstack([p.targets for p in parts])
    return features, targets

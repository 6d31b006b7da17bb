"""Sensor and marker file ingestion.

Parses per-channel CSV exports into time-stamped streams, aligns the
eight channels onto one uniform session timeline by linear interpolation
over their common overlap, and segments the timeline into protocol phases
from sidecar markers. File formats:

- sensor CSV: header row naming a timestamp column and one value column
  per channel; wide files work because the schema selects columns.
- marker file: ``key=value`` lines for T1..T5, optional AS and M.
- session manifest: JSON mapping ``participant_id``, ``channels``
  (channel name -> csv path), ``markers`` and optionally ``labels``.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

import numpy as np

from .errors import (
    EmptyStream,
    InvalidMarkers,
    MalformedRow,
    ManifestError,
    MarkerOutOfRange,
    MissingChannel,
    NonMonotonicTime,
    NoOverlap,
)

# Canonical channel set and order, used everywhere downstream.
CHANNELS = (
    "Yaw",
    "Pitch",
    "Roll",
    "Temperature",
    "InternalADCVoltage",
    "GSRResistance",
    "HeartRate",
    "GSRConductance",
)

IRREGULAR = "irregular"

# Relative tolerance when deciding whether sampling intervals are uniform.
_RATE_RTOL = 1e-6


@dataclass(frozen=True)
class ChannelSchema:
    """Selects the timestamp and value columns of a sensor CSV."""

    channel: str
    timestamp_column: str = "timestamp"
    value_column: str | None = None  # defaults to the channel name

    @property
    def value_col(self) -> str:
        return self.value_column if self.value_column is not None else self.channel


@dataclass(frozen=True)
class SensorStream:
    """One channel's samples: strictly increasing timestamps, native units."""

    channel_name: str
    timestamps: np.ndarray  # seconds since session start, float64
    values: np.ndarray  # native unit, float64
    native_rate: Union[float, str] = IRREGULAR  # Hz, or "irregular"

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.float64)
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        if ts.size < 1:
            raise EmptyStream(f"channel {self.channel_name} has no samples")
        if ts.size != vals.size:
            raise NonMonotonicTime("timestamp/value length mismatch")
        if ts.size > 1 and not np.all(np.diff(ts) > 0):
            raise NonMonotonicTime(f"channel {self.channel_name}: timestamps not strictly increasing")

    @property
    def span(self) -> tuple[float, float]:
        return float(self.timestamps[0]), float(self.timestamps[-1])


@dataclass(frozen=True)
class PhaseMarkers:
    """Protocol phase boundaries T1..T5 plus optional AS/M sub-markers.

    T1-T2 waiting/pre-stress, T2-T3 stress, T3-T5 recovery (T4 splits the
    two recovery blocks). AS and M mark the anticipatory-stress and
    speech/arithmetic sub-segments inside the stress phase.
    """

    t1: float
    t2: float
    t3: float
    t4: float
    t5: float
    as_start: float | None = None
    m_start: float | None = None

    def __post_init__(self):
        seq = (self.t1, self.t2, self.t3, self.t4, self.t5)
        if not all(a < b for a, b in zip(seq, seq[1:])):
            raise InvalidMarkers(f"markers must satisfy T1 < T2 < T3 < T4 < T5, got {seq}")
        if (self.as_start is None) != (self.m_start is None):
            raise InvalidMarkers("AS and M markers must be given together")
        if self.as_start is not None:
            if not (self.t2 <= self.as_start < self.m_start < self.t3):
                raise InvalidMarkers("sub-markers must satisfy T2 <= AS < M < T3")

    @property
    def boundaries(self) -> dict[str, float]:
        return {"T1": self.t1, "T2": self.t2, "T3": self.t3, "T4": self.t4, "T5": self.t5}


@dataclass(frozen=True)
class SessionRecording:
    """One participant's raw streams plus markers and target alignment rate."""

    participant_id: str
    streams: dict[str, SensorStream] = field(default_factory=dict)
    markers: PhaseMarkers | None = None
    sample_rate_out: float = 4.0

    def __post_init__(self):
        if not self.participant_id:
            raise ManifestError("participant_id must be nonempty")
        for name, stream in self.streams.items():
            if name != stream.channel_name:
                raise ManifestError(f"stream key {name!r} != channel {stream.channel_name!r}")


def _decode(source) -> str:
    """Accepts bytes, a binary file object, a text file object, or a path."""
    if isinstance(source, (str, Path)):
        return Path(source).read_text(encoding="utf-8")
    if isinstance(source, bytes):
        return source.decode("utf-8")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8")
    return data


def parse_sensor_csv(source, schema: ChannelSchema) -> SensorStream:
    """Parse one channel from a CSV export.

    Duplicate timestamps collapse to the last value seen; a decreasing
    timestamp raises NonMonotonicTime; a non-numeric cell raises
    MalformedRow with its 1-based line number (header is line 1).
    """
    text = _decode(source)
    lines = text.splitlines()
    if not lines:
        raise EmptyStream(f"channel {schema.channel}: empty file")

    header = [h.strip() for h in lines[0].split(",")]
    try:
        t_col = header.index(schema.timestamp_column)
        v_col = header.index(schema.value_col)
    except ValueError:
        raise MissingChannel(
            f"channel {schema.channel}: columns {schema.timestamp_column!r}/{schema.value_col!r} "
            f"not in header {header}"
        ) from None

    times: list[float] = []
    values: list[float] = []
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        cells = raw.split(",")
        if len(cells) <= max(t_col, v_col):
            raise MalformedRow(lineno, f"expected {len(header)} cells, got {len(cells)}")
        try:
            t = float(cells[t_col])
            v = float(cells[v_col])
        except ValueError:
            raise MalformedRow(lineno, raw.strip()) from None
        if times and t < times[-1]:
            raise NonMonotonicTime(
                f"channel {schema.channel}: t={t} after t={times[-1]} (line {lineno})"
            )
        if times and t == times[-1]:
            values[-1] = v  # last write wins for duplicate timestamps
        else:
            times.append(t)
            values.append(v)

    if not times:
        raise EmptyStream(f"channel {schema.channel}: no data rows")
    return SensorStream(
        channel_name=schema.channel,
        timestamps=np.array(times),
        values=np.array(values),
        native_rate=_infer_rate(np.array(times)),
    )


def _infer_rate(ts: np.ndarray) -> Union[float, str]:
    if ts.size < 2:
        return IRREGULAR
    dts = np.diff(ts)
    dt = float(np.median(dts))
    if dt <= 0 or not np.all(np.abs(dts - dt) <= _RATE_RTOL * dt):
        return IRREGULAR
    return 1.0 / dt


def write_sensor_csv(stream: SensorStream, path, timestamp_column: str = "timestamp") -> None:
    """Inverse of parse_sensor_csv; repr() keeps floats round-trip exact."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{timestamp_column},{stream.channel_name}\n")
        for t, v in zip(stream.timestamps, stream.values):
            fh.write(f"{float(t)!r},{float(v)!r}\n")


def parse_marker_file(source) -> PhaseMarkers:
    """Parse ``key=value`` marker lines (T1..T5 required, AS/M optional)."""
    text = _decode(source)
    kv: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise MalformedRow(lineno, line)
        key, _, val = line.partition("=")
        try:
            kv[key.strip()] = float(val)
        except ValueError:
            raise MalformedRow(lineno, line) from None
    missing = [k for k in ("T1", "T2", "T3", "T4", "T5") if k not in kv]
    if missing:
        raise InvalidMarkers(f"marker file lacks {missing}")
    return PhaseMarkers(
        t1=kv["T1"],
        t2=kv["T2"],
        t3=kv["T3"],
        t4=kv["T4"],
        t5=kv["T5"],
        as_start=kv.get("AS"),
        m_start=kv.get("M"),
    )


def write_marker_file(markers: PhaseMarkers, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for key, val in markers.boundaries.items():
            fh.write(f"{key}={float(val)!r}\n")
        if markers.as_start is not None:
            fh.write(f"AS={float(markers.as_start)!r}\n")
            fh.write(f"M={float(markers.m_start)!r}\n")


def align_streams(
    streams: dict[str, SensorStream] | list[SensorStream],
    rate: float,
    required_channels: tuple[str, ...] | None = None,
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Resample streams onto a shared uniform grid over their overlap.

    Values are linearly interpolated between native samples; the grid never
    extends past any channel's first or last sample, so nothing is
    extrapolated. Returns (timestamps, matrix n x d, channel names); column
    order follows CHANNELS for known channels, then name order.

    When required_channels is given, every listed channel must be present
    (the session-level call passes all eight).
    """
    if isinstance(streams, dict):
        by_name = dict(streams)
    else:
        by_name = {s.channel_name: s for s in streams}
    if required_channels is not None:
        missing = [c for c in required_channels if c not in by_name]
        if missing:
            raise MissingChannel(f"missing channels: {missing}")
    if not by_name:
        raise MissingChannel("no streams to align")
    if rate <= 0:
        raise ValueError("alignment rate must be positive")

    names = tuple(sorted(by_name, key=_channel_sort_key))
    start = max(by_name[n].span[0] for n in names)
    end = min(by_name[n].span[1] for n in names)
    if end < start:
        raise NoOverlap(f"streams share no time interval (start {start} > end {end})")

    n_steps = int(math.floor((end - start) * rate + 1e-9))
    grid = start + np.arange(n_steps + 1, dtype=np.float64) / rate
    cols = [np.interp(grid, by_name[n].timestamps, by_name[n].values) for n in names]
    return grid, np.column_stack(cols), names


def _channel_sort_key(name: str):
    try:
        return (0, CHANNELS.index(name))
    except ValueError:
        return (1, name)


def session_timeline(session: SessionRecording) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Align a full recording; all eight canonical channels are required."""
    return align_streams(session.streams, session.sample_rate_out, required_channels=CHANNELS)


# Phase ids, in timeline order.
PHASES = ("pre_stress", "stress", "recovery")
SUB_SEGMENTS = ("stress/AS", "stress/M")


def segment_phases(
    timestamps: np.ndarray, markers: PhaseMarkers
) -> dict[str, tuple[int, int]]:
    """Assign every timeline row to exactly one protocol phase.

    Rows partition into pre_stress (t < T2), stress (T2 <= t < T3) and
    recovery (t >= T3); half-open ranges are returned as (start, stop) row
    indexes. Sub-segment ranges stress/AS and stress/M are added when the
    optional markers are present. Markers outside the recorded span raise
    MarkerOutOfRange.
    """
    ts = np.asarray(timestamps, dtype=np.float64)
    if ts.size == 0:
        raise EmptyStream("empty timeline")
    first, last = float(ts[0]), float(ts[-1])
    for key, val in markers.boundaries.items():
        if val < first or val > last:
            raise MarkerOutOfRange(f"marker {key}={val} outside recording span [{first}, {last}]")

    i2 = int(np.searchsorted(ts, markers.t2, side="left"))
    i3 = int(np.searchsorted(ts, markers.t3, side="left"))
    ranges = {
        "pre_stress": (0, i2),
        "stress": (i2, i3),
        "recovery": (i3, int(ts.size)),
    }
    if markers.as_start is not None:
        ia = int(np.searchsorted(ts, markers.as_start, side="left"))
        im = int(np.searchsorted(ts, markers.m_start, side="left"))
        ranges["stress/AS"] = (ia, im)
        ranges["stress/M"] = (im, i3)
    return ranges


def load_session(manifest_path, sample_rate_out: float = 4.0) -> tuple[SessionRecording, Path | None]:
    """Load one participant's recording from a manifest file.

    Returns the recording and the path of its label export (None when the
    manifest names no labels). Relative paths resolve against the
    manifest's directory.
    """
    manifest_path = Path(manifest_path)
    try:
        spec = json.loads(manifest_path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ManifestError(f"{manifest_path}: {exc}") from exc

    for key in ("participant_id", "channels", "markers"):
        if key not in spec:
            raise ManifestError(f"{manifest_path}: missing key {key!r}")

    base = manifest_path.parent
    streams = {}
    for channel, rel in spec["channels"].items():
        path = base / rel
        if not path.exists():
            raise ManifestError(f"{manifest_path}: channel file {path} not found")
        streams[channel] = parse_sensor_csv(path, ChannelSchema(channel=channel))
    markers = parse_marker_file(base / spec["markers"])

    session = SessionRecording(
        participant_id=spec["participant_id"],
        streams=streams,
        markers=markers,
        sample_rate_out=sample_rate_out,
    )
    labels_path = base / spec["labels"] if "labels" in spec else None
    return session, labels_path


def discover_manifests(root) -> list[Path]:
    """Find per-participant manifest.json files under a dataset root, sorted."""
    root = Path(root)
    if not root.is_dir():
        raise ManifestError(f"dataset root {root} is not a directory")
    return sorted(root.glob("*/manifest.json"))

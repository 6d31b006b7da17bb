"""Deterministic synthetic session generator.

Generates stress-protocol sessions in the exact on-disk formats the
ingest and label modules read, so the full pipeline and its acceptance
suite run without any human-subject data. This is NOT a physiological
model: channels are fixed waveform families with phase-dependent shifts
(stress raises heart rate and skin conductance), and emotion intensities
are known functions of the channels. Its job is to exercise code paths
and provide known-answer regressions.

Emotion intensities derive from the trailing moving average of the
channels (same window the preprocessing applies), so with the linear link
and zero noise the default pipeline is exactly linearly realizable. The
nonlinear link mixes products, magnitudes, and threshold terms that a
linear model cannot capture but trees can.

Output is bit-identical for identical specs: every participant draws from
a generator seeded by hash(seed, participant id), and floats are written
with repr().
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .evaluation import derive_seed
from .ingest import CHANNELS, PhaseMarkers, SensorStream, write_marker_file, write_sensor_csv
from .labels import EMOTIONS
from .preprocess import moving_average

# Design constants for the synthetic channels: resting level, oscillation
# amplitude, and sensor noise scale, in each channel's native unit.
_BASE = {
    "Yaw": 0.0,
    "Pitch": 0.0,
    "Roll": 0.0,
    "Temperature": 33.0,
    "InternalADCVoltage": 3.0,
    "GSRResistance": 500.0,
    "HeartRate": 70.0,
    "GSRConductance": 2.0,
}
_AMP = {
    "Yaw": 8.0,
    "Pitch": 6.0,
    "Roll": 5.0,
    "Temperature": 0.6,
    "InternalADCVoltage": 0.05,
    "GSRResistance": 30.0,
    "HeartRate": 5.0,
    "GSRConductance": 0.5,
}
# Mean shifts applied during the stress phase.
_STRESS_SHIFT = {
    "HeartRate": 12.0,
    "GSRConductance": 1.5,
    "GSRResistance": -40.0,
    "Temperature": -0.3,
}
# Oscillation periods as fractions of the session length: one slow
# deterministic sweep (identical for every participant, so per-subject
# value ranges coincide) and two faster randomized components.
_PERIOD_FRACTIONS = {
    "Yaw": (0.90, 0.31, 0.17),
    "Pitch": (0.70, 0.23, 0.13),
    "Roll": (0.80, 0.37, 0.19),
    "Temperature": (1.10, 0.43, 0.21),
    "InternalADCVoltage": (1.30, 0.29, 0.15),
    "GSRResistance": (0.85, 0.41, 0.23),
    "HeartRate": (0.75, 0.27, 0.14),
    "GSRConductance": (0.95, 0.33, 0.18),
}
# Waveform composition per link mode. The linear set keeps participants'
# value ranges nearly identical (deterministic sweep dominates) so target
# min-max clipping stays negligible and OLS realizability is exact. The
# nonlinear set maximizes cross-participant trajectory diversity so one
# global hyperplane cannot track the link, while trees can. Its period
# scale stretches the randomized components to near-session length:
# anything much shorter than twice the smoothing window would not survive
# the moving average anyway.
#   (det sweep, rand1, rand2, offset, jitter half-width, period scale)
_LINK_STRUCTURE = {
    "linear": (0.65, 0.25, 0.10, 0.02, 0.05, 1.0),
    "nonlinear": (0.35, 0.50, 0.25, 0.03, 0.10, 3.0),
}
_NOISE_FRACTION = 0.04  # sensor noise as a fraction of the oscillation amplitude


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters of one synthetic dataset."""

    n_participants: int = 39
    prestress_minutes: float = 20.0  # waiting + pre-stress block (T1-T2)
    stress_minutes: float = 20.0  # stress block (T2-T3)
    recovery_minutes: float = 40.0  # both recovery blocks (T3-T5)
    sample_rate_hz: float = 4.0
    seed: int = 0
    emotion_link: str = "linear"  # or "nonlinear"
    noise_std: float = 0.0  # label noise, intensity units
    smoothing_window: int = 60

    def __post_init__(self):
        if self.n_participants < 2:
            raise ValueError("need at least 2 participants")
        for name in ("prestress_minutes", "stress_minutes", "recovery_minutes"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.emotion_link not in ("linear", "nonlinear"):
            raise ValueError(f"unknown emotion link {self.emotion_link!r}")
        if self.sample_rate_hz <= 0:
            raise ValueError("sample rate must be positive")

    @property
    def total_seconds(self) -> float:
        return 60.0 * (self.prestress_minutes + self.stress_minutes + self.recovery_minutes)

    def markers(self) -> PhaseMarkers:
        t2 = 60.0 * self.prestress_minutes
        t3 = t2 + 60.0 * self.stress_minutes
        t5 = t3 + 60.0 * self.recovery_minutes
        return PhaseMarkers(
            t1=0.0, t2=t2, t3=t3, t4=(t3 + t5) / 2.0, t5=t5,
            as_start=t2, m_start=t2 + 30.0 * self.stress_minutes,
        )


def benchmark_spec() -> GeneratorSpec:
    """The frozen nonlinear dataset used by the end-to-end ranking check."""
    return GeneratorSpec(
        n_participants=8,
        prestress_minutes=0.75,
        stress_minutes=0.75,
        recovery_minutes=1.0,
        sample_rate_hz=1.0,
        seed=20250810,
        emotion_link="nonlinear",
        noise_std=0.05,
    )


def determinism_spec() -> GeneratorSpec:
    """Small all-model dataset for byte-identical rerun checks."""
    return GeneratorSpec(
        n_participants=4,
        prestress_minutes=0.5,
        stress_minutes=0.75,
        recovery_minutes=0.75,
        sample_rate_hz=1.0,
        seed=7,
        emotion_link="nonlinear",
        noise_std=0.05,
    )


def linear_demo_spec(n_participants: int = 5) -> GeneratorSpec:
    """Noise-free linear dataset: OLS should hit r^2 ~ 1 per fold."""
    return GeneratorSpec(
        n_participants=n_participants,
        prestress_minutes=0.75,
        stress_minutes=1.0,
        recovery_minutes=1.0,
        sample_rate_hz=1.0,
        seed=11,
        emotion_link="linear",
        noise_std=0.0,
    )


def _causal_smooth(x: np.ndarray, window: int) -> np.ndarray:
    """Trailing moving average with an expanding head.

    From index window-1 on this is exactly preprocess.moving_average, the
    rows the default pipeline keeps; earlier rows use the partial-window
    mean so every timestamp still gets a label.
    """
    out = np.empty_like(x)
    out[window - 1:] = moving_average(x, window)
    head = np.cumsum(x[: window - 1])
    out[: window - 1] = head / np.arange(1, window)
    return out


def _standardized_channels(smoothed: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
    """Fixed-constant standardization (design values, not data statistics)."""
    return {name: (smoothed[name] - _BASE[name]) / _AMP[name] for name in CHANNELS}


def _emotion_channels(z: dict[str, np.ndarray], link: str) -> dict[str, np.ndarray]:
    """Noise-free emotion intensities from standardized smoothed channels."""
    hr, gsc = z["HeartRate"], z["GSRConductance"]
    temp, yaw = z["Temperature"], z["Yaw"]
    pitch, roll = z["Pitch"], z["Roll"]
    adc, gsr = z["InternalADCVoltage"], z["GSRResistance"]

    if link == "linear":
        neutral = 0.5 - 0.35 * hr + 0.25 * temp + 0.10 * yaw
        positive = 0.3 + 0.30 * pitch - 0.25 * gsc + 0.15 * roll
        negative = 0.2 + 0.40 * hr + 0.30 * gsc - 0.10 * temp
    else:
        # Each smoothed channel is a slow near-polynomial arc in time, so
        # smooth functions of the channels (products, squares) stay close
        # to the linear span of the eight features. Only kinked terms,
        # magnitudes, threshold gates, and gated channels, defeat a
        # hyperplane here; they are also exactly what axis-aligned trees
        # capture well.
        # Single-channel kinks only: cross-channel interactions need joint
        # coverage that per-subject arcs cannot guarantee, which makes
        # leave-one-subject-out scores erratic even for trees.
        gate_p = np.where(pitch > 0.25, 1.0, 0.0)
        gate_t = np.where(temp > 0.2, 1.0, 0.0)
        gate_g = np.where(gsc > 0.8, 1.0, 0.0)
        neutral = 0.5 - 0.50 * np.abs(yaw) + 0.35 * gate_p - 0.15 * hr
        positive = 0.3 + 0.55 * np.abs(pitch) + 0.30 * gate_t - 0.25 * np.abs(yaw) - 0.10 * hr
        negative = 0.2 + 0.50 * np.abs(roll) + 0.35 * gate_g + 0.15 * hr - 0.30 * np.abs(pitch)

    # The nine non-target emotions are light linear mixes; they only feed
    # the baseline table, the correlation matrix and the PCA labels.
    out = {
        "Joy": 0.4 + 0.3 * temp - 0.2 * hr + 0.1 * pitch,
        "Anger": 0.1 + 0.4 * hr + 0.2 * gsc - 0.1 * temp,
        "Surprise": 0.2 + 0.3 * yaw - 0.2 * roll + 0.1 * adc,
        "Fear": 0.15 + 0.35 * gsc - 0.15 * pitch + 0.1 * gsr,
        "Contempt": 0.25 - 0.2 * yaw + 0.15 * hr - 0.1 * adc,
        "Disgust": 0.2 - 0.25 * temp + 0.2 * gsc + 0.05 * roll,
        "Sadness": 0.3 - 0.3 * pitch - 0.1 * hr + 0.15 * gsr,
        "Neutral": neutral,
        "Positive": positive,
        "Negative": negative,
        "Confusion": 0.35 + 0.25 * roll - 0.2 * temp + 0.1 * hr,
        "Frustration": 0.25 + 0.3 * gsc + 0.15 * yaw - 0.1 * gsr,
    }
    return out


def _generate_participant(spec: GeneratorSpec, pid: str):
    """Channels and label intensities for one participant."""
    rng = np.random.default_rng(derive_seed(spec.seed, "participant", pid))
    rate = spec.sample_rate_hz
    n = int(round(spec.total_seconds * rate)) + 1
    t = np.arange(n, dtype=np.float64) / rate
    markers = spec.markers()
    stress = (t >= markers.t2) & (t < markers.t3)

    det_w, rand1_w, rand2_w, offset_frac, jitter_hw, period_scale = \
        _LINK_STRUCTURE[spec.emotion_link]
    raw: dict[str, np.ndarray] = {}
    for ci, name in enumerate(CHANNELS):
        offset = rng.normal(0.0, offset_frac * _AMP[name])
        phase1, phase2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
        jitter1, jitter2 = rng.uniform(1.0 - jitter_hw, 1.0 + jitter_hw, size=2)
        noise = rng.normal(0.0, _NOISE_FRACTION * _AMP[name], size=n)

        frac_det, frac1, frac2 = _PERIOD_FRACTIONS[name]
        w_det = 2.0 * np.pi / (spec.total_seconds * frac_det)
        phase_det = 2.0 * np.pi * 0.618 * ci  # fixed stagger across channels
        w1 = 2.0 * np.pi / (spec.total_seconds * frac1 * period_scale * jitter1)
        w2 = 2.0 * np.pi / (spec.total_seconds * frac2 * period_scale * jitter2)
        signal = (
            _BASE[name]
            + offset
            + det_w * _AMP[name] * np.sin(w_det * t + phase_det)
            + rand1_w * _AMP[name] * np.sin(w1 * t + phase1)
            + rand2_w * _AMP[name] * np.sin(w2 * t + phase2)
            + noise
        )
        if name in _STRESS_SHIFT:
            signal = signal + np.where(stress, _STRESS_SHIFT[name], 0.0)
        raw[name] = signal

    smoothed = {name: _causal_smooth(raw[name], spec.smoothing_window) for name in CHANNELS}
    z = _standardized_channels(smoothed)
    emotions = _emotion_channels(z, spec.emotion_link)
    if spec.noise_std > 0:
        for name in EMOTIONS:
            emotions[name] = emotions[name] + rng.normal(0.0, spec.noise_std, size=n)

    return t, raw, emotions, markers


def generate(spec: GeneratorSpec, out_dir) -> list[Path]:
    """Write the synthetic dataset; returns the participant directories."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pad = max(2, len(str(spec.n_participants)))
    dirs = []
    for i in range(1, spec.n_participants + 1):
        pid = f"P{i:0{pad}d}"
        pdir = out_dir / pid
        pdir.mkdir(parents=True, exist_ok=True)
        t, raw, emotions, markers = _generate_participant(spec, pid)

        channel_files = {}
        for name in CHANNELS:
            fname = f"{name}.csv"
            stream = SensorStream(channel_name=name, timestamps=t, values=raw[name],
                                  native_rate=spec.sample_rate_hz)
            write_sensor_csv(stream, pdir / fname)
            channel_files[name] = fname

        write_marker_file(markers, pdir / "markers.txt")

        with open(pdir / "fea.csv", "w", encoding="utf-8", newline="\n") as fh:
            fh.write("timestamp," + ",".join(EMOTIONS) + "\n")
            for k in range(t.size):
                cells = ",".join(repr(float(emotions[name][k])) for name in EMOTIONS)
                fh.write(f"{float(t[k])!r},{cells}\n")

        manifest = {
            "participant_id": pid,
            "channels": channel_files,
            "markers": "markers.txt",
            "labels": "fea.csv",
        }
        (pdir / "manifest.json").write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        dirs.append(pdir)
    return dirs

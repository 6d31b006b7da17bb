"""Synthetic generator: determinism, round-trips, built-in effects."""

import filecmp
from pathlib import Path

import numpy as np
import pytest

from emowear import ingest, pipeline, synth
from emowear.evaluation import run_experiment
from emowear.models import make_config


def _tree_bytes(root: Path) -> dict:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def _small_spec(**overrides) -> synth.GeneratorSpec:
    params = dict(
        n_participants=3,
        prestress_minutes=0.5,
        stress_minutes=0.5,
        recovery_minutes=0.5,
        sample_rate_hz=1.0,
        seed=7,
        emotion_link="linear",
        noise_std=0.0,
    )
    params.update(overrides)
    return synth.GeneratorSpec(**params)


def test_same_seed_byte_identical_trees(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    synth.generate(_small_spec(), a)
    synth.generate(_small_spec(), b)
    assert _tree_bytes(a) == _tree_bytes(b)


def test_different_seed_differs(tmp_path):
    a = tmp_path / "a"
    b = tmp_path / "b"
    synth.generate(_small_spec(), a)
    synth.generate(_small_spec(seed=8), b)
    assert _tree_bytes(a) != _tree_bytes(b)


def test_round_trip_zero_dropped_rows(tmp_path):
    synth.generate(_small_spec(noise_std=0.05), tmp_path / "d")
    dataset = pipeline.load_dataset(tmp_path / "d", window=30, rate=1.0)
    assert len(dataset) == 3
    for part in dataset:
        assert part.dropped_rows == 0
        assert part.features.shape[0] == part.targets.shape[0]
        assert np.all(np.isfinite(part.features))


def test_stress_raises_heart_rate_for_every_participant(tmp_path):
    spec = _small_spec(n_participants=5, emotion_link="nonlinear", noise_std=0.05)
    synth.generate(spec, tmp_path / "d")
    for manifest in ingest.discover_manifests(tmp_path / "d"):
        session, _ = ingest.load_session(manifest, sample_rate_out=1.0)
        timeline, matrix, names = ingest.session_timeline(session)
        ranges = ingest.segment_phases(timeline, session.markers)
        hr = matrix[:, names.index("HeartRate")]
        pre = hr[slice(*ranges["pre_stress"])].mean()
        stress = hr[slice(*ranges["stress"])].mean()
        assert stress > pre


def test_marker_layout_follows_protocol(tmp_path):
    spec = _small_spec()
    markers = spec.markers()
    assert markers.t1 == 0.0
    assert markers.t2 == pytest.approx(spec.prestress_minutes * 60)
    assert markers.t3 == pytest.approx(markers.t2 + spec.stress_minutes * 60)
    assert markers.t5 == pytest.approx(markers.t3 + spec.recovery_minutes * 60)
    assert markers.as_start == markers.t2
    assert markers.t2 < markers.m_start < markers.t3


def test_linear_link_is_linearly_realizable(tmp_path):
    synth.generate(synth.linear_demo_spec(), tmp_path / "d")
    dataset = pipeline.load_dataset(tmp_path / "d", window=60, rate=1.0)
    result = run_experiment(dataset, [make_config("Linear")], global_seed=3)
    for fold in result.fold_results:
        for emotion, value in fold.r2.items():
            assert value >= 0.999, (fold.held_out_participant, emotion, value)


def test_all_eight_channels_written(tmp_path):
    synth.generate(_small_spec(), tmp_path / "d")
    first = tmp_path / "d" / "P01"
    for channel in ingest.CHANNELS:
        assert (first / f"{channel}.csv").exists()
    assert (first / "markers.txt").exists()
    assert (first / "fea.csv").exists()
    assert (first / "manifest.json").exists()


def test_invalid_specs_rejected():
    with pytest.raises(ValueError):
        _small_spec(n_participants=1)
    with pytest.raises(ValueError):
        _small_spec(stress_minutes=0.0)
    with pytest.raises(ValueError):
        _small_spec(emotion_link="quadratic")

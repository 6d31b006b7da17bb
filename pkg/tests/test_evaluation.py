"""Metrics, LOSO folds, and the experiment harness."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from emowear.errors import LengthMismatch, TooFewParticipants, ZeroVariance
from emowear.evaluation import (
    ExperimentResult,
    derive_seed,
    fit_fold,
    loso_split,
    mse,
    r2_score,
    render_metric_table,
    results_csv,
    run_experiment,
)
from emowear.labels import EMOTIONS
from emowear.models import DISPLAY_NAMES, make_config
from emowear.pipeline import ParticipantData


class TestR2:
    def test_perfect_prediction(self):
        y = np.array([1.0, 2.0, 3.0])
        assert r2_score(y, y) == 1.0

    def test_mean_prediction_is_zero(self):
        y = np.array([1.0, 2.0, 3.0])
        assert r2_score(y, np.full(3, 2.0)) == 0.0

    def test_negative_score(self):
        assert r2_score([0.0, 1.0, 2.0], [0.0, 0.0, 0.0]) == pytest.approx(-1.5, abs=1e-15)

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            r2_score([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            r2_score([1.0, 2.0], [1.0, 2.0, 3.0])

    @given(
        st.lists(st.floats(-100, 100), min_size=3, max_size=20),
        st.floats(0.5, 4.0),
        st.floats(-10.0, 10.0),
    )
    @settings(max_examples=60, deadline=None)
    def test_affine_invariance(self, values, a, b):
        y = np.array(values)
        if y.var() == 0:
            return
        rng = np.random.default_rng(0)
        yhat = y + rng.normal(0, 1.0, size=y.size)
        base = r2_score(y, yhat)
        scaled = r2_score(a * y + b, a * yhat + b)
        assert scaled == pytest.approx(base, rel=1e-9, abs=1e-9)


class TestMse:
    def test_perfect(self):
        assert mse([1.0, 2.0], [1.0, 2.0]) == 0.0

    def test_hand_values(self):
        assert mse([0.0, 0.0], [1.0, 1.0]) == 1.0
        assert mse([1.0, 2.0, 3.0], [1.0, 2.0, 4.0]) == pytest.approx(1.0 / 3.0, abs=1e-15)

    def test_quadratic_scaling(self):
        y = np.array([1.0, 2.0, 5.0])
        yhat = np.array([0.0, 2.5, 4.0])
        assert mse(3.0 * y, 3.0 * yhat) == pytest.approx(9.0 * mse(y, yhat), rel=1e-12)


class TestLosoSplit:
    def test_two_participants(self):
        folds = loso_split(["B", "A"])
        assert folds == [(("B",), "A"), (("A",), "B")]

    def test_39_participants(self):
        ids = [f"P{i:02d}" for i in range(1, 40)]
        folds = loso_split(ids)
        assert len(folds) == 39
        held = [test for _, test in folds]
        assert sorted(held) == sorted(ids)
        for train, test in folds:
            assert test not in train
            assert len(train) == 38

    def test_too_few(self):
        with pytest.raises(TooFewParticipants):
            loso_split(["only"])


class TestDeriveSeed:
    def test_stable_and_distinct(self):
        a = derive_seed(7, "RandomForest", "Neutral", "P01")
        b = derive_seed(7, "RandomForest", "Neutral", "P01")
        c = derive_seed(7, "RandomForest", "Neutral", "P02")
        assert a == b
        assert a != c
        assert 0 <= a < 2**64


def _toy_dataset(n_participants=3, rows=40, seed=0):
    rng = np.random.default_rng(seed)
    parts = []
    names = tuple(f"ch{i}" for i in range(4))
    for i in range(n_participants):
        features = rng.normal(size=(rows, 4))
        targets = np.zeros((rows, 12))
        for e in range(12):
            targets[:, e] = rng.normal(size=rows)
        # Make the three target channels linear in the features.
        targets[:, EMOTIONS.index("Neutral")] = features @ np.array([1.0, 0.5, 0.0, 0.0])
        targets[:, EMOTIONS.index("Positive")] = features @ np.array([0.0, 1.0, -0.5, 0.0])
        targets[:, EMOTIONS.index("Negative")] = features @ np.array([0.0, 0.0, 1.0, 0.5])
        parts.append(
            ParticipantData(
                participant_id=f"P{i+1:02d}",
                features=features,
                feature_names=names,
                targets=targets,
                timestamps=np.arange(rows, dtype=float),
            )
        )
    return parts


class TestRunExperiment:
    def test_linear_targets_give_high_r2(self):
        dataset = _toy_dataset()
        result = run_experiment(dataset, [make_config("Linear")], global_seed=1)
        for emotion in ("Neutral", "Positive", "Negative"):
            assert result.table.mean_r2[("Linear", emotion)] > 0.99

    def test_fold_count_and_mean_aggregation(self):
        dataset = _toy_dataset(n_participants=2)
        result = run_experiment(dataset, [make_config("KNN")], global_seed=1)
        assert result.table.fold_count == 2
        fold_vals = [r.r2["Neutral"] for r in result.fold_results]
        assert result.table.mean_r2[("KNN", "Neutral")] == pytest.approx(
            float(np.mean(fold_vals))
        )

    def test_rows_sorted_and_complete(self):
        dataset = _toy_dataset()
        result = run_experiment(
            dataset, [make_config("Linear"), make_config("KNN")], global_seed=1
        )
        assert len(result.rows) == 2 * 3 * 3  # families x emotions x folds
        text = results_csv(result.rows)
        assert text.splitlines()[0] == "model,emotion,fold,participant,r2,mse"

    def test_parallel_equals_serial(self):
        dataset = _toy_dataset()
        configs = [make_config("Linear"), make_config("DecisionTree")]
        serial = run_experiment(dataset, configs, global_seed=5, jobs=1)
        parallel = run_experiment(dataset, configs, global_seed=5, jobs=3)
        assert results_csv(serial.rows) == results_csv(parallel.rows)

    def test_no_leakage_fit_fold_ignores_test_subject(self):
        dataset = _toy_dataset(n_participants=4)
        configs = [make_config("Ridge")]
        train = [p for p in dataset if p.participant_id != "P04"]
        a = fit_fold(train, configs, global_seed=9, held_out="P04")
        # Refit from a dataset where the held-out subject never existed.
        b = fit_fold([p for p in dataset[:3]], configs, global_seed=9, held_out="P04")
        assert a.norm_stats.to_text() == b.norm_stats.to_text()
        assert a.target_scaling.to_text() == b.target_scaling.to_text()

    def test_table_rendering_layout(self):
        dataset = _toy_dataset()
        result = run_experiment(dataset, [make_config("Linear")], global_seed=1)
        text = render_metric_table(result.table, "r2")
        lines = text.splitlines()
        assert "Negative" in lines[2] and "Neutral" in lines[2] and "Positive" in lines[2]
        assert any(DISPLAY_NAMES["Linear"] in line for line in lines)

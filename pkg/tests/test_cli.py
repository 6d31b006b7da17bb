"""Command-line interface: subcommands, exit codes, idempotence."""

import subprocess
import sys
from pathlib import Path

import pytest

from emowear.cli import main


def _tree_bytes(root: Path) -> dict:
    return {
        str(p.relative_to(root)): p.read_bytes()
        for p in sorted(root.rglob("*"))
        if p.is_file()
    }


def _synth_small(out: Path, link="linear", participants=3, seed=7, noise="0.0"):
    return main([
        "synth", "--out", str(out), "--participants", str(participants),
        "--seed", str(seed), "--rate", "1.0", "--link", link, "--noise", noise,
        "--prestress-minutes", "0.5", "--stress-minutes", "0.5",
        "--recovery-minutes", "0.5",
    ])


@pytest.fixture(scope="module")
def small_dataset(tmp_path_factory):
    out = tmp_path_factory.mktemp("data") / "synth"
    assert _synth_small(out) == 0
    return out


class TestSynthCommand:
    def test_writes_participant_directories(self, tmp_path):
        out = tmp_path / "d"
        assert _synth_small(out, participants=5) == 0
        assert len(list(out.glob("P*/manifest.json"))) == 5

    def test_missing_out_is_usage_error(self):
        with pytest.raises(SystemExit) as exc:
            main(["synth", "--participants", "3"])
        assert exc.value.code == 2

    def test_same_seed_identical_trees(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        _synth_small(a)
        _synth_small(b)
        assert _tree_bytes(a) == _tree_bytes(b)


class TestIngestCheck:
    def test_valid_dataset_passes(self, small_dataset, capsys):
        assert main(["ingest-check", "--data", str(small_dataset), "--rate", "1.0"]) == 0
        out = capsys.readouterr().out
        assert "3 sessions OK" in out

    def test_missing_dataset_fails(self, tmp_path):
        empty = tmp_path / "nothing"
        empty.mkdir()
        assert main(["ingest-check", "--data", str(empty)]) == 1


class TestAnalyze:
    def test_writes_artifacts(self, small_dataset, tmp_path):
        out = tmp_path / "analysis"
        code = main([
            "analyze", "--data", str(small_dataset), "--out", str(out),
            "--window", "20", "--rate", "1.0",
        ])
        assert code == 0
        corr = (out / "correlations.csv").read_text().splitlines()
        header = corr[0].split(",")
        assert header[0] == "" and len(header) == 21  # 8 channels + 12 emotions
        assert len(corr) == 21
        # Diagonal cells are exactly 1.0.
        assert corr[1].split(",")[1] == "1.0"
        assert (out / "pca_projection.csv").exists()
        assert (out / "pca_centroids.csv").exists()
        baselines = (out / "emotion_baselines.txt").read_text()
        assert baselines.splitlines()[0].count("Baseline") == 2

    def test_rerun_is_byte_identical(self, small_dataset, tmp_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        for out in (out_a, out_b):
            main(["analyze", "--data", str(small_dataset), "--out", str(out),
                  "--window", "20", "--rate", "1.0"])
        assert _tree_bytes(out_a) == _tree_bytes(out_b)


def _write_eval_config(path: Path, data: Path, out: Path, models="Linear,KNN", window=20):
    path.write_text(
        f"data = {data}\nout = {out}\nmodels = {models}\nseed = 5\n"
        f"window = {window}\nrate = 1.0\n"
    )


class TestEvaluate:
    def test_writes_results_and_tables(self, small_dataset, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        out = tmp_path / "results"
        _write_eval_config(cfg, small_dataset, out)
        assert main(["evaluate", "--config", str(cfg)]) == 0
        rows = (out / "results.csv").read_text().splitlines()
        assert rows[0] == "model,emotion,fold,participant,r2,mse"
        assert len(rows) == 1 + 2 * 3 * 3  # families x emotions x folds
        assert (out / "r2_table.txt").exists()
        assert (out / "mse_table.txt").exists()
        assert "excluded folds" in capsys.readouterr().out

    def test_unknown_model_is_usage_error(self, small_dataset, tmp_path):
        cfg = tmp_path / "exp.cfg"
        _write_eval_config(cfg, small_dataset, tmp_path / "r", models="SVM")
        with pytest.raises(SystemExit) as exc:
            main(["evaluate", "--config", str(cfg)])
        assert exc.value.code == 2

    def test_report_round_trip(self, small_dataset, tmp_path, capsys):
        cfg = tmp_path / "exp.cfg"
        out = tmp_path / "results"
        _write_eval_config(cfg, small_dataset, out)
        main(["evaluate", "--config", str(cfg)])
        evaluate_table = (out / "r2_table.txt").read_text()
        capsys.readouterr()
        assert main(["report", "--results", str(out / "results.csv")]) == 0
        assert evaluate_table in capsys.readouterr().out


class TestHelp:
    @pytest.mark.parametrize(
        "sub", ["synth", "ingest-check", "analyze", "evaluate", "report"]
    )
    def test_help_exits_zero(self, sub):
        with pytest.raises(SystemExit) as exc:
            main([sub, "--help"])
        assert exc.value.code == 0

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "emowear", "--help"],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0
        assert "synth" in proc.stdout and "evaluate" in proc.stdout

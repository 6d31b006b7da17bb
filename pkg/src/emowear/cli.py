"""Command-line pipeline orchestrator.

Subcommands: synth, ingest-check, analyze, evaluate, report. Exit codes:
0 success, 1 pipeline error, 2 usage error. All randomness flows from one
--seed; per-fold and per-participant seeds derive from it by hashing, so
reruns (and any --jobs level) are byte-identical.
"""

# BLAS must run single-threaded so results do not depend on the machine's
# core count or on --jobs; set before NumPy loads.
import os

for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, ingest, labels as labels_mod, pipeline, synth
from .errors import EmowearError
from .evaluation import (
    REPORT_EMOTIONS,
    ResultTable,
    render_exclusions,
    render_metric_table,
    results_csv,
    run_experiment,
)
from .models import FAMILIES, REPORT_ORDER, ModelConfig
from .preprocess import DEFAULT_WINDOW, FeatureMatrix, apply_zscore, fit_zscore

DATA_ROOT_ENV = "EMOWEAR_DATA_ROOT"

_SYNTH_PRESETS = {
    "benchmark": synth.benchmark_spec,
    "determinism": synth.determinism_spec,
    "linear-demo": synth.linear_demo_spec,
}


@dataclass(frozen=True)
class RunConfig:
    """One experiment definition, usually read from a key=value file."""

    data_root: Path
    out_dir: Path
    models: tuple[str, ...]
    seed: int = 0
    window: int = DEFAULT_WINDOW
    rate: float = pipeline.DEFAULT_RATE

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be >= 1")
        if not self.models:
            raise ValueError("model list must be nonempty")
        if Path(self.data_root).resolve() == Path(self.out_dir).resolve():
            raise ValueError("data and output paths must be distinct")


def _parse_kv_file(path: Path) -> dict[str, str]:
    out = {}
    for raw in path.read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def _resolve_models(spec: str) -> tuple[str, ...]:
    if spec.strip().lower() == "all":
        return REPORT_ORDER
    names = tuple(m.strip() for m in spec.split(",") if m.strip())
    for name in names:
        if name not in FAMILIES:
            raise ValueError(
                f"unknown model {name!r}; valid families: {', '.join(FAMILIES)}"
            )
    return names


def _load_run_config(path: Path, data_override, out_override) -> RunConfig:
    kv = _parse_kv_file(path)
    data_root = data_override or kv.get("data") or os.environ.get(DATA_ROOT_ENV)
    if not data_root:
        raise ValueError(f"{path}: no data root (set data=, --data, or ${DATA_ROOT_ENV})")
    out_dir = out_override or kv.get("out")
    if not out_dir:
        raise ValueError(f"{path}: no output directory (set out= or --out)")
    return RunConfig(
        data_root=Path(data_root),
        out_dir=Path(out_dir),
        models=_resolve_models(kv.get("models", "all")),
        seed=int(kv.get("seed", "0")),
        window=int(kv.get("window", str(DEFAULT_WINDOW))),
        rate=float(kv.get("rate", str(pipeline.DEFAULT_RATE))),
    )


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


# --- subcommands ---


def cmd_synth(args) -> int:
    if args.preset:
        spec = _SYNTH_PRESETS[args.preset]()
    else:
        spec = synth.GeneratorSpec(
            n_participants=args.participants,
            prestress_minutes=args.prestress_minutes,
            stress_minutes=args.stress_minutes,
            recovery_minutes=args.recovery_minutes,
            sample_rate_hz=args.rate,
            seed=args.seed,
            emotion_link=args.link,
            noise_std=args.noise,
        )
    dirs = synth.generate(spec, args.out)
    print(f"wrote {len(dirs)} participant sessions to {args.out}")
    return 0


def cmd_ingest_check(args) -> int:
    manifests = ingest.discover_manifests(args.data)
    if not manifests:
        print(f"error: no participant manifests under {args.data}", file=sys.stderr)
        return 1
    for manifest in manifests:
        session, labels_path = ingest.load_session(manifest, sample_rate_out=args.rate)
        timeline, matrix, names = ingest.session_timeline(session)
        phases = ingest.segment_phases(timeline, session.markers)
        label_note = ""
        if labels_path is not None:
            series = labels_mod.parse_fea_export(labels_path)
            label_note = f", {series.timestamps.size} label rows ({series.dropped_rows} dropped)"
        spans = " ".join(f"{k}={b}:{e}" for k, (b, e) in sorted(phases.items()))
        print(
            f"{session.participant_id}: {timeline.size} rows x {len(names)} channels, "
            f"span [{timeline[0]:.2f}, {timeline[-1]:.2f}] s, {spans}{label_note}"
        )
    print(f"{len(manifests)} sessions OK")
    return 0


def cmd_analyze(args) -> int:
    dataset = pipeline.load_dataset(args.data, window=args.window, rate=args.rate)
    features, targets = pipeline.pooled_arrays(dataset)
    feature_names = dataset[0].feature_names
    out = Path(args.out)

    columns = {name: features[:, i] for i, name in enumerate(feature_names)}
    for i, name in enumerate(labels_mod.EMOTIONS):
        columns[name] = targets[:, i]
    corr = analysis.pearson_matrix(columns)
    _write(out / "correlations.csv", analysis.correlation_csv(corr))

    # Standardize features before projecting so no channel dominates by unit.
    fm = FeatureMatrix(features, feature_names)
    standardized = apply_zscore(fm, fit_zscore(fm)).values
    proj = analysis.pca_project(standardized, emotion_intensities=targets, k=2)
    _write(out / "pca_projection.csv", analysis.projection_csv(proj, targets))
    _write(out / "pca_centroids.csv", analysis.centroids_csv(proj))

    pooled_series = labels_mod.EmotionTimeSeries(
        timestamps=np.arange(targets.shape[0], dtype=np.float64), intensities=targets
    )
    table = labels_mod.baseline_stats(pooled_series)
    _write(out / "emotion_baselines.txt", labels_mod.render_baseline_table(table))

    print(f"wrote correlations.csv, pca_projection.csv, pca_centroids.csv, "
          f"emotion_baselines.txt to {out}")
    return 0


def cmd_evaluate(args) -> int:
    run = _load_run_config(Path(args.config), args.data, args.out)
    dataset = pipeline.load_dataset(run.data_root, window=run.window, rate=run.rate)
    configs = [ModelConfig(family=f, rng_seed=run.seed) for f in run.models]
    result = run_experiment(dataset, configs, global_seed=run.seed, jobs=args.jobs)

    out = Path(run.out_dir)
    r2_text = render_metric_table(result.table, "r2")
    mse_text = render_metric_table(result.table, "mse")
    _write(out / "results.csv", results_csv(result.rows))
    _write(out / "r2_table.txt", r2_text)
    _write(out / "mse_table.txt", mse_text)

    print(r2_text)
    print(mse_text)
    print(render_exclusions(result.table), end="")
    print(f"wrote results.csv, r2_table.txt, mse_table.txt to {out}")
    return 0


def cmd_report(args) -> int:
    rows = []
    lines = Path(args.results).read_text(encoding="utf-8").splitlines()
    if not lines or lines[0] != "model,emotion,fold,participant,r2,mse":
        print(f"error: {args.results} is not a results.csv file", file=sys.stderr)
        return 1
    for line in lines[1:]:
        family, emotion, fold, participant, r2_val, mse_val = line.split(",")
        rows.append((family, emotion, int(fold), participant, float(r2_val), float(mse_val)))

    families = tuple(dict.fromkeys(r[0] for r in rows))
    folds = sorted({r[2] for r in rows})
    mean_r2, mean_mse, excluded = {}, {}, {}
    for family in families:
        for emotion in REPORT_EMOTIONS:
            r2s = np.array([r[4] for r in rows if r[0] == family and r[1] == emotion])
            mses = np.array([r[5] for r in rows if r[0] == family and r[1] == emotion])
            valid = ~np.isnan(r2s)
            excluded[(family, emotion)] = int(np.count_nonzero(~valid))
            mean_r2[(family, emotion)] = float(r2s[valid].mean()) if valid.any() else float("nan")
            mean_mse[(family, emotion)] = float(mses.mean())
    table = ResultTable(
        families=families,
        emotions=REPORT_EMOTIONS,
        mean_r2=mean_r2,
        mean_mse=mean_mse,
        fold_count=len(folds),
        excluded=excluded,
    )
    r2_text = render_metric_table(table, "r2")
    mse_text = render_metric_table(table, "mse")
    print(r2_text)
    print(mse_text)
    print(render_exclusions(table), end="")
    if args.out:
        _write(Path(args.out) / "r2_table.txt", r2_text)
        _write(Path(args.out) / "mse_table.txt", mse_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="emowear",
        description="Emotion-intensity regression pipeline for wearable sensor data.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a deterministic synthetic dataset")
    p.add_argument("--out", required=True, help="output dataset root")
    p.add_argument("--participants", type=int, default=39)
    p.add_argument("--rate", type=float, default=4.0, help="sample rate in Hz")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--link", choices=("linear", "nonlinear"), default="linear",
                   help="how emotion intensity derives from the channels")
    p.add_argument("--noise", type=float, default=0.0, help="label noise std")
    p.add_argument("--prestress-minutes", type=float, default=20.0)
    p.add_argument("--stress-minutes", type=float, default=20.0)
    p.add_argument("--recovery-minutes", type=float, default=40.0)
    p.add_argument("--preset", choices=sorted(_SYNTH_PRESETS),
                   help="use a frozen spec, ignoring the other flags")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("ingest-check", help="validate every session in a dataset")
    p.add_argument("--data", default=os.environ.get(DATA_ROOT_ENV), required=False)
    p.add_argument("--rate", type=float, default=4.0)
    p.set_defaults(func=cmd_ingest_check)

    p = sub.add_parser("analyze", help="write correlation, PCA, and baseline artifacts")
    p.add_argument("--data", default=os.environ.get(DATA_ROOT_ENV), required=False)
    p.add_argument("--out", required=True)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--rate", type=float, default=4.0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("evaluate", help="run the LOSO experiment from a config file")
    p.add_argument("--config", required=True, help="key=value experiment definition")
    p.add_argument("--jobs", type=int, default=1, help="parallel fold workers")
    p.add_argument("--data", help="override the config's data root")
    p.add_argument("--out", help="override the config's output directory")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("report", help="re-render tables from a results.csv")
    p.add_argument("--results", required=True)
    p.add_argument("--out", help="also write the tables to this directory")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "data", "skip") in (None, ""):
        parser.error(f"--data is required (or set ${DATA_ROOT_ENV})")
    try:
        return args.func(args)
    except ValueError as exc:
        parser.error(str(exc))  # exits 2
    except EmowearError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

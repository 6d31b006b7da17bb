"""Leave-one-subject-out evaluation harness.

Every participant is held out exactly once; per fold, feature z-scoring
and target min-max scaling are fitted on the training subjects only, one
single-output regressor is trained per (model family, emotion), and the
fold's r-squared and MSE are recorded. Tables report the arithmetic mean
over folds. Folds whose held-out subject has zero target variance get
r2 = NaN and are excluded from the r-squared mean (the exclusion count is
reported).

Fold jobs are independent; per-fold seeds derive from (global seed,
family, emotion, participant id) by hashing, so results do not depend on
worker count or execution order.
"""

from __future__ import annotations

import hashlib
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import EmowearError, FoldError, LengthMismatch, TooFewParticipants, ZeroVariance
from .labels import TARGET_EMOTIONS, TargetScaling, apply_target_scaling, fit_target_scaling
from .models import DISPLAY_NAMES, ModelConfig, TrainedModel, fit as fit_model, predict
from .pipeline import ParticipantData
from .preprocess import FeatureMatrix, NormStats, apply_zscore, fit_zscore

# Emotion column order in reports follows the published tables.
REPORT_EMOTIONS = ("Negative", "Neutral", "Positive")


def r2_score(y, yhat) -> float:
    """Coefficient of determination: 1 - SS_res / SS_tot."""
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape:
        raise LengthMismatch(f"y has shape {y.shape}, yhat has {yhat.shape}")
    if y.size < 2:
        raise LengthMismatch("need at least 2 samples")
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise ZeroVariance("all target values are equal")
    ss_res = float(np.sum((y - yhat) ** 2))
    return 1.0 - ss_res / ss_tot


def mse(y, yhat) -> float:
    """Mean squared prediction error."""
    y = np.asarray(y, dtype=np.float64)
    yhat = np.asarray(yhat, dtype=np.float64)
    if y.shape != yhat.shape:
        raise LengthMismatch(f"y has shape {y.shape}, yhat has {yhat.shape}")
    if y.size < 1:
        raise LengthMismatch("need at least 1 sample")
    return float(np.mean((y - yhat) ** 2))


def loso_split(participant_ids) -> list[tuple[tuple[str, ...], str]]:
    """One (train ids, test id) fold per participant, ordered by id."""
    ids = sorted(participant_ids)
    if len(ids) != len(set(ids)):
        raise ValueError("duplicate participant ids")
    if len(ids) < 2:
        raise TooFewParticipants(f"need at least 2 participants, got {len(ids)}")
    return [(tuple(i for i in ids if i != held_out), held_out) for held_out in ids]


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from arbitrary labeled parts (hash based, not
    PYTHONHASHSEED dependent)."""
    digest = hashlib.sha256("|".join(str(p) for p in parts).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


@dataclass(frozen=True)
class FoldArtifacts:
    """Everything fitted on one fold's training subjects."""

    held_out: str
    norm_stats: NormStats
    target_scaling: TargetScaling
    models: dict[tuple[str, str], TrainedModel]  # (family, emotion) -> model
    x_train: np.ndarray
    y_train: np.ndarray  # n x 3, scaled targets


@dataclass(frozen=True)
class FoldResult:
    """Per-fold metrics for one model family."""

    held_out_participant: str
    family: str
    r2: dict[str, float]  # per emotion; NaN when test variance is zero
    mse: dict[str, float]
    wall_time: float


@dataclass
class ResultTable:
    """Fold-mean r-squared and MSE per (family, emotion)."""

    families: tuple[str, ...]
    emotions: tuple[str, ...]
    mean_r2: dict[tuple[str, str], float]
    mean_mse: dict[tuple[str, str], float]
    fold_count: int
    excluded: dict[tuple[str, str], int] = field(default_factory=dict)


@dataclass(frozen=True)
class ExperimentResult:
    table: ResultTable
    fold_results: list[FoldResult]
    rows: list[tuple]  # (family, emotion, fold, participant, r2, mse)


def fit_fold(
    train_parts: list[ParticipantData],
    configs: list[ModelConfig],
    global_seed: int,
    held_out: str,
) -> FoldArtifacts:
    """Fit normalization, target scaling, and all models on training
    subjects only. Nothing here reads the held-out participant."""
    parts = sorted(train_parts, key=lambda p: p.participant_id)
    feature_names = parts[0].feature_names
    x_raw = np.vstack([p.features for p in parts])
    t_raw = np.vstack([p.targets for p in parts])

    norm = fit_zscore(FeatureMatrix(x_raw, feature_names))
    x_train = apply_zscore(FeatureMatrix(x_raw, feature_names), norm).values
    scaling = fit_target_scaling(t_raw)
    y_train = apply_target_scaling(t_raw, scaling)

    models: dict[tuple[str, str], TrainedModel] = {}
    for config in configs:
        for ei, emotion in enumerate(TARGET_EMOTIONS):
            seed = derive_seed(global_seed, config.family, emotion, held_out)
            cfg = ModelConfig(family=config.family, params=dict(config.params), rng_seed=seed)
            models[(config.family, emotion)] = fit_model(cfg, x_train, y_train[:, ei])
    return FoldArtifacts(
        held_out=held_out,
        norm_stats=norm,
        target_scaling=scaling,
        models=models,
        x_train=x_train,
        y_train=y_train,
    )


def evaluate_fold(
    artifacts: FoldArtifacts,
    test_part: ParticipantData,
    configs: list[ModelConfig],
) -> list[FoldResult]:
    """Score every configured family on the held-out participant."""
    x_test = apply_zscore(
        FeatureMatrix(test_part.features, test_part.feature_names), artifacts.norm_stats
    ).values
    y_test = apply_target_scaling(test_part.targets, artifacts.target_scaling)

    results = []
    for config in configs:
        start = time.perf_counter()
        r2_by, mse_by = {}, {}
        for ei, emotion in enumerate(TARGET_EMOTIONS):
            model = artifacts.models[(config.family, emotion)]
            pred = predict(model, x_test)
            truth = y_test[:, ei]
            mse_by[emotion] = mse(truth, pred)
            try:
                r2_by[emotion] = r2_score(truth, pred)
            except ZeroVariance:
                r2_by[emotion] = float("nan")
        results.append(
            FoldResult(
                held_out_participant=test_part.participant_id,
                family=config.family,
                r2=r2_by,
                mse=mse_by,
                wall_time=time.perf_counter() - start,
            )
        )
    return results


def _run_one_fold(args) -> list[FoldResult]:
    dataset, configs, global_seed, held_out = args
    train_parts = [p for p in dataset if p.participant_id != held_out]
    test_part = next(p for p in dataset if p.participant_id == held_out)
    try:
        artifacts = fit_fold(train_parts, configs, global_seed, held_out)
        return evaluate_fold(artifacts, test_part, configs)
    except EmowearError as exc:
        raise FoldError(f"fold {held_out}: {exc}") from exc


def run_experiment(
    dataset: list[ParticipantData],
    configs: list[ModelConfig],
    global_seed: int = 0,
    jobs: int = 1,
) -> ExperimentResult:
    """Run the full LOSO experiment; deterministic for a given seed
    regardless of the worker count."""
    ids = [p.participant_id for p in dataset]
    folds = loso_split(ids)
    tasks = [(dataset, configs, global_seed, held_out) for _, held_out in folds]

    if jobs <= 1:
        per_fold = [_run_one_fold(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            per_fold = list(pool.map(_run_one_fold, tasks))

    fold_results = [r for fold in per_fold for r in fold]
    families = tuple(c.family for c in configs)
    fold_index = {held_out: i for i, (_, held_out) in enumerate(folds)}

    rows = []
    for result in fold_results:
        for emotion in TARGET_EMOTIONS:
            rows.append(
                (
                    result.family,
                    emotion,
                    fold_index[result.held_out_participant],
                    result.held_out_participant,
                    result.r2[emotion],
                    result.mse[emotion],
                )
            )
    rows.sort(key=lambda r: (families.index(r[0]), TARGET_EMOTIONS.index(r[1]), r[2]))

    mean_r2, mean_mse, excluded = {}, {}, {}
    for family in families:
        for emotion in TARGET_EMOTIONS:
            r2s = np.array(
                [r.r2[emotion] for r in fold_results if r.family == family]
            )
            mses = np.array(
                [r.mse[emotion] for r in fold_results if r.family == family]
            )
            valid = ~np.isnan(r2s)
            excluded[(family, emotion)] = int(np.count_nonzero(~valid))
            mean_r2[(family, emotion)] = float(r2s[valid].mean()) if valid.any() else float("nan")
            mean_mse[(family, emotion)] = float(mses.mean())

    table = ResultTable(
        families=families,
        emotions=TARGET_EMOTIONS,
        mean_r2=mean_r2,
        mean_mse=mean_mse,
        fold_count=len(folds),
        excluded=excluded,
    )
    return ExperimentResult(table=table, fold_results=fold_results, rows=rows)


def render_metric_table(table: ResultTable, metric: str) -> str:
    """Aligned text table, models by rows and emotions by columns."""
    title = {
        "r2": f"r^2 scores by model (LOSO (leave-one-subject-out) mean over "
              f"{table.fold_count} folds; higher is better)",
        "mse": f"MSE by model (LOSO (leave-one-subject-out) mean over "
               f"{table.fold_count} folds; lower is better)",
    }[metric]
    source = table.mean_r2 if metric == "r2" else table.mean_mse
    width = max(len(DISPLAY_NAMES.get(f, f)) for f in table.families) + 2

    lines = [title, ""]
    header = f"{'ML Model':<{width}}" + "".join(f"{e:>12}" for e in REPORT_EMOTIONS)
    lines.append(header)
    lines.append("-" * len(header))
    for family in table.families:
        name = DISPLAY_NAMES.get(family, family)
        cells = "".join(f"{source[(family, e)]:>12.4f}" for e in REPORT_EMOTIONS)
        lines.append(f"{name:<{width}}" + cells)
    return "\n".join(lines) + "\n"


def render_exclusions(table: ResultTable) -> str:
    """Human-readable exclusion counts (zero-variance test folds)."""
    hit = {k: v for k, v in table.excluded.items() if v}
    if not hit:
        return "excluded folds (zero test-target variance): none\n"
    lines = ["excluded folds (zero test-target variance):"]
    for (family, emotion), count in sorted(hit.items()):
        lines.append(f"  {family}/{emotion}: {count}")
    return "\n".join(lines) + "\n"


def results_csv(rows) -> str:
    """Machine-readable rows: model,emotion,fold,participant,r2,mse."""
    lines = ["model,emotion,fold,participant,r2,mse"]
    for family, emotion, fold, participant, r2_val, mse_val in rows:
        lines.append(f"{family},{emotion},{fold},{participant},{r2_val!r},{mse_val!r}")
    return "\n".join(lines) + "\n"

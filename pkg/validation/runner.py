"""
validation/runner.py

Cross-validation harness for the classifier comparison and the
untested-attribute regression study.

Execution:
    Folds run serially or on a thread pool (jobs > 1). Results are always
    reduced in fold order, so both paths give identical reports.

Timing:
    Wall-clock build times are only recorded when `timing` is on; otherwise
    build_time_s is None and repeated runs serialise identically.
"""

import logging
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from classifiers import ClassifierSpec, get_classifier, predict_classes
from regressors import RegressorSpec, get_regressor, predict_values
from regressors.linear_model import resolve_target, target_vector
from soil_errors import FoldError, SoilToolkitError, UnlabeledDataset
from soil_schema import ATTRIBUTES, CLASS_LABELS, N_CLASSES, Dataset
from validation.folds import k_fold, stratified_k_fold, training_indices
from validation.metrics import (
    ConfusionMatrix,
    accuracy,
    correlation_coefficient,
    error_rate,
    mae_classification,
    mean_absolute_error,
    relative_absolute_error,
    root_mean_squared_error,
    root_relative_squared_error,
    tpr_fpr,
    weighted_rates,
)

logger = logging.getLogger(__name__)

DEFAULT_FOLDS = 10
DEFAULT_SEED = 42
REPORT_SCHEMA_VERSION = 1


# =============================================================================
# REPORTS
# =============================================================================

@dataclass(frozen=True)
class EvaluationReport:
    algorithm: str
    display_name: str
    k: int
    seed: int
    total: int
    correct: int
    incorrect: int
    accuracy: float
    error_rate: float
    mae: float
    weighted_tpr: float
    weighted_fpr: float
    per_class: tuple
    confusion: tuple
    undefined_rates: tuple
    build_time_s: Optional[float] = None

    kind = "classification"

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["per_class"] = [dict(rates) for rates in self.per_class]
        payload["confusion"] = [list(row) for row in self.confusion]
        payload["undefined_rates"] = list(self.undefined_rates)
        return payload


@dataclass(frozen=True)
class RegressionReport:
    algorithm: str
    display_name: str
    target: str
    k: int
    seed: int
    correlation: float
    rae_percent: float
    mae: float
    rmse: float
    rrse_percent: float
    retained: tuple
    coefficients: tuple
    intercept: float
    pairs: tuple
    build_time_s: Optional[float] = None

    kind = "regression"

    def to_dict(self) -> dict:
        payload = asdict(self)
        payload["retained"] = list(self.retained)
        payload["coefficients"] = list(self.coefficients)
        payload["pairs"] = [list(pair) for pair in self.pairs]
        return payload


Report = Union[EvaluationReport, RegressionReport]


# =============================================================================
# FOLD EXECUTION
# =============================================================================

def _run_folds(task: Callable[[int], tuple], k: int, jobs: int) -> list[tuple]:
    """Run task(fold) for every fold; results come back in fold order."""
    if jobs <= 1:
        return [task(fold) for fold in range(k)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(task, range(k)))


def _guarded(fold: int, work: Callable[[], tuple]) -> tuple:
    try:
        return work()
    except SoilToolkitError as exc:
        raise FoldError(fold, exc) from exc
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise FoldError(fold, exc) from exc


# =============================================================================
# CLASSIFICATION
# =============================================================================

def cross_validate_classifier(
    trainer: Union[str, ClassifierSpec],
    d: Dataset,
    k: int = DEFAULT_FOLDS,
    seed: int = DEFAULT_SEED,
    params: Optional[dict] = None,
    jobs: int = 1,
    timing: bool = False,
) -> EvaluationReport:
    """
    Stratified k-fold evaluation of one classifier.

    Each fold trains on its complement and predicts its own rows; confusion
    counts and MAE are accumulated over all N out-of-fold predictions.

    Raises:
        UnlabeledDataset, BadK, FoldError (trainer failure, with fold index).
    """
    spec = get_classifier(trainer) if isinstance(trainer, str) else trainer
    if d.labels is None:
        raise UnlabeledDataset()
    folds = stratified_k_fold(d, k, seed)
    merged = {**spec.default_params, **(params or {})}
    X = np.asarray(d.values)

    def task(fold: int) -> tuple:
        def work():
            train = d.subset(training_indices(folds, fold))
            start = time.perf_counter()
            model = spec.train(train, merged)
            elapsed = time.perf_counter() - start
            logger.debug("%s fold %d: trained on %d rows in %.3f s", spec.name, fold, len(train), elapsed)
            return spec.predict_proba(model, X[folds[fold]]), elapsed
        return _guarded(fold, work)

    results = _run_folds(task, k, jobs)

    probabilities = np.zeros((len(d), N_CLASSES), dtype=float)
    for fold, (probs, _) in enumerate(results):
        probabilities[folds[fold]] = probs
    predicted = predict_classes(probabilities)
    matrix = ConfusionMatrix.from_predictions(d.y, predicted)

    per_class = tuple(tpr_fpr(matrix, level) for level in range(N_CLASSES))
    undefined = tuple(
        f"{CLASS_LABELS[level]}:{rate}"
        for level, rates in enumerate(per_class)
        for rate in ("tpr", "fpr")
        if not rates[f"{rate}_defined"]
    )
    if undefined:
        logger.warning("%s: rates with a zero denominator reported as 0: %s", spec.display_name, ", ".join(undefined))
    w_tpr, w_fpr = weighted_rates(matrix)
    build_time = None
    if timing:
        build_time = round(float(np.mean([elapsed for _, elapsed in results])), 3)

    report = EvaluationReport(
        algorithm=spec.name,
        display_name=spec.display_name,
        k=int(k),
        seed=int(seed),
        total=matrix.total,
        correct=matrix.correct,
        incorrect=matrix.total - matrix.correct,
        accuracy=float(accuracy(matrix)),
        error_rate=float(error_rate(matrix)),
        mae=mae_classification(probabilities, d.y),
        weighted_tpr=w_tpr,
        weighted_fpr=w_fpr,
        per_class=tuple(
            {"tpr": float(r["tpr"]), "fpr": float(r["fpr"])} for r in per_class
        ),
        confusion=tuple(tuple(row) for row in matrix.to_list()),
        undefined_rates=undefined,
        build_time_s=build_time,
    )
    logger.info("%s: accuracy %.4f over %d folds (seed %d)", spec.display_name, report.accuracy, k, seed)
    return report


# =============================================================================
# REGRESSION
# =============================================================================

def cross_validate_regressor(
    fitter: Union[str, RegressorSpec],
    d: Dataset,
    target: str = "P",
    k: int = DEFAULT_FOLDS,
    seed: int = DEFAULT_SEED,
    params: Optional[dict] = None,
    jobs: int = 1,
    timing: bool = False,
) -> RegressionReport:
    """
    k-fold evaluation of one regressor predicting `target`.

    Out-of-fold predictions are pooled in dataset order. RAE and RRSE use each
    fold's training mean as the baseline, pooling numerators and denominators.
    One extra fit on the full dataset supplies the model summary and, when
    timing is on, build_time_s.
    """
    spec = get_regressor(fitter) if isinstance(fitter, str) else fitter
    target = resolve_target(target)
    y = target_vector(d, target)
    folds = k_fold(len(d), k, seed)
    merged = {**spec.default_params, **(params or {})}
    X = np.asarray(d.values)

    def task(fold: int) -> tuple:
        def work():
            train_rows = training_indices(folds, fold)
            model = spec.fit(d.subset(train_rows), target, merged)
            return predict_values(model, X[folds[fold]]), float(y[train_rows].mean())
        return _guarded(fold, work)

    results = _run_folds(task, k, jobs)

    predicted = np.empty(len(d), dtype=float)
    baselines = np.empty(len(d), dtype=float)
    for fold, (values, baseline) in enumerate(results):
        predicted[folds[fold]] = values
        baselines[folds[fold]] = baseline

    full = spec.fit(d, target, merged)
    report = RegressionReport(
        algorithm=spec.name,
        display_name=spec.display_name,
        target=target,
        k=int(k),
        seed=int(seed),
        correlation=correlation_coefficient(predicted, y),
        rae_percent=relative_absolute_error(predicted, y, baselines),
        mae=mean_absolute_error(predicted, y),
        rmse=root_mean_squared_error(predicted, y),
        rrse_percent=root_relative_squared_error(predicted, y, baselines),
        retained=full.retained,
        coefficients=full.coefficients,
        intercept=full.intercept,
        pairs=tuple((float(a), float(p)) for a, p in zip(y, predicted)),
        build_time_s=full.fit_meta.build_time_s if timing else None,
    )
    logger.info(
        "%s -> %s: r=%.4f RAE=%.2f%%", spec.display_name, target, report.correlation, report.rae_percent
    )
    return report


def rank_predictable_attributes(
    d: Dataset,
    fitter: Union[str, RegressorSpec] = "ols",
    k: int = DEFAULT_FOLDS,
    seed: int = DEFAULT_SEED,
    params: Optional[dict] = None,
    jobs: int = 1,
    targets: Optional[Sequence[str]] = None,
) -> list[RegressionReport]:
    """Cross-validate every attribute as the target; most predictable first."""
    reports = []
    for target in targets or ATTRIBUTES:
        try:
            reports.append(cross_validate_regressor(fitter, d, target, k, seed, params, jobs))
        except SoilToolkitError as exc:
            logger.warning("Skipping %s as a target: %s", target, exc)
    order = {name: i for i, name in enumerate(ATTRIBUTES)}
    return sorted(reports, key=lambda r: (-r.correlation, order[r.target]))

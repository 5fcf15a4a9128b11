"""
validation/metrics.py

Classification and regression scores computed from out-of-fold predictions.

Conventions:
    - ConfusionMatrix rows are actual classes, columns predicted classes.
    - One-vs-rest rates with a zero denominator are reported as 0 and
      flagged as undefined.
    - error_rate = 1 - accuracy.
    - Classification MAE is the mean over instances of
      (1/6) * sum_c |p_c - 1{c = truth}|.
    - Every function returns plain Python numbers.
"""

import math
from dataclasses import dataclass
from typing import Sequence, TypedDict, Union

import numpy as np

from classifiers.distribution import ClassDistribution
from soil_errors import DegenerateBaseline, EmptyMatrix, LengthMismatch, ZeroVariance
from soil_schema import N_CLASSES, FertilityClass


# =============================================================================
# CONFUSION MATRIX
# =============================================================================

@dataclass(frozen=True, eq=False)
class ConfusionMatrix:
    counts: np.ndarray

    def __post_init__(self):
        counts = np.array(self.counts, dtype=np.int64)
        if counts.shape != (N_CLASSES, N_CLASSES) or np.any(counts < 0):
            raise ValueError("confusion matrix must be 6 x 6 with non-negative counts")
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def from_predictions(cls, actual: Sequence[int], predicted: Sequence[int]) -> "ConfusionMatrix":
        actual = np.asarray(actual, dtype=np.int64)
        predicted = np.asarray(predicted, dtype=np.int64)
        if actual.shape != predicted.shape:
            raise LengthMismatch(actual.size, predicted.size)
        counts = np.zeros((N_CLASSES, N_CLASSES), dtype=np.int64)
        np.add.at(counts, (actual, predicted), 1)
        return cls(counts)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ConfusionMatrix):
            return NotImplemented
        return np.array_equal(self.counts, other.counts)

    __hash__ = None

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def correct(self) -> int:
        return int(np.trace(self.counts))

    def support(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    def to_list(self) -> list[list[int]]:
        return [[int(v) for v in row] for row in self.counts]


def accuracy(c: ConfusionMatrix) -> float:
    if c.total == 0:
        raise EmptyMatrix()
    return c.correct / c.total


def error_rate(c: ConfusionMatrix) -> float:
    return 1.0 - accuracy(c)


# =============================================================================
# RATES
# =============================================================================

class ClassRates(TypedDict):
    tpr: float
    fpr: float
    tpr_defined: bool
    fpr_defined: bool


def tpr_fpr(c: ConfusionMatrix, cls: Union[FertilityClass, int]) -> ClassRates:
    level = int(cls)
    tp = int(c.counts[level, level])
    fn = int(c.counts[level].sum()) - tp
    fp = int(c.counts[:, level].sum()) - tp
    tn = c.total - tp - fn - fp
    return {
        "tpr": tp / (tp + fn) if tp + fn > 0 else 0.0,
        "fpr": fp / (fp + tn) if fp + tn > 0 else 0.0,
        "tpr_defined": tp + fn > 0,
        "fpr_defined": fp + tn > 0,
    }


def weighted_rates(c: ConfusionMatrix) -> tuple[float, float]:
    """Per-class TPR and FPR averaged with the actual class support as weights."""
    if c.total == 0:
        raise EmptyMatrix()
    support = c.support()
    tpr = sum(support[level] * tpr_fpr(c, level)["tpr"] for level in range(N_CLASSES))
    fpr = sum(support[level] * tpr_fpr(c, level)["fpr"] for level in range(N_CLASSES))
    return float(tpr / c.total), float(fpr / c.total)


# =============================================================================
# PROBABILISTIC ERROR
# =============================================================================

def mae_classification(
    predictions: Union[np.ndarray, Sequence[ClassDistribution]],
    truth: Sequence[Union[FertilityClass, int]],
) -> float:
    if not isinstance(predictions, np.ndarray):
        predictions = np.array([p.as_array() for p in predictions], dtype=float).reshape(-1, N_CLASSES)
    truth = np.asarray([int(t) for t in truth], dtype=np.int64)
    if predictions.shape[0] != truth.shape[0] or truth.shape[0] == 0:
        raise LengthMismatch(predictions.shape[0], truth.shape[0])
    onehot = np.zeros_like(predictions, dtype=float)
    onehot[np.arange(truth.shape[0]), truth] = 1.0
    return float(np.abs(predictions - onehot).sum(axis=1).mean() / N_CLASSES)


# =============================================================================
# REGRESSION
# =============================================================================

def _paired(pred, actual) -> tuple[np.ndarray, np.ndarray]:
    pred = np.asarray(pred, dtype=float)
    actual = np.asarray(actual, dtype=float)
    if pred.shape != actual.shape or pred.ndim != 1 or pred.size == 0:
        raise LengthMismatch(pred.size, actual.size)
    return pred, actual


def correlation_coefficient(pred: Sequence[float], actual: Sequence[float]) -> float:
    """Sample Pearson r."""
    pred, actual = _paired(pred, actual)
    if pred.size < 2:
        raise LengthMismatch(pred.size, actual.size)
    dp = pred - pred.mean()
    da = actual - actual.mean()
    sp = float(dp @ dp)
    sa = float(da @ da)
    if sp == 0:
        raise ZeroVariance("pred")
    if sa == 0:
        raise ZeroVariance("actual")
    return float(np.clip((dp @ da) / math.sqrt(sp * sa), -1.0, 1.0))


def relative_absolute_error(
    pred: Sequence[float],
    actual: Sequence[float],
    baseline_mean: Union[float, Sequence[float]],
) -> float:
    """
    100 * sum|pred - actual| / sum|actual - baseline|, in percent.

    `baseline_mean` may be one number or one value per instance (the
    training-fold mean of each instance's fold).
    """
    pred, actual = _paired(pred, actual)
    baseline = np.broadcast_to(np.asarray(baseline_mean, dtype=float), actual.shape)
    denominator = float(np.abs(actual - baseline).sum())
    if denominator == 0:
        raise DegenerateBaseline()
    return float(100.0 * np.abs(pred - actual).sum() / denominator)


def root_relative_squared_error(
    pred: Sequence[float],
    actual: Sequence[float],
    baseline_mean: Union[float, Sequence[float]],
) -> float:
    pred, actual = _paired(pred, actual)
    baseline = np.broadcast_to(np.asarray(baseline_mean, dtype=float), actual.shape)
    denominator = float(((actual - baseline) ** 2).sum())
    if denominator == 0:
        raise DegenerateBaseline()
    return float(100.0 * math.sqrt(((pred - actual) ** 2).sum() / denominator))


def mean_absolute_error(pred: Sequence[float], actual: Sequence[float]) -> float:
    pred, actual = _paired(pred, actual)
    return float(np.abs(pred - actual).mean())


def root_mean_squared_error(pred: Sequence[float], actual: Sequence[float]) -> float:
    pred, actual = _paired(pred, actual)
    return float(math.sqrt(((pred - actual) ** 2).mean()))

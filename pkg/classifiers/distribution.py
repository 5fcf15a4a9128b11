"""
Class distributions over the six fertility levels.

Every classifier returns one of these per sample; rows of the batch form
(N x 6 arrays) follow the same contract: non-negative, summing to 1.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from soil_schema import N_CLASSES, FertilityClass

SUM_TOLERANCE = 1e-12


@dataclass(frozen=True)
class ClassDistribution:
    probabilities: tuple[float, ...]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        if len(probs) != N_CLASSES:
            raise ValueError(f"need {N_CLASSES} probabilities, got {len(probs)}")
        if any(p < 0 or not np.isfinite(p) for p in probs):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(sum(probs) - 1.0) > SUM_TOLERANCE:
            raise ValueError(f"probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "ClassDistribution":
        return cls(tuple(normalize(np.asarray(values, dtype=float))))

    def as_array(self) -> np.ndarray:
        return np.array(self.probabilities, dtype=float)

    def __getitem__(self, level: FertilityClass) -> float:
        return self.probabilities[int(level)]

    def predicted_class(self) -> FertilityClass:
        return predict_class(self)


def normalize(weights: np.ndarray) -> np.ndarray:
    """Scale non-negative weights (1-D or per row) to sum to 1."""
    weights = np.asarray(weights, dtype=float)
    total = weights.sum(axis=-1, keepdims=True)
    return weights / total


def laplace(counts: np.ndarray) -> np.ndarray:
    """(count + 1) / (total + 6) per class."""
    counts = np.asarray(counts, dtype=float)
    return (counts + 1.0) / (counts.sum() + N_CLASSES)


def predict_class(distribution) -> FertilityClass:
    """Argmax; ties go to the lower level."""
    values = distribution.as_array() if isinstance(distribution, ClassDistribution) else np.asarray(distribution)
    return FertilityClass(int(np.argmax(values)))


def predict_classes(probabilities: np.ndarray) -> np.ndarray:
    return np.argmax(np.asarray(probabilities), axis=1)

"""Majority-class (ZeroR) baseline: every sample gets the Laplace-smoothed training distribution."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from classifiers.distribution import ClassDistribution, laplace
from soil_errors import EmptyDataset, InvalidModel, UnlabeledDataset
from soil_schema import ATTRIBUTES, N_CLASSES, Dataset, SoilSample


@dataclass(frozen=True)
class MajorityModel:
    class_counts: tuple[int, ...]

    def distribution(self) -> np.ndarray:
        return laplace(np.asarray(self.class_counts, dtype=float))


def train_majority(d: Dataset, params: Optional[dict] = None) -> MajorityModel:
    if d.labels is None:
        raise UnlabeledDataset()
    if len(d) == 0:
        raise EmptyDataset()
    return MajorityModel(tuple(int(c) for c in np.bincount(d.y, minlength=N_CLASSES)))


def majority_predict_proba(m: MajorityModel, X: np.ndarray) -> np.ndarray:
    rows = np.asarray(X, dtype=float).reshape(-1, len(ATTRIBUTES)).shape[0]
    return np.tile(m.distribution(), (rows, 1))


def majority_predict(m: MajorityModel, s: SoilSample) -> ClassDistribution:
    return ClassDistribution(tuple(m.distribution()))


def model_to_dict(m: MajorityModel) -> dict:
    return {"class_counts": list(m.class_counts)}


def model_from_dict(payload: dict) -> MajorityModel:
    try:
        counts = tuple(int(c) for c in payload["class_counts"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel(f"malformed majority model: {exc}") from None
    if len(counts) != N_CLASSES or any(c < 0 for c in counts):
        raise InvalidModel("majority model needs 6 non-negative class counts")
    return MajorityModel(counts)

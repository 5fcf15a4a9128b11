"""
Soil Schema - Core Data Model
=============================
Defines the soil-sample record, the six fertility levels and the Dataset
container shared by every other module.

Data Contracts (see ARCHITECTURE.md):
    - Canonical attribute order is fixed: Ph, EC, OC, P, K, Fe, Zn, Mn, Cu.
    - Ph lies in [0, 14]; every other attribute is finite and >= 0.
    - A Dataset stores its rows as a read-only (N x 9) float array; gaps are
      NaN and only exist between ingestion and imputation.
    - Labels, when present, are FertilityClass values, one per row.

All types are immutable after construction and safe to share across threads.
"""

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterator, Optional, Sequence

import numpy as np

from soil_errors import BadValue, DataError, UnlabeledDataset


# =============================================================================
# ATTRIBUTES
# =============================================================================

ATTRIBUTES: tuple[str, ...] = ("Ph", "EC", "OC", "P", "K", "Fe", "Zn", "Mn", "Cu")

ATTRIBUTE_UNITS = {
    "Ph": "pH",
    "EC": "dS/m",
    "OC": "%",
    "P": "ppm",
    "K": "ppm",
    "Fe": "ppm",
    "Zn": "ppm",
    "Mn": "ppm",
    "Cu": "ppm",
}

PH_MAX = 14.0

LABEL_COLUMN = "Fertility"

_ATTRIBUTE_LOOKUP = {name.lower(): name for name in ATTRIBUTES}


def canonical_attribute(name: str) -> Optional[str]:
    """Case-insensitive match of `name` against the canonical attribute names."""
    return _ATTRIBUTE_LOOKUP.get(str(name).strip().lower())


def attribute_index(name: str) -> int:
    canonical = canonical_attribute(name)
    if canonical is None:
        raise KeyError(f"unknown attribute '{name}'")
    return ATTRIBUTES.index(canonical)


# =============================================================================
# FERTILITY CLASS
# =============================================================================

class FertilityClass(IntEnum):
    """Six totally ordered fertility levels (VERY_LOW < ... < VERY_HIGH)."""

    VERY_LOW = 0
    LOW = 1
    MODERATE = 2
    MODERATELY_HIGH = 3
    HIGH = 4
    VERY_HIGH = 5

    @property
    def label(self) -> str:
        return _CLASS_LABELS[self]

    @classmethod
    def from_label(cls, token: str) -> "FertilityClass":
        """Parse an exact CSV class token such as 'Moderately High'."""
        stripped = str(token).strip()
        for level, text in _CLASS_LABELS.items():
            if text == stripped:
                return level
        raise ValueError(f"unknown fertility class token '{token}'")


_CLASS_LABELS = {
    FertilityClass.VERY_LOW: "Very Low",
    FertilityClass.LOW: "Low",
    FertilityClass.MODERATE: "Moderate",
    FertilityClass.MODERATELY_HIGH: "Moderately High",
    FertilityClass.HIGH: "High",
    FertilityClass.VERY_HIGH: "Very High",
}

N_CLASSES = len(FertilityClass)
CLASS_LABELS: tuple[str, ...] = tuple(level.label for level in FertilityClass)


# =============================================================================
# VALIDATION HELPERS
# =============================================================================

def check_attribute_value(name: str, value: float, row: int = 0) -> float:
    """Return `value` as float or raise BadValue if it breaks the sample invariants."""
    try:
        number = float(value)
    except (TypeError, ValueError):
        raise BadValue(row, name, value, "not a number") from None
    if not np.isfinite(number):
        raise BadValue(row, name, value, "not finite")
    if number < 0:
        raise BadValue(row, name, value, "must be >= 0")
    if name == "Ph" and number > PH_MAX:
        raise BadValue(row, name, value, f"pH must lie in [0, {PH_MAX:g}]")
    return number


# =============================================================================
# SOIL SAMPLE
# =============================================================================

@dataclass(frozen=True)
class SoilSample:
    """One laboratory record: the nine agronomic attributes in canonical order."""

    ph: float
    ec: float
    oc: float
    p: float
    k: float
    fe: float
    zn: float
    mn: float
    cu: float

    def __post_init__(self):
        for name, value in zip(ATTRIBUTES, self._raw()):
            object.__setattr__(self, name.lower(), check_attribute_value(name, value))

    def _raw(self) -> tuple:
        return (self.ph, self.ec, self.oc, self.p, self.k, self.fe, self.zn, self.mn, self.cu)

    @classmethod
    def from_values(cls, values: Sequence[float]) -> "SoilSample":
        if len(values) != len(ATTRIBUTES):
            raise DataError(f"expected {len(ATTRIBUTES)} attribute values, got {len(values)}")
        return cls(*(float(v) for v in values))

    @classmethod
    def from_mapping(cls, mapping: dict) -> "SoilSample":
        """Build from a dict keyed by attribute names (any case)."""
        values = {}
        for key, value in mapping.items():
            canonical = canonical_attribute(key)
            if canonical is not None:
                values[canonical] = value
        missing = [name for name in ATTRIBUTES if name not in values]
        if missing:
            raise DataError(f"sample is missing attributes: {', '.join(missing)}")
        return cls.from_values([values[name] for name in ATTRIBUTES])

    def get(self, attribute: str) -> float:
        return self.as_array()[attribute_index(attribute)]

    def as_array(self) -> np.ndarray:
        return np.array(self._raw(), dtype=float)

    def as_dict(self) -> dict[str, float]:
        return dict(zip(ATTRIBUTES, self._raw()))


# =============================================================================
# DATASET
# =============================================================================

@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Rows of soil samples with optional fertility labels.

    Attributes:
        values: (N x 9) float array in canonical attribute order, read-only.
                NaN marks a gap awaiting imputation.
        labels: Optional tuple of FertilityClass, same length as the rows.
        provenance: Free-text source tag (file name, generator seed, ...).
    """

    values: np.ndarray
    labels: Optional[tuple[FertilityClass, ...]] = None
    provenance: str = ""
    _codes: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float, copy=True)
        if values.ndim == 1 and values.size == 0:
            values = values.reshape(0, len(ATTRIBUTES))
        if values.ndim != 2 or values.shape[1] != len(ATTRIBUTES):
            raise DataError(f"dataset values must have shape (N, {len(ATTRIBUTES)}), got {values.shape}")

        _validate_cells(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

        if self.labels is not None:
            labels = tuple(FertilityClass(int(level)) for level in self.labels)
            if len(labels) != values.shape[0]:
                raise DataError(f"labels length {len(labels)} does not match {values.shape[0]} rows")
            codes = np.array([int(level) for level in labels], dtype=np.int64)
            codes.setflags(write=False)
            object.__setattr__(self, "labels", labels)
            object.__setattr__(self, "_codes", codes)

    # -------------------------------------------------------------------------
    # Shape and access
    # -------------------------------------------------------------------------

    def __len__(self) -> int:
        return int(self.values.shape[0])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            np.array_equal(self.values, other.values, equal_nan=True)
            and self.labels == other.labels
            and self.provenance == other.provenance
        )

    __hash__ = None

    @property
    def is_labeled(self) -> bool:
        return self.labels is not None

    @property
    def has_gaps(self) -> bool:
        return bool(np.isnan(self.values).any())

    @property
    def X(self) -> np.ndarray:
        return self.values

    @property
    def y(self) -> np.ndarray:
        """Integer class codes 0..5; raises if the dataset is unlabeled."""
        if self._codes is None:
            raise UnlabeledDataset()
        return self._codes

    def column(self, attribute: str) -> np.ndarray:
        return self.values[:, attribute_index(attribute)]

    def row(self, index: int) -> SoilSample:
        return SoilSample.from_values(self.values[index])

    @property
    def rows(self) -> Iterator[SoilSample]:
        for index in range(len(self)):
            yield self.row(index)

    # -------------------------------------------------------------------------
    # Derived datasets
    # -------------------------------------------------------------------------

    def subset(self, indices: Sequence[int]) -> "Dataset":
        index_array = np.asarray(indices, dtype=np.int64)
        labels = None
        if self.labels is not None:
            labels = tuple(self.labels[i] for i in index_array)
        return Dataset(self.values[index_array], labels, self.provenance)

    def with_labels(self, labels: Optional[Sequence[FertilityClass]]) -> "Dataset":
        return Dataset(self.values, None if labels is None else tuple(labels), self.provenance)

    def with_values(self, values: np.ndarray) -> "Dataset":
        return Dataset(values, self.labels, self.provenance)

    @classmethod
    def from_samples(
        cls,
        samples: Sequence[SoilSample],
        labels: Optional[Sequence[FertilityClass]] = None,
        provenance: str = "",
    ) -> "Dataset":
        values = np.array([s.as_array() for s in samples], dtype=float).reshape(-1, len(ATTRIBUTES))
        return cls(values, None if labels is None else tuple(labels), provenance)


def _validate_cells(values: np.ndarray) -> None:
    """Every observed (non-NaN) cell must satisfy the SoilSample invariants."""
    if values.size == 0:
        return
    observed = ~np.isnan(values)
    bad = observed & (~np.isfinite(values) | (values < 0))
    ph = ATTRIBUTES.index("Ph")
    bad[:, ph] |= observed[:, ph] & (values[:, ph] > PH_MAX)
    if bad.any():
        row, col = (int(i) for i in np.argwhere(bad)[0])
        check_attribute_value(ATTRIBUTES[col], values[row, col], row + 1)

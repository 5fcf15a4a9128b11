"""
Linear Model - Shared Prediction Contract
=========================================
Every regressor returns a LinearModel: an intercept plus one coefficient per
retained attribute, predicting a single target attribute.

    prediction = intercept + sum(coefficient_i * value_i)   over retained

The helpers here build design matrices and validate targets so the fitters
agree on preconditions and on arithmetic order.
"""

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

import numpy as np

from soil_errors import InvalidConfig, InvalidModel, NonFiniteTarget, TooFewRows
from soil_schema import ATTRIBUTES, Dataset, SoilSample, canonical_attribute

DEFAULT_TARGET = "P"


# =============================================================================
# TYPE DEFINITIONS
# =============================================================================

@dataclass(frozen=True)
class FitMeta:
    """algorithm tag, objective value, build time (seconds, ms resolution)."""

    algorithm: str
    objective: float
    build_time_s: Optional[float] = field(default=None, compare=False)


@dataclass(frozen=True)
class LinearModel:
    target: str
    retained: tuple[str, ...]
    coefficients: tuple[float, ...]
    intercept: float
    fit_meta: FitMeta

    def __post_init__(self):
        if self.target not in ATTRIBUTES:
            raise InvalidModel(f"unknown target attribute {self.target!r}")
        if len(self.retained) != len(self.coefficients):
            raise InvalidModel("one coefficient is needed per retained attribute")
        for name in self.retained:
            if name not in ATTRIBUTES or name == self.target:
                raise InvalidModel(f"retained attribute {name!r} is not a valid predictor of {self.target}")
        if not all(math.isfinite(c) for c in self.coefficients) or not math.isfinite(self.intercept):
            raise InvalidModel("coefficients and intercept must be finite")

    def coefficient_map(self) -> dict[str, float]:
        return dict(zip(self.retained, self.coefficients))


# =============================================================================
# HELPERS
# =============================================================================

def resolve_target(target: str) -> str:
    canonical = canonical_attribute(target)
    if canonical is None:
        raise InvalidConfig("target", f"unknown attribute '{target}'")
    return canonical


def candidate_attributes(target: str, attributes: Optional[Sequence[str]] = None) -> tuple[str, ...]:
    """Predictor names in canonical order: `attributes` if given, else every non-target attribute."""
    if attributes is None:
        return tuple(name for name in ATTRIBUTES if name != target)
    chosen = set()
    for name in attributes:
        canonical = canonical_attribute(name)
        if canonical is None or canonical == target:
            raise InvalidConfig("attributes", f"'{name}' is not a valid predictor of {target}")
        chosen.add(canonical)
    if not chosen:
        raise InvalidConfig("attributes", "at least one predictor is required")
    return tuple(name for name in ATTRIBUTES if name in chosen)


def target_vector(d: Dataset, target: str) -> np.ndarray:
    y = np.asarray(d.column(target), dtype=float)
    if not np.all(np.isfinite(y)):
        raise NonFiniteTarget(target)
    return y


def design_matrix(d: Dataset, attributes: Sequence[str]) -> np.ndarray:
    """(N x (p + 1)) matrix: the named columns followed by an intercept column."""
    columns = [ATTRIBUTES.index(name) for name in attributes]
    X = np.asarray(d.values, dtype=float)[:, columns]
    return np.hstack([X, np.ones((X.shape[0], 1))])


def require_rows(d: Dataset, needed: int) -> None:
    if len(d) < needed:
        raise TooFewRows(needed, len(d))


@contextmanager
def build_timer() -> Iterator[dict]:
    """Yields a dict that receives 'seconds' (rounded to ms) when the block exits."""
    box: dict = {}
    start = time.perf_counter()
    try:
        yield box
    finally:
        box["seconds"] = round(time.perf_counter() - start, 3)


def make_model(
    target: str,
    attributes: Sequence[str],
    beta: np.ndarray,
    algorithm: str,
    objective: float,
    build_time_s: Optional[float] = None,
) -> LinearModel:
    """Wrap a solution vector laid out as design_matrix columns (intercept last)."""
    return LinearModel(
        target=target,
        retained=tuple(attributes),
        coefficients=tuple(float(b) for b in beta[:-1]),
        intercept=float(beta[-1]),
        fit_meta=FitMeta(algorithm, float(objective), build_time_s),
    )


# =============================================================================
# PREDICTION
# =============================================================================

def predict_values(m: LinearModel, X: np.ndarray) -> np.ndarray:
    """Predictions for each row of an (N x 9) attribute array."""
    X = np.asarray(X, dtype=float).reshape(-1, len(ATTRIBUTES))
    total = np.full(X.shape[0], m.intercept, dtype=float)
    for name, coefficient in zip(m.retained, m.coefficients):
        total = total + coefficient * X[:, ATTRIBUTES.index(name)]
    return total


def predict_value(m: LinearModel, s: SoilSample) -> float:
    return float(predict_values(m, s.as_array())[0])


# =============================================================================
# SERIALIZATION
# =============================================================================

def model_to_dict(m: LinearModel) -> dict:
    return {
        "target": m.target,
        "retained": list(m.retained),
        "coefficients": list(m.coefficients),
        "intercept": m.intercept,
        "fit_meta": {
            "algorithm": m.fit_meta.algorithm,
            "objective": m.fit_meta.objective,
            "build_time_s": m.fit_meta.build_time_s,
        },
    }


def model_from_dict(payload: dict) -> LinearModel:
    try:
        meta = payload["fit_meta"]
        build_time = meta.get("build_time_s")
        return LinearModel(
            target=payload["target"],
            retained=tuple(payload["retained"]),
            coefficients=tuple(float(c) for c in payload["coefficients"]),
            intercept=float(payload["intercept"]),
            fit_meta=FitMeta(
                str(meta["algorithm"]),
                float(meta["objective"]),
                None if build_time is None else float(build_time),
            ),
        )
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise InvalidModel(f"malformed linear model: {exc}") from None

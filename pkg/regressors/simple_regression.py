"""Single-attribute regression and the constant-mean baseline."""

import logging
from typing import Optional, Sequence

import numpy as np

from regressors.linear_model import (
    LinearModel,
    build_timer,
    candidate_attributes,
    make_model,
    require_rows,
    resolve_target,
    target_vector,
)
from soil_errors import EmptyDataset
from soil_schema import Dataset

logger = logging.getLogger(__name__)


def line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """(slope, intercept, RSS) of the 1-D least-squares line; a constant x gives slope 0."""
    x_mean, y_mean = x.mean(), y.mean()
    sxx = float(((x - x_mean) ** 2).sum())
    slope = float(((x - x_mean) * (y - y_mean)).sum() / sxx) if sxx > 0 else 0.0
    intercept = float(y_mean - slope * x_mean)
    residuals = y - (intercept + slope * x)
    return slope, intercept, float(residuals @ residuals)


def fit_simple(
    d: Dataset,
    target: str = "P",
    attributes: Optional[Sequence[str]] = None,
) -> LinearModel:
    """Best single predictor by RSS; ties go to the earlier attribute."""
    target = resolve_target(target)
    candidates = candidate_attributes(target, attributes)
    require_rows(d, 2)
    y = target_vector(d, target)

    with build_timer() as timer:
        best = None
        for name in candidates:
            slope, intercept, rss = line_fit(np.asarray(d.column(name), dtype=float), y)
            if best is None or rss < best[3]:
                best = (name, slope, intercept, rss)

    name, slope, intercept, rss = best
    logger.debug("Simple regression picked %s (RSS %.6g)", name, rss)
    return make_model(target, [name], np.array([slope, intercept]), "simple", rss, timer["seconds"])


def fit_mean(d: Dataset, target: str = "P") -> LinearModel:
    """Predict the training mean for everything."""
    target = resolve_target(target)
    if len(d) == 0:
        raise EmptyDataset()
    y = target_vector(d, target)
    with build_timer() as timer:
        mean = float(y.mean())
        tss = float(((y - mean) ** 2).sum())
    return make_model(target, [], np.array([mean]), "mean", tss, timer["seconds"])

"""
Least Median of Squares
=======================
Elemental-subset search: every candidate model is the least-squares fit to
p + 1 rows, scored by the median of squared residuals over the whole dataset.

Search:
    - exhaustive over all C(n, p + 1) subsets when that count is at most
      exhaustive_below, in itertools.combinations order;
    - otherwise subsample_count draws of p + 1 distinct rows from
      Generator(PCG64(seed)).
    The full-data least-squares fits (all candidates, then the AIC-selected
    subset) are scored last. The first strictly lower median wins, so ties go
    to the earliest subset.

No reweighted refinement follows the search.
"""

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from regressors.least_squares import fit_ols
from regressors.linear_model import (
    LinearModel,
    build_timer,
    candidate_attributes,
    design_matrix,
    make_model,
    require_rows,
    resolve_target,
    target_vector,
)
from soil_errors import InvalidConfig
from soil_schema import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LmsConfig:
    subsample_count: int = 1000
    seed: int = 42
    exhaustive_below: int = 5000

    def __post_init__(self):
        if isinstance(self.subsample_count, bool) or not isinstance(self.subsample_count, int) or self.subsample_count < 1:
            raise InvalidConfig("subsample_count", f"must be an integer >= 1, got {self.subsample_count!r}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidConfig("seed", "must be a 64-bit unsigned integer")
        if not isinstance(self.exhaustive_below, int) or self.exhaustive_below < 0:
            raise InvalidConfig("exhaustive_below", "must be an integer >= 0")


DEFAULT_LMS_CONFIG = LmsConfig()


def elemental_subsets(n: int, size: int, cfg: LmsConfig) -> Iterator[np.ndarray]:
    if math.comb(n, size) <= cfg.exhaustive_below:
        for subset in itertools.combinations(range(n), size):
            yield np.array(subset)
        return
    rng = np.random.Generator(np.random.PCG64(cfg.seed))
    for _ in range(cfg.subsample_count):
        yield rng.choice(n, size=size, replace=False)


def least_squares_starts(d: Dataset, target: str, candidates: Sequence[str]) -> list[np.ndarray]:
    """
    Full-data least-squares fits laid out over `candidates`: all of them, then
    the AIC-selected subset with dropped attributes at zero.

    Scored after the elemental subsets so the search can never end above the
    least-squares median.
    """
    starts = []
    for select in (False, True):
        model = fit_ols(d, target, select=select, attributes=candidates)
        weights = model.coefficient_map()
        starts.append(np.array([weights.get(name, 0.0) for name in candidates] + [model.intercept]))
    return starts


def fit_lms(
    d: Dataset,
    target: str = "P",
    cfg: LmsConfig = DEFAULT_LMS_CONFIG,
    attributes: Optional[Sequence[str]] = None,
) -> LinearModel:
    target = resolve_target(target)
    candidates = candidate_attributes(target, attributes)
    size = len(candidates) + 1
    require_rows(d, size + 1)
    y = target_vector(d, target)
    A = design_matrix(d, candidates)

    with build_timer() as timer:
        best_beta = None
        best_objective = math.inf
        tried = 0
        subset_fits = (
            np.linalg.lstsq(A[subset], y[subset], rcond=None)[0]
            for subset in elemental_subsets(len(d), size, cfg)
        )
        for beta in itertools.chain(subset_fits, least_squares_starts(d, target, candidates)):
            tried += 1
            residuals = y - A @ beta
            objective = float(np.median(residuals * residuals))
            if objective < best_objective:
                best_beta, best_objective = beta, objective

    logger.debug("LMS scored %d candidate fits of size %d; best median %.6g", tried, size, best_objective)
    return make_model(target, candidates, best_beta, "lms", best_objective, timer["seconds"])

"""
Ordinary Least Squares with Akaike Backward Elimination
=======================================================
Solves min ||y - A beta||^2 by Householder QR (numpy) and a triangular
back-substitution (scipy). A near-singular R (|r_ii| < 1e-10 * max |r_ii|)
switches to a ridge solve with lambda = 1e-8 on the attribute columns.

Selection (on by default) repeatedly drops the attribute whose removal gives
the lowest AIC, as long as that AIC is strictly lower than the current one:

    AIC = n * ln(max(RSS / n, 1e-12 * TSS / n + 1e-300)) + 2 * (k + 1)

The floor keeps exact fits comparable instead of racing towards -inf.
"""

import logging
import math
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import solve_triangular

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
from soil_schema import Dataset

logger = logging.getLogger(__name__)

RANK_TOLERANCE = 1e-10
RIDGE_LAMBDA = 1e-8
RSS_FLOOR_SCALE = 1e-12


def solve_least_squares(A: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    """(beta, RSS) for the design matrix A (intercept column last)."""
    Q, R = np.linalg.qr(A)
    diagonal = np.abs(np.diag(R))
    if diagonal.size and diagonal.min() >= RANK_TOLERANCE * diagonal.max():
        beta = solve_triangular(R, Q.T @ y)
    else:
        logger.warning("Rank-deficient design (%d columns); using ridge lambda=%g", A.shape[1], RIDGE_LAMBDA)
        beta = _ridge(A, y)
    residuals = y - A @ beta
    return beta, float(residuals @ residuals)


def _ridge(A: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Augmented-row ridge solve; the intercept column is not penalised."""
    p = A.shape[1]
    penalty = math.sqrt(RIDGE_LAMBDA) * np.eye(p)[:-1]
    augmented = np.vstack([A, penalty])
    Q, R = np.linalg.qr(augmented)
    return solve_triangular(R, Q.T @ np.concatenate([y, np.zeros(p - 1)]))


def aic(rss: float, tss: float, n: int, k: int) -> float:
    variance = max(rss / n, RSS_FLOOR_SCALE * tss / n + 1e-300)
    return n * math.log(variance) + 2.0 * (k + 1)


def fit_ols(
    d: Dataset,
    target: str = "P",
    select: bool = True,
    attributes: Optional[Sequence[str]] = None,
) -> LinearModel:
    """
    Least-squares fit of `target` on the candidate attributes.

    Args:
        d: Gap-free dataset.
        target: Attribute to predict.
        select: Run greedy AIC backward elimination.
        attributes: Candidate predictors (default: the 8 non-target attributes).

    Raises:
        TooFewRows: fewer than p + 1 rows.
        NonFiniteTarget: NaN or infinite target values.
    """
    target = resolve_target(target)
    candidates = candidate_attributes(target, attributes)
    require_rows(d, len(candidates) + 1)
    y = target_vector(d, target)

    with build_timer() as timer:
        n = len(d)
        tss = float(((y - y.mean()) ** 2).sum())
        retained = list(candidates)
        beta, rss = solve_least_squares(design_matrix(d, retained), y)
        current = aic(rss, tss, n, len(retained))

        while select and retained:
            trial = None
            for name in retained:
                reduced = [a for a in retained if a != name]
                trial_beta, trial_rss = solve_least_squares(design_matrix(d, reduced), y)
                score = aic(trial_rss, tss, n, len(reduced))
                if trial is None or score < trial[0]:
                    trial = (score, name, trial_beta, trial_rss)
            if trial[0] >= current:
                break
            current, dropped, beta, rss = trial
            retained.remove(dropped)
            logger.debug("OLS dropped %s (AIC %.4f)", dropped, current)

    return make_model(target, retained, beta, "ols", rss, timer["seconds"])

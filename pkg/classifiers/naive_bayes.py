"""
Gaussian Naive Bayes
====================
Class priors with Laplace smoothing and one Gaussian per (class, attribute).

Training:
    prior_c    = (count_c + 1) / (N + 6)
    mean, var  = per-class sample mean and sample (n - 1) variance
    var floor  = 1e-9 * (global attribute variance + 1e-12)

A class seen once has no sample variance and gets the floor. A class absent
from the training data keeps its smoothed prior and is modelled with the
global attribute mean and variance.

Prediction works in log space and normalises with logsumexp.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from classifiers.distribution import ClassDistribution
from soil_errors import EmptyDataset, InvalidModel, UnlabeledDataset
from soil_schema import ATTRIBUTES, N_CLASSES, Dataset, SoilSample

logger = logging.getLogger(__name__)

VARIANCE_FLOOR_SCALE = 1e-9
VARIANCE_FLOOR_OFFSET = 1e-12


@dataclass(frozen=True, eq=False)
class NaiveBayesModel:
    """
    Attributes:
        class_priors: (6,) probabilities summing to 1.
        means: (6 x 9) per-class attribute means.
        variances: (6 x 9) per-class attribute variances, all > 0.
    """

    class_priors: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        priors = np.array(self.class_priors, dtype=float)
        means = np.array(self.means, dtype=float)
        variances = np.array(self.variances, dtype=float)
        if priors.shape != (N_CLASSES,) or means.shape != (N_CLASSES, len(ATTRIBUTES)) or variances.shape != means.shape:
            raise InvalidModel("naive Bayes arrays have the wrong shape")
        if np.any(priors < 0) or abs(priors.sum() - 1.0) > 1e-12:
            raise InvalidModel("class priors must be non-negative and sum to 1")
        if not np.all(np.isfinite(means)) or not np.all(variances > 0):
            raise InvalidModel("means must be finite and variances positive")
        for array in (priors, means, variances):
            array.setflags(write=False)
        object.__setattr__(self, "class_priors", priors)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, NaiveBayesModel):
            return NotImplemented
        return all(
            np.array_equal(a, b)
            for a, b in (
                (self.class_priors, other.class_priors),
                (self.means, other.means),
                (self.variances, other.variances),
            )
        )

    __hash__ = None


def train_naive_bayes(d: Dataset, params: Optional[dict] = None) -> NaiveBayesModel:
    if d.labels is None:
        raise UnlabeledDataset()
    if len(d) == 0:
        raise EmptyDataset()

    X = np.asarray(d.values, dtype=float)
    y = d.y
    n = len(d)
    counts = np.bincount(y, minlength=N_CLASSES)
    priors = (counts + 1.0) / (n + N_CLASSES)

    global_mean = X.mean(axis=0)
    global_var = X.var(axis=0, ddof=1) if n > 1 else np.zeros(len(ATTRIBUTES))
    floor = VARIANCE_FLOOR_SCALE * (global_var + VARIANCE_FLOOR_OFFSET)

    means = np.tile(global_mean, (N_CLASSES, 1))
    variances = np.tile(np.maximum(global_var, floor), (N_CLASSES, 1))
    for level in range(N_CLASSES):
        members = X[y == level]
        if members.shape[0] == 0:
            continue
        means[level] = members.mean(axis=0)
        if members.shape[0] > 1:
            variances[level] = np.maximum(members.var(axis=0, ddof=1), floor)
        else:
            variances[level] = floor

    logger.debug("Trained naive Bayes on %d rows, class counts %s", n, counts.tolist())
    return NaiveBayesModel(priors, means, variances)


def log_joint(m: NaiveBayesModel, X: np.ndarray) -> np.ndarray:
    """(N x 6) log prior + summed Gaussian log densities."""
    X = np.asarray(X, dtype=float).reshape(-1, len(ATTRIBUTES))
    diff = X[:, None, :] - m.means[None, :, :]
    log_density = -0.5 * (np.log(2.0 * np.pi * m.variances)[None, :, :] + diff**2 / m.variances[None, :, :])
    with np.errstate(divide="ignore"):
        log_prior = np.log(m.class_priors)
    return log_prior[None, :] + log_density.sum(axis=2)


def nb_predict_proba(m: NaiveBayesModel, X: np.ndarray) -> np.ndarray:
    joint = log_joint(m, X)
    posterior = np.exp(joint - logsumexp(joint, axis=1, keepdims=True))
    return posterior / posterior.sum(axis=1, keepdims=True)


def nb_predict(m: NaiveBayesModel, s: SoilSample) -> ClassDistribution:
    return ClassDistribution(tuple(nb_predict_proba(m, s.as_array())[0]))


def model_to_dict(m: NaiveBayesModel) -> dict:
    return {
        "class_priors": m.class_priors.tolist(),
        "means": m.means.tolist(),
        "variances": m.variances.tolist(),
    }


def model_from_dict(payload: dict) -> NaiveBayesModel:
    try:
        return NaiveBayesModel(payload["class_priors"], payload["means"], payload["variances"])
    except KeyError as exc:
        raise InvalidModel(f"naive Bayes document lacks {exc}") from None

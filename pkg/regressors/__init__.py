"""
Regressors
==========
Linear predictors for an untested soil attribute (P by default) from the
others. Every fitter is reachable through REGISTRY with one signature:

    model = spec.fit(dataset, target, params)   # -> LinearModel
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

from regressors.least_median import DEFAULT_LMS_CONFIG, LmsConfig, fit_lms
from regressors.least_squares import fit_ols
from regressors.linear_model import (
    DEFAULT_TARGET,
    FitMeta,
    LinearModel,
    model_from_dict,
    model_to_dict,
    predict_value,
    predict_values,
)
from regressors.simple_regression import fit_mean, fit_simple
from soil_errors import UsageError
from soil_schema import Dataset


@dataclass(frozen=True)
class RegressorSpec:
    name: str
    display_name: str
    fit: Callable[[Dataset, str, Optional[dict]], LinearModel]
    default_params: dict = field(default_factory=dict)


def _fit_ols(d: Dataset, target: str, params: Optional[dict] = None) -> LinearModel:
    params = params or {}
    return fit_ols(d, target, select=params.get("select", True), attributes=params.get("attributes"))


def _fit_lms(d: Dataset, target: str, params: Optional[dict] = None) -> LinearModel:
    params = dict(params or {})
    attributes = params.pop("attributes", None)
    cfg = LmsConfig(**params) if params else DEFAULT_LMS_CONFIG
    return fit_lms(d, target, cfg, attributes=attributes)


def _fit_simple(d: Dataset, target: str, params: Optional[dict] = None) -> LinearModel:
    return fit_simple(d, target, attributes=(params or {}).get("attributes"))


def _fit_mean(d: Dataset, target: str, params: Optional[dict] = None) -> LinearModel:
    return fit_mean(d, target)


REGISTRY: dict[str, RegressorSpec] = {
    "ols": RegressorSpec("ols", "Linear Regression", _fit_ols, {"select": True}),
    "lms": RegressorSpec(
        "lms",
        "Least Median Square",
        _fit_lms,
        {
            "subsample_count": DEFAULT_LMS_CONFIG.subsample_count,
            "seed": DEFAULT_LMS_CONFIG.seed,
            "exhaustive_below": DEFAULT_LMS_CONFIG.exhaustive_below,
        },
    ),
    "simple": RegressorSpec("simple", "Simple Regression", _fit_simple),
    "mean": RegressorSpec("mean", "Mean", _fit_mean),
}


def get_regressor(name: str) -> RegressorSpec:
    try:
        return REGISTRY[name.strip().lower()]
    except KeyError:
        raise UsageError(f"unknown regressor '{name}' (choose from {', '.join(REGISTRY)})") from None


__all__ = [
    "DEFAULT_TARGET",
    "REGISTRY",
    "FitMeta",
    "LinearModel",
    "LmsConfig",
    "RegressorSpec",
    "fit_lms",
    "fit_mean",
    "fit_ols",
    "fit_simple",
    "get_regressor",
    "model_from_dict",
    "model_to_dict",
    "predict_value",
    "predict_values",
]

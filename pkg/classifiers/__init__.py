"""
Classifiers
===========
From-scratch fertility-class learners behind one calling convention:

    model = spec.train(dataset, params)          # params merged over defaults
    probs = spec.predict_proba(model, X)         # (N x 6), rows sum to 1
    dist  = spec.predict(model, sample)          # ClassDistribution

REGISTRY maps the algorithm tags used by the CLI and the evaluation harness
to their ClassifierSpec.
"""

from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from classifiers import baseline, c45_tree, naive_bayes, ripper
from classifiers.distribution import ClassDistribution, predict_class, predict_classes
from soil_errors import UsageError


@dataclass(frozen=True)
class ClassifierSpec:
    name: str
    display_name: str
    train: Callable[..., Any]
    predict_proba: Callable[..., Any]
    predict: Callable[..., ClassDistribution]
    to_dict: Callable[[Any], dict]
    from_dict: Callable[[dict], Any]
    default_params: dict = field(default_factory=dict)
    render: Optional[Callable[[Any], str]] = None


REGISTRY: dict[str, ClassifierSpec] = {
    "nb": ClassifierSpec(
        name="nb",
        display_name="Naive Bayes",
        train=naive_bayes.train_naive_bayes,
        predict_proba=naive_bayes.nb_predict_proba,
        predict=naive_bayes.nb_predict,
        to_dict=naive_bayes.model_to_dict,
        from_dict=naive_bayes.model_from_dict,
    ),
    "c45": ClassifierSpec(
        name="c45",
        display_name="C4.5",
        train=c45_tree.train_c45,
        predict_proba=c45_tree.c45_predict_proba,
        predict=c45_tree.c45_predict,
        to_dict=c45_tree.model_to_dict,
        from_dict=c45_tree.model_from_dict,
        default_params=dict(c45_tree.DEFAULT_C45_PARAMS),
        render=c45_tree.tree_to_text,
    ),
    "ripper": ClassifierSpec(
        name="ripper",
        display_name="RIPPER",
        train=ripper.train_ripper,
        predict_proba=ripper.ripper_predict_proba,
        predict=ripper.ripper_predict,
        to_dict=ripper.model_to_dict,
        from_dict=ripper.model_from_dict,
        default_params=dict(ripper.DEFAULT_RIPPER_PARAMS),
        render=ripper.rules_to_text,
    ),
    "majority": ClassifierSpec(
        name="majority",
        display_name="Majority",
        train=baseline.train_majority,
        predict_proba=baseline.majority_predict_proba,
        predict=baseline.majority_predict,
        to_dict=baseline.model_to_dict,
        from_dict=baseline.model_from_dict,
    ),
}


def get_classifier(name: str) -> ClassifierSpec:
    try:
        return REGISTRY[name.strip().lower()]
    except KeyError:
        raise UsageError(f"unknown classifier '{name}' (choose from {', '.join(REGISTRY)})") from None


__all__ = [
    "REGISTRY",
    "ClassDistribution",
    "ClassifierSpec",
    "get_classifier",
    "predict_class",
    "predict_classes",
]

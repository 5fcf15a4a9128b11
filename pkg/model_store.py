"""
Model Store - Versioned JSON Persistence
========================================
Every trained model serialises to one envelope:

    {"schema": "soil-model", "version": 1, "type": "<tag>", "payload": {...}}

`type` is a classifier tag (nb, c45, ripper, majority) or "linear" for any
regressor output. Floats are written with repr precision by the json module,
so a reloaded model predicts bit-for-bit like the original.
"""

import json
import logging
from pathlib import Path
from typing import Any, Union

from classifiers import REGISTRY as CLASSIFIERS
from classifiers.baseline import MajorityModel
from classifiers.c45_tree import DecisionTree
from classifiers.naive_bayes import NaiveBayesModel
from classifiers.ripper import RuleList
from regressors import LinearModel
from regressors import model_from_dict as linear_from_dict
from regressors import model_to_dict as linear_to_dict
from soil_errors import InvalidModel

logger = logging.getLogger(__name__)

SCHEMA = "soil-model"
VERSION = 1
LINEAR_TYPE = "linear"

_TYPE_OF = {
    NaiveBayesModel: "nb",
    DecisionTree: "c45",
    RuleList: "ripper",
    MajorityModel: "majority",
    LinearModel: LINEAR_TYPE,
}


def model_type(model: Any) -> str:
    try:
        return _TYPE_OF[type(model)]
    except KeyError:
        raise InvalidModel(f"cannot serialise {type(model).__name__}") from None


def model_to_document(model: Any) -> dict:
    tag = model_type(model)
    payload = linear_to_dict(model) if tag == LINEAR_TYPE else CLASSIFIERS[tag].to_dict(model)
    return {"schema": SCHEMA, "version": VERSION, "type": tag, "payload": payload}


def model_from_document(document: Any) -> Any:
    if not isinstance(document, dict) or document.get("schema") != SCHEMA:
        raise InvalidModel("not a soil-model document")
    if document.get("version") != VERSION:
        raise InvalidModel(f"unsupported version {document.get('version')!r}")
    tag = document.get("type")
    payload = document.get("payload")
    if not isinstance(payload, dict):
        raise InvalidModel("payload must be an object")
    if tag == LINEAR_TYPE:
        return linear_from_dict(payload)
    if tag not in CLASSIFIERS:
        raise InvalidModel(f"unknown model type {tag!r}")
    return CLASSIFIERS[tag].from_dict(payload)


def dumps(model: Any) -> str:
    return json.dumps(model_to_document(model), indent=2, sort_keys=True) + "\n"


def loads(text: str) -> Any:
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidModel(f"invalid JSON at line {exc.lineno}: {exc.msg}") from None
    return model_from_document(document)


def save_model(model: Any, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(model), encoding="utf-8")
    logger.info("Saved %s model to %s", model_type(model), path)
    return path


def load_model(path: Union[str, Path]) -> Any:
    return loads(Path(path).read_text(encoding="utf-8"))

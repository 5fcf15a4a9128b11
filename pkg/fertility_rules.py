"""
Fertility Rules - Automated Soil Labeling
=========================================
Declarative rule engine that rates attributes against threshold bands,
aggregates the ratings into a fertility index and maps the index onto the
six FertilityClass levels.

Rule Semantics:
    - Each AttributeRule owns ordered bands (upper_bound, rating). A value
      selects the first band with value < upper_bound; the last bound is
      +infinity, so coverage is total.
    - index = sum(weight * rating) / sum(weight) over all rules.
    - Five ascending cuts split the index range into six classes; an index
      equal to a cut belongs to the higher class.

Rule File (JSON):
    {
      "rules": [
        {"attribute": "OC", "weight": 1.0,
         "bands": [{"below": 0.4, "rating": 0}, {"below": null, "rating": 10}]}
      ],
      "cuts": [c1, c2, c3, c4, c5]
    }
    "below": null denotes +infinity.

The shipped rules/default_rules.json is illustrative; drop in a laboratory's
own thresholds by passing another file.
"""

import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, TypedDict, Union

import numpy as np

from soil_errors import (
    BadCuts,
    BandsNotAscending,
    DuplicateAttribute,
    RuleFileError,
    RuleSyntaxError,
    UnknownAttribute,
)
from soil_schema import ATTRIBUTES, Dataset, FertilityClass, SoilSample, canonical_attribute

logger = logging.getLogger(__name__)


DEFAULT_RULES_PATH = Path(__file__).resolve().parent / "rules" / "default_rules.json"

N_CUTS = len(FertilityClass) - 1


# =============================================================================
# TYPE DEFINITIONS
# =============================================================================

@dataclass(frozen=True)
class AttributeRule:
    """Banded rating for one attribute. bands: ((upper_bound, rating), ...)."""

    attribute: str
    bands: tuple[tuple[float, float], ...]
    weight: float = 1.0

    @property
    def column(self) -> int:
        return ATTRIBUTES.index(self.attribute)

    def finite_bounds(self) -> np.ndarray:
        return np.array([bound for bound, _ in self.bands[:-1]], dtype=float)

    def ratings(self) -> np.ndarray:
        return np.array([rating for _, rating in self.bands], dtype=float)

    def rate(self, values: np.ndarray) -> np.ndarray:
        """Rating of the band holding each value (value < bound selects the band)."""
        band = np.searchsorted(self.finite_bounds(), values, side="right")
        return self.ratings()[band]


@dataclass(frozen=True)
class RuleSet:
    rules: tuple[AttributeRule, ...]
    class_cuts: tuple[float, ...]

    @property
    def total_weight(self) -> float:
        return float(sum(rule.weight for rule in self.rules))

    def attributes(self) -> tuple[str, ...]:
        return tuple(rule.attribute for rule in self.rules)


class RuleTrace(TypedDict):
    attribute: str
    value: float
    rating: float
    weight: float


class SampleExplanation(TypedDict):
    trace: list[RuleTrace]
    index: float
    fertility_class: str


# =============================================================================
# PARSING
# =============================================================================

def parse_rules(text: str) -> RuleSet:
    """
    Parse a JSON rule document into a validated RuleSet.

    Raises:
        RuleSyntaxError(line): invalid JSON or wrong document shape.
        UnknownAttribute(name), DuplicateAttribute(name),
        BandsNotAscending(attribute), BadCuts.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RuleSyntaxError(exc.lineno, exc.msg) from None

    if not isinstance(document, dict):
        raise RuleSyntaxError(1, "top level must be a JSON object")
    raw_rules = document.get("rules")
    if not isinstance(raw_rules, list) or not raw_rules:
        raise RuleSyntaxError(1, "'rules' must be a non-empty list")

    rules: list[AttributeRule] = []
    seen: set[str] = set()
    for raw in raw_rules:
        rule = _parse_rule(raw)
        if rule.attribute in seen:
            raise DuplicateAttribute(rule.attribute)
        seen.add(rule.attribute)
        rules.append(rule)

    if sum(rule.weight for rule in rules) <= 0:
        raise RuleFileError("rule weights must not all be zero")

    cuts = _parse_cuts(document.get("cuts"))
    return RuleSet(tuple(rules), cuts)


def _parse_rule(raw: Any) -> AttributeRule:
    if not isinstance(raw, dict):
        raise RuleSyntaxError(1, "each rule must be a JSON object")
    name = raw.get("attribute")
    attribute = canonical_attribute(name) if isinstance(name, str) else None
    if attribute is None:
        raise UnknownAttribute(str(name))

    weight = _number(raw.get("weight", 1.0), f"weight of {attribute}")
    if weight < 0:
        raise RuleFileError(f"weight of {attribute} must be >= 0")

    raw_bands = raw.get("bands")
    if not isinstance(raw_bands, list) or not raw_bands:
        raise BandsNotAscending(attribute, "bands must be a non-empty list")

    bands: list[tuple[float, float]] = []
    previous = -math.inf
    for position, band in enumerate(raw_bands):
        if not isinstance(band, dict) or "rating" not in band or "below" not in band:
            raise RuleSyntaxError(1, f"band {position} of {attribute} needs 'below' and 'rating'")
        rating = _number(band["rating"], f"rating of {attribute}")
        is_last = position == len(raw_bands) - 1
        if band["below"] is None:
            if not is_last:
                raise BandsNotAscending(attribute, "only the final band may be unbounded")
            bound = math.inf
        else:
            bound = _number(band["below"], f"bound of {attribute}")
            if is_last:
                raise BandsNotAscending(attribute, "final band must have 'below': null")
        if not bound > previous:
            raise BandsNotAscending(attribute)
        previous = bound
        bands.append((bound, rating))

    return AttributeRule(attribute, tuple(bands), weight)


def _parse_cuts(raw: Any) -> tuple[float, ...]:
    if not isinstance(raw, list) or len(raw) != N_CUTS:
        raise BadCuts(f"need exactly {N_CUTS} cuts")
    cuts = []
    for value in raw:
        if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
            raise BadCuts(f"cut {value!r} is not a finite number")
        cuts.append(float(value))
    if any(b <= a for a, b in zip(cuts, cuts[1:])):
        raise BadCuts("cuts must be strictly ascending")
    return tuple(cuts)


def _number(value: Any, what: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise RuleSyntaxError(1, f"{what} must be a finite number, got {value!r}")
    return float(value)


def load_rules(path: Union[str, Path]) -> RuleSet:
    path = Path(path)
    rules = parse_rules(path.read_text(encoding="utf-8"))
    logger.info("Loaded %d rule(s) from %s", len(rules.rules), path)
    return rules


def default_rules() -> RuleSet:
    return load_rules(DEFAULT_RULES_PATH)


def rules_to_document(rs: RuleSet) -> dict:
    return {
        "rules": [
            {
                "attribute": rule.attribute,
                "weight": rule.weight,
                "bands": [
                    {"below": None if math.isinf(bound) else bound, "rating": rating}
                    for bound, rating in rule.bands
                ],
            }
            for rule in rs.rules
        ],
        "cuts": list(rs.class_cuts),
    }


# =============================================================================
# SCORING
# =============================================================================

def _as_matrix(samples: Union[SoilSample, Dataset, np.ndarray]) -> np.ndarray:
    if isinstance(samples, SoilSample):
        return samples.as_array().reshape(1, -1)
    if isinstance(samples, Dataset):
        return np.asarray(samples.values)
    return np.asarray(samples, dtype=float).reshape(-1, len(ATTRIBUTES))


def index_values(rs: RuleSet, values: np.ndarray) -> np.ndarray:
    """Fertility index for each row of an (N x 9) array."""
    total = np.zeros(values.shape[0], dtype=float)
    # Accumulate rule by rule so every row sees the same arithmetic order.
    for rule in rs.rules:
        total = total + rule.weight * rule.rate(values[:, rule.column])
    return total / rs.total_weight


def class_codes(rs: RuleSet, index: np.ndarray) -> np.ndarray:
    """Level = number of cuts <= index, so ties at a cut go up."""
    return np.searchsorted(np.asarray(rs.class_cuts), index, side="right")


def fertility_index(rs: RuleSet, s: SoilSample) -> float:
    return float(index_values(rs, _as_matrix(s))[0])


def classify_index(rs: RuleSet, index: float) -> FertilityClass:
    return FertilityClass(int(class_codes(rs, np.array([index]))[0]))


def classify_sample(rs: RuleSet, s: SoilSample) -> FertilityClass:
    return classify_index(rs, fertility_index(rs, s))


def label_dataset(rs: RuleSet, d: Dataset) -> Dataset:
    """Return `d` with labels[i] = classify_sample(rs, rows[i]); rows untouched."""
    if len(d) == 0:
        return d.with_labels(())
    codes = class_codes(rs, index_values(rs, _as_matrix(d)))
    labeled = d.with_labels([FertilityClass(int(code)) for code in codes])
    logger.info("Labeled %d rows with %d rule(s)", len(d), len(rs.rules))
    return labeled


def explain_sample(rs: RuleSet, s: SoilSample) -> SampleExplanation:
    """Per-rule band trace for one sample, plus its index and class."""
    values = s.as_array()
    trace: list[RuleTrace] = []
    for rule in rs.rules:
        value = float(values[rule.column])
        trace.append({
            "attribute": rule.attribute,
            "value": value,
            "rating": float(rule.rate(np.array([value]))[0]),
            "weight": rule.weight,
        })
    index = fertility_index(rs, s)
    return {
        "trace": trace,
        "index": index,
        "fertility_class": classify_index(rs, index).label,
    }

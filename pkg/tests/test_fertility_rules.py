"""
tests/test_fertility_rules.py

Rule parsing, banded rating, index aggregation and class cuts.
"""

import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import make_dataset
from fertility_rules import (
    classify_index,
    classify_sample,
    default_rules,
    explain_sample,
    fertility_index,
    label_dataset,
    load_rules,
    parse_rules,
    rules_to_document,
)
from soil_errors import (
    BadCuts,
    BandsNotAscending,
    DuplicateAttribute,
    RuleFileError,
    RuleSyntaxError,
    UnknownAttribute,
)
from soil_schema import FertilityClass, SoilSample

CUTS = [2.0, 4.0, 5.5, 7.0, 8.5]


def document(*rules, cuts=CUTS) -> str:
    return json.dumps({"rules": list(rules), "cuts": cuts})


def flat_rule(attribute, rating, weight=1.0):
    return {"attribute": attribute, "weight": weight, "bands": [{"below": None, "rating": rating}]}


def sample(**overrides) -> SoilSample:
    values = {"Ph": 7.0, "EC": 1.0, "OC": 1.0, "P": 10.0, "K": 200.0, "Fe": 1.0, "Zn": 1.0, "Mn": 1.0, "Cu": 1.0}
    values.update(overrides)
    return SoilSample.from_mapping(values)


# =============================================================================
# 1. PARSING
# =============================================================================

def test_default_rules_load(rules):
    assert rules.attributes() == ("OC", "P", "K")
    assert rules.total_weight == 4.0
    assert rules.class_cuts == tuple(CUTS)
    assert rules.rules[0].bands[-1][0] == float("inf")


def test_duplicate_attribute():
    text = document(flat_rule("OC", 1), flat_rule("oc", 2))
    with pytest.raises(DuplicateAttribute) as info:
        parse_rules(text)
    assert info.value.name == "OC"


def test_bands_must_ascend():
    rule = {"attribute": "K", "bands": [{"below": 5, "rating": 1}, {"below": 3, "rating": 2}, {"below": None, "rating": 3}]}
    with pytest.raises(BandsNotAscending) as info:
        parse_rules(document(rule))
    assert info.value.attribute == "K"


def test_descending_pair_of_bands_is_rejected():
    rule = {"attribute": "K", "bands": [{"below": 5, "rating": 1}, {"below": 3, "rating": 2}]}
    with pytest.raises(BandsNotAscending):
        parse_rules(document(rule))


def test_only_final_band_unbounded():
    rule = {"attribute": "P", "bands": [{"below": None, "rating": 1}, {"below": None, "rating": 2}]}
    with pytest.raises(BandsNotAscending):
        parse_rules(document(rule))


def test_unknown_attribute():
    with pytest.raises(UnknownAttribute):
        parse_rules(document(flat_rule("N", 1)))


@pytest.mark.parametrize("cuts", [[1, 2, 3, 4], [1, 2, 2, 4, 5], [1, 2, 3, 4, "x"]])
def test_bad_cuts(cuts):
    with pytest.raises(BadCuts):
        parse_rules(document(flat_rule("OC", 1), cuts=cuts))


def test_syntax_error_carries_line():
    with pytest.raises(RuleSyntaxError) as info:
        parse_rules('{\n  "rules": [\n  oops\n]}')
    assert info.value.line == 3


def test_all_zero_weights_rejected():
    with pytest.raises(RuleFileError):
        parse_rules(document(flat_rule("OC", 1, weight=0)))


def test_document_round_trip(rules, tmp_path):
    path = tmp_path / "rules.json"
    path.write_text(json.dumps(rules_to_document(rules)), encoding="utf-8")
    assert load_rules(path) == rules


# =============================================================================
# 2. SCORING
# =============================================================================

def test_weighted_index():
    rs = parse_rules(document(flat_rule("OC", 0, weight=1), flat_rule("K", 8, weight=3)))
    assert fertility_index(rs, sample()) == 6.0
    assert classify_sample(rs, sample()) is FertilityClass.MODERATELY_HIGH


@pytest.mark.parametrize("cut, expected", list(zip(CUTS, list(FertilityClass)[1:])))
def test_index_on_a_cut_goes_up(rules, cut, expected):
    assert classify_index(rules, cut) is expected


def test_extreme_indices(rules):
    assert classify_index(rules, -1.0) is FertilityClass.VERY_LOW
    assert classify_index(rules, 100.0) is FertilityClass.VERY_HIGH


def test_band_bound_belongs_to_next_band(rules):
    # OC 0.5 -> rating 5, P 12 -> 10, K 100 -> 0: (2*5 + 10 + 0) / 4
    s = sample(OC=0.5, P=12.0, K=100.0)
    assert fertility_index(rules, s) == 5.0
    assert classify_sample(rules, s) is FertilityClass.MODERATE


def test_explanation_matches_index(rules):
    s = sample(OC=0.9, P=3.0, K=300.0)
    explanation = explain_sample(rules, s)
    assert [t["rating"] for t in explanation["trace"]] == [10.0, 0.0, 10.0]
    assert explanation["index"] == 7.5
    assert explanation["fertility_class"] == "High"


def test_label_dataset_matches_per_sample(rules, synthetic):
    head = synthetic.subset(range(200))
    labeled = label_dataset(rules, head)
    np.testing.assert_array_equal(labeled.values, head.values)
    assert labeled.labels == tuple(classify_sample(rules, s) for s in head.rows)


def test_default_labels_cover_several_classes(labeled):
    assert len(set(labeled.labels)) >= 4


def test_label_empty_dataset(rules):
    empty = make_dataset([])
    assert label_dataset(rules, empty).labels == ()


@given(
    st.floats(min_value=0, max_value=3),
    st.floats(min_value=0, max_value=50),
    st.floats(min_value=0, max_value=600),
)
def test_index_is_bounded_by_ratings(oc, p, k):
    rs = default_rules()
    index = fertility_index(rs, sample(OC=oc, P=p, K=k))
    assert 0.0 <= index <= 10.0


@given(
    st.floats(min_value=0, max_value=3),
    st.floats(min_value=0, max_value=3),
    st.floats(min_value=0, max_value=50),
    st.floats(min_value=0, max_value=600),
)
def test_more_carbon_never_lowers_the_class(oc_a, oc_b, p, k):
    rs = default_rules()
    low, high = sorted((oc_a, oc_b))
    assert classify_sample(rs, sample(OC=low, P=p, K=k)) <= classify_sample(rs, sample(OC=high, P=p, K=k))

"""
tests/test_ripper.py

RIPPER rule induction, description length and first-match prediction.
"""

import math

import numpy as np
import pytest

from classifiers.distribution import predict_classes
from classifiers.ripper import (
    Condition,
    RipperRule,
    RuleList,
    best_condition,
    class_order,
    data_dl,
    grow_rule,
    model_from_dict,
    model_to_dict,
    prune_rule,
    ripper_predict,
    ripper_predict_proba,
    rules_to_text,
    split_grow_prune,
    subset_dl,
    train_ripper,
)
from conftest import make_dataset
from soil_errors import EmptyDataset, InvalidConfig, InvalidModel, UnlabeledDataset
from soil_schema import ATTRIBUTES, FertilityClass, SoilSample

PH = ATTRIBUTES.index("Ph")


def two_blocks():
    """Ten Low rows at Ph 4 and ten High rows at Ph 8."""
    return make_dataset([{"Ph": 4.0}] * 10 + [{"Ph": 8.0}] * 10, labels=[1] * 10 + [4] * 10)


def sample(**values) -> SoilSample:
    row = dict.fromkeys(ATTRIBUTES, 1.0)
    row.update(values)
    return SoilSample.from_mapping(row)


def hand_list() -> RuleList:
    rules = (
        RipperRule((Condition("OC", "<=", 0.5),), FertilityClass.VERY_LOW, (8, 2, 0, 0, 0, 0)),
        RipperRule((Condition("OC", "<=", 0.8), Condition("K", ">=", 200.0)), FertilityClass.MODERATE, (0, 0, 5, 1, 0, 0)),
    )
    return RuleList(rules, FertilityClass.HIGH, (0, 0, 1, 2, 10, 3), {})


# =============================================================================
# 1. BUILDING BLOCKS
# =============================================================================

def test_subset_dl_values():
    assert subset_dl(4, 2, 0.5) == pytest.approx(4.0)
    assert subset_dl(10, 0, 0.0) == 0.0


def test_data_dl_is_zero_cost_when_perfect():
    # cover 10 exactly, nothing wrong: only the log2(total + 1) term remains
    assert data_dl(10, 10, 0, 0) == pytest.approx(math.log2(21))


def test_class_order_ascending_frequency():
    codes = np.array([4] * 5 + [1] * 3 + [2] * 3 + [0] * 7)
    assert class_order(codes) == [1, 2, 4, 0]


def test_split_grow_prune_holds_out_a_third():
    is_pos = np.array([True] * 9 + [False] * 6)
    grow, prune = split_grow_prune(is_pos, 3, np.random.Generator(np.random.PCG64(0)))
    assert (prune & is_pos).sum() == 3 and (prune & ~is_pos).sum() == 2
    assert not np.any(grow & prune)


def test_best_condition_picks_midpoint():
    d = two_blocks()
    condition = best_condition(np.asarray(d.values), d.y == 1)
    assert condition == Condition("Ph", "<=", 6.0)


def test_best_condition_without_positives():
    assert best_condition(np.ones((4, len(ATTRIBUTES))), np.zeros(4, dtype=bool)) is None


def test_grow_stops_once_pure():
    X = np.ones((6, len(ATTRIBUTES)))
    X[:, PH] = [1, 2, 3, 4, 5, 6]
    X[:, ATTRIBUTES.index("K")] = [10, 10, 50, 10, 50, 50]
    is_pos = np.array([True, True, False, False, False, False])
    conditions = grow_rule(X, is_pos)
    covered = np.all([c.covers(X) for c in conditions], axis=0)
    assert np.array_equal(covered, is_pos)


def test_prune_keeps_shortest_best_prefix():
    conditions = (Condition("Ph", "<=", 6.0), Condition("K", ">=", 5.0))
    X = np.ones((4, len(ATTRIBUTES)))
    X[:, PH] = [4, 4, 8, 8]
    X[:, ATTRIBUTES.index("K")] = [1, 10, 1, 10]
    is_pos = np.array([True, True, False, False])
    assert prune_rule(conditions, X, is_pos) == conditions[:1]


# =============================================================================
# 2. TRAINING
# =============================================================================

def test_single_class_gives_empty_list():
    d = make_dataset([{"Ph": v} for v in (5, 6, 7)], labels=[2, 2, 2])
    r = train_ripper(d)
    assert r.rules == () and r.default_class is FertilityClass.MODERATE
    assert rules_to_text(r) == " => Fertility=Moderate (3/0)"


def test_two_blocks_give_one_rule():
    r = train_ripper(two_blocks())
    assert len(r.rules) == 1
    assert r.rules[0].conditions == (Condition("Ph", "<=", 6.0),)
    assert r.rules[0].predicted is FertilityClass.LOW
    assert r.default_class is FertilityClass.HIGH
    assert rules_to_text(r).splitlines() == [
        "(Ph <= 6) => Fertility=Low (10/0)",
        " => Fertility=High (10/0)",
    ]


def test_seeded_training_is_deterministic(small_labeled):
    assert train_ripper(small_labeled, {"seed": 3}) == train_ripper(small_labeled, {"seed": 3})


def test_training_accuracy_on_rule_labels(labeled):
    r = train_ripper(labeled)
    predicted = predict_classes(ripper_predict_proba(r, labeled.values))
    assert np.mean(predicted == labeled.y) >= 0.95


def test_coverage_counts_partition_the_data(small_labeled):
    r = train_ripper(small_labeled)
    total = sum(rule.coverage for rule in r.rules) + sum(r.default_counts)
    assert total == len(small_labeled)


@pytest.mark.parametrize("params", [{"folds": 1}, {"optimizations": -1}, {"seed": True}])
def test_invalid_params(params):
    with pytest.raises(InvalidConfig):
        train_ripper(two_blocks(), params)


def test_training_errors():
    with pytest.raises(UnlabeledDataset):
        train_ripper(two_blocks().with_labels(None))
    with pytest.raises(EmptyDataset):
        train_ripper(two_blocks().subset([]))


# =============================================================================
# 3. PREDICTION AND SERIALIZATION
# =============================================================================

def test_empty_list_returns_default():
    r = RuleList((), FertilityClass.LOW, (0, 4, 0, 0, 0, 0), {})
    dist = ripper_predict(r, sample(Ph=7.0))
    assert dist[FertilityClass.LOW] == pytest.approx(5 / 10)


def test_first_matching_rule_wins():
    # OC 0.4 and K 300 satisfies both rules; rule 1 fires
    dist = ripper_predict(hand_list(), sample(OC=0.4, K=300.0))
    assert dist.predicted_class() is FertilityClass.VERY_LOW
    assert dist[FertilityClass.VERY_LOW] == pytest.approx(9 / 12)


@pytest.mark.parametrize(
    "values, expected",
    [
        ({"OC": 0.5}, FertilityClass.VERY_LOW),
        ({"OC": 0.7, "K": 200.0}, FertilityClass.MODERATE),
        ({"OC": 0.7, "K": 150.0}, FertilityClass.HIGH),
        ({"OC": 1.2, "K": 300.0}, FertilityClass.HIGH),
    ],
)
def test_hand_traced_firings(values, expected):
    assert ripper_predict(hand_list(), sample(**values)).predicted_class() is expected


def test_rule_distribution_sums_to_one():
    for rule in hand_list().rules:
        assert rule.distribution().sum() == pytest.approx(1.0)


def test_dict_round_trip(small_labeled):
    r = train_ripper(small_labeled)
    assert model_from_dict(model_to_dict(r)) == r


def test_bad_documents():
    with pytest.raises(InvalidModel):
        model_from_dict({"rules": [{"conditions": [["Ph", "<", 1]], "predicted": 0, "covered_counts": [0] * 6}]})
    with pytest.raises(InvalidModel):
        model_from_dict({"rules": [], "default_class": 9, "default_counts": [0] * 6})

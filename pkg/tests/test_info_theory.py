"""
tests/test_info_theory.py

Entropy, gain ratio and class-distribution helpers.
"""

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from classifiers.distribution import ClassDistribution, laplace, predict_class, predict_classes
from classifiers.info_theory import entropy, entropy_rows, gain_ratio
from conftest import make_dataset
from soil_errors import AllZero, DegenerateSplit, UnlabeledDataset
from soil_schema import FertilityClass


# =============================================================================
# 1. ENTROPY
# =============================================================================

@pytest.mark.parametrize(
    "counts, bits",
    [([6, 0], 0.0), ([3, 3], 1.0), ([2, 4], 0.918296), ([1, 1, 1, 1, 1, 1], np.log2(6))],
)
def test_entropy_values(counts, bits):
    assert entropy(counts) == pytest.approx(bits, abs=1e-6)


def test_entropy_of_nothing():
    with pytest.raises(AllZero):
        entropy([0, 0, 0])


def test_entropy_rows_matches_scalar():
    counts = np.array([[6, 0, 0, 0, 0, 0], [2, 4, 0, 0, 0, 0], [0, 0, 0, 0, 0, 0]])
    np.testing.assert_allclose(entropy_rows(counts), [0.0, entropy([2, 4]), 0.0])


@given(st.lists(st.integers(min_value=0, max_value=1000), min_size=6, max_size=6).filter(lambda c: sum(c) > 0))
def test_entropy_bounds(counts):
    assert 0.0 <= entropy(counts) <= np.log2(6) + 1e-12


# =============================================================================
# 2. GAIN RATIO
# =============================================================================

def eight_rows():
    # OC: 1..8; classes 0 0 0 1 | 1 1 0 1
    rows = [{"OC": float(v)} for v in range(1, 9)]
    return make_dataset(rows, labels=[0, 0, 0, 1, 1, 1, 0, 1])


def test_separating_split_gains_full_entropy():
    d = make_dataset([{"Zn": v} for v in (1, 2, 3, 4)], labels=[0, 0, 5, 5])
    score = gain_ratio(d, "Zn", 2.5)
    assert score["info_gain"] == pytest.approx(1.0)
    assert score["gain_ratio"] == pytest.approx(1.0)


def test_uninformative_split():
    d = make_dataset([{"Zn": v} for v in (1, 2, 3, 4)], labels=[0, 1, 0, 1])
    assert gain_ratio(d, "Zn", 2.5)["info_gain"] == pytest.approx(0.0, abs=1e-12)


def test_hand_computed_split():
    score = gain_ratio(eight_rows(), "OC", 4.0)
    parent = entropy([4, 4])
    children = 0.5 * entropy([3, 1]) + 0.5 * entropy([1, 3])
    assert score["info_gain"] == pytest.approx(parent - children)
    assert score["split_info"] == pytest.approx(1.0)
    assert score["info_gain"] == pytest.approx(0.188722, abs=1e-6)


@given(
    rows=st.lists(
        st.tuples(st.integers(min_value=0, max_value=20), st.integers(min_value=0, max_value=5)),
        min_size=2,
        max_size=40,
    ),
    scale=st.floats(min_value=0.1, max_value=50.0),
    data=st.data(),
)
def test_gain_ratio_ignores_increasing_relabelling(rows, scale, data):
    values = sorted({v for v, _ in rows})
    assume(len(values) >= 2)
    threshold = data.draw(st.sampled_from(values[:-1]))
    labels = [c for _, c in rows]
    plain = make_dataset([{"Mn": float(v)} for v, _ in rows], labels=labels)
    warped = make_dataset([{"Mn": scale * v**3 + 0.5} for v, _ in rows], labels=labels)
    before = gain_ratio(plain, "Mn", float(threshold))
    after = gain_ratio(warped, "Mn", scale * threshold**3 + 0.5)
    assert after == pytest.approx(before)


def test_degenerate_split():
    with pytest.raises(DegenerateSplit):
        gain_ratio(eight_rows(), "OC", 100.0)


def test_gain_ratio_needs_labels():
    with pytest.raises(UnlabeledDataset):
        gain_ratio(eight_rows().with_labels(None), "OC", 4.0)


# =============================================================================
# 3. DISTRIBUTIONS
# =============================================================================

def test_laplace_smoothing():
    np.testing.assert_allclose(laplace([4, 0, 0, 0, 0, 0]), [0.5, 0.1, 0.1, 0.1, 0.1, 0.1])


def test_argmax_ties_go_low():
    dist = ClassDistribution((0.0, 0.4, 0.4, 0.2, 0.0, 0.0))
    assert predict_class(dist) is FertilityClass.LOW
    assert list(predict_classes(np.array([[0.5, 0.5, 0, 0, 0, 0], [0, 0, 0, 0, 0.5, 0.5]]))) == [0, 4]


def test_distribution_contract():
    with pytest.raises(ValueError):
        ClassDistribution((0.5, 0.5))
    with pytest.raises(ValueError):
        ClassDistribution((0.6, 0.6, 0, 0, 0, 0))
    assert ClassDistribution.from_array([1, 1, 2, 0, 0, 0])[FertilityClass.MODERATE] == 0.5

"""
tests/test_metrics.py

Confusion-matrix scores, probabilistic error and regression measures.
"""

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from classifiers.distribution import ClassDistribution
from soil_errors import DegenerateBaseline, EmptyMatrix, LengthMismatch, ZeroVariance
from validation.metrics import (
    ConfusionMatrix,
    accuracy,
    correlation_coefficient,
    error_rate,
    mae_classification,
    mean_absolute_error,
    relative_absolute_error,
    root_mean_squared_error,
    root_relative_squared_error,
    tpr_fpr,
    weighted_rates,
)


def matrix_with(correct, total=1988):
    counts = np.zeros((6, 6), dtype=int)
    counts[0, 0] = correct
    counts[0, 1] = total - correct
    return ConfusionMatrix(counts)


# =============================================================================
# 1. CONFUSION MATRIX
# =============================================================================

@pytest.mark.parametrize("correct, percent", [(765, 38.48), (1794, 90.24), (1827, 91.90)])
def test_accuracy_from_counts(correct, percent):
    c = matrix_with(correct)
    assert round(100 * accuracy(c), 2) == percent
    assert accuracy(c) + error_rate(c) == pytest.approx(1.0, abs=1e-15)


def test_diagonal_is_perfect():
    c = ConfusionMatrix(np.diag([3, 1, 4, 1, 5, 9]))
    assert accuracy(c) == 1.0
    for level in range(6):
        rates = tpr_fpr(c, level)
        assert (rates["tpr"], rates["fpr"]) == (1.0, 0.0)
    assert weighted_rates(c) == (1.0, 0.0)


def test_empty_matrix():
    with pytest.raises(EmptyMatrix):
        accuracy(ConfusionMatrix(np.zeros((6, 6))))


def test_from_predictions_counts():
    c = ConfusionMatrix.from_predictions([0, 0, 1, 2, 2, 2], [0, 1, 1, 2, 2, 0])
    assert c.counts[0].tolist() == [1, 1, 0, 0, 0, 0]
    assert c.counts[2, 2] == 2 and c.total == 6 and c.correct == 4
    with pytest.raises(LengthMismatch):
        ConfusionMatrix.from_predictions([0, 1], [0])


def test_hand_counted_rates():
    # actual x predicted over three classes
    counts = np.zeros((6, 6), dtype=int)
    counts[:3, :3] = [[5, 1, 0], [2, 3, 1], [0, 0, 4]]
    c = ConfusionMatrix(counts)
    low = tpr_fpr(c, 1)
    assert low["tpr"] == pytest.approx(3 / 6)
    assert low["fpr"] == pytest.approx(1 / 10)
    very_low = tpr_fpr(c, 0)
    assert very_low["fpr"] == pytest.approx(2 / 10)
    w_tpr, w_fpr = weighted_rates(c)
    assert w_tpr == pytest.approx(accuracy(c))
    assert w_fpr == pytest.approx((6 * 0.2 + 6 * 0.1 + 4 * (1 / 12)) / 16)


def test_absent_class_is_flagged():
    c = ConfusionMatrix(np.diag([2, 2, 0, 0, 0, 0]))
    rates = tpr_fpr(c, 4)
    assert rates["tpr"] == 0.0 and not rates["tpr_defined"]
    assert rates["fpr_defined"]


# =============================================================================
# 2. CLASSIFICATION MAE
# =============================================================================

def test_confident_correct_predictions():
    probs = np.eye(6)[[0, 3, 5]]
    assert mae_classification(probs, [0, 3, 5]) == 0.0


def test_uniform_predictions():
    uniform = [ClassDistribution((1 / 6,) * 6)] * 4
    assert mae_classification(uniform, [0, 1, 2, 3]) == pytest.approx(2 * 5 / 36)


def test_mixed_fixture():
    probs = np.array([
        [0.5, 0.5, 0, 0, 0, 0],
        [0, 0, 1.0, 0, 0, 0],
        [0.25, 0.25, 0.25, 0.25, 0, 0],
    ])
    # per instance: (0.5 + 0.5) / 6, 2 / 6, (0.75 + 0.75) / 6
    expected = (1.0 + 2.0 + 1.5) / 6 / 3
    assert mae_classification(probs, [0, 1, 3]) == pytest.approx(expected)


def test_mae_length_mismatch():
    with pytest.raises(LengthMismatch):
        mae_classification(np.eye(6)[:2], [0])


# =============================================================================
# 3. REGRESSION
# =============================================================================

def test_correlation_extremes():
    actual = np.array([1.0, 2.0, 3.0, 4.0])
    assert correlation_coefficient(actual, actual) == pytest.approx(1.0)
    assert correlation_coefficient(-actual, actual) == pytest.approx(-1.0)


def test_correlation_oracle():
    pred, actual = np.array([1.0, 2.0, 4.0]), np.array([1.0, 2.0, 3.0])
    assert correlation_coefficient(pred, actual) == pytest.approx(np.corrcoef(pred, actual)[0, 1])
    assert correlation_coefficient(pred, actual) == pytest.approx(0.981981, abs=1e-6)


def test_correlation_zero_variance():
    with pytest.raises(ZeroVariance) as info:
        correlation_coefficient([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])
    assert info.value.which == "pred"
    with pytest.raises(ZeroVariance):
        correlation_coefficient([1.0, 2.0, 3.0], [2.0, 2.0, 2.0])


def test_relative_absolute_error():
    actual = np.array([1.0, 2.0, 3.0, 6.0])
    assert relative_absolute_error(actual, actual, 3.0) == 0.0
    assert relative_absolute_error(np.full(4, 3.0), actual, 3.0) == pytest.approx(100.0)
    pred = np.array([2.0, 2.0, 2.0, 5.0])
    # |errors| 1 0 1 1 over |actual - 3| 2 1 0 3
    assert relative_absolute_error(pred, actual, 3.0) == pytest.approx(50.0)


def test_relative_errors_with_per_instance_baseline():
    actual = np.array([1.0, 3.0])
    assert relative_absolute_error([1.0, 2.0], actual, [2.0, 2.0]) == pytest.approx(50.0)
    assert root_relative_squared_error([1.0, 2.0], actual, [2.0, 2.0]) == pytest.approx(100 * np.sqrt(0.5))


def test_degenerate_baseline():
    with pytest.raises(DegenerateBaseline):
        relative_absolute_error([1.0, 2.0], [2.0, 2.0], 2.0)
    with pytest.raises(DegenerateBaseline):
        root_relative_squared_error([1.0, 2.0], [2.0, 2.0], 2.0)


def test_absolute_and_squared_errors():
    pred, actual = [1.0, 2.0, 5.0], [1.0, 4.0, 4.0]
    assert mean_absolute_error(pred, actual) == pytest.approx(1.0)
    assert root_mean_squared_error(pred, actual) == pytest.approx(np.sqrt(5 / 3))
    with pytest.raises(LengthMismatch):
        mean_absolute_error([], [])


@given(
    st.lists(st.tuples(st.integers(-1000, 1000), st.integers(-1000, 1000)), min_size=3, max_size=40),
    st.integers(1, 50),
    st.integers(-1000, 1000),
)
def test_correlation_ignores_positive_affine_maps(pairs, scale, shift):
    pred = np.array([p for p, _ in pairs], dtype=float)
    actual = np.array([a for _, a in pairs], dtype=float)
    assume(np.ptp(pred) > 0 and np.ptp(actual) > 0)
    moved = scale * pred + shift
    assert correlation_coefficient(moved, actual) == pytest.approx(correlation_coefficient(pred, actual), abs=1e-9)


@given(st.lists(st.integers(0, 20), min_size=36, max_size=36).filter(lambda c: sum(c) > 0))
def test_accuracy_and_error_rate_are_complements(cells):
    c = ConfusionMatrix(np.array(cells).reshape(6, 6))
    assert accuracy(c) == pytest.approx(np.trace(c.counts) / sum(cells))
    assert accuracy(c) + error_rate(c) == pytest.approx(1.0)

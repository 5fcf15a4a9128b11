"""
tests/test_synthetic_generator.py

Seeded generator contract and label noise injection.
"""

import numpy as np
import pytest

from soil_errors import InvalidConfig, UnlabeledDataset
from soil_schema import ATTRIBUTES, PH_MAX
from synthetic_generator import (
    DEFAULT_RANGES,
    DEFAULT_ROWS,
    NON_P_ATTRIBUTES,
    SynthConfig,
    generate_synthetic,
    inject_label_noise,
)

ZERO_BETA = {name: 0.0 for name in NON_P_ATTRIBUTES}


# =============================================================================
# 1. GENERATION
# =============================================================================

def test_noise_free_formula():
    cfg = SynthConfig(n=1, p_noise_sd=0.0, p_coefficients=ZERO_BETA, p_intercept=7.0)
    d = generate_synthetic(cfg)
    assert len(d) == 1
    assert d.column("P")[0] == 7.0
    assert d.labels is None


def test_same_config_same_dataset():
    cfg = SynthConfig(n=50, seed=123)
    assert generate_synthetic(cfg) == generate_synthetic(cfg)


def test_default_argument_is_the_default_config():
    import synthetic_generator

    assert synthetic_generator.DEFAULT_SYNTH_CONFIG == SynthConfig()
    assert len(generate_synthetic()) == DEFAULT_ROWS


def test_different_seed_different_dataset():
    assert generate_synthetic(SynthConfig(n=50, seed=1)) != generate_synthetic(SynthConfig(n=50, seed=2))


def test_default_dataset_shape_and_ranges(synthetic):
    assert len(synthetic) == DEFAULT_ROWS == 1988
    for name in NON_P_ATTRIBUTES:
        low, high = DEFAULT_RANGES[name]
        column = synthetic.column(name)
        assert column.min() >= low and column.max() < high
    assert synthetic.column("P").min() >= 0.0
    assert synthetic.column("Ph").max() <= PH_MAX


def test_p_follows_the_linear_formula():
    beta = dict(ZERO_BETA, OC=2.0, K=0.01)
    d = generate_synthetic(SynthConfig(n=200, p_coefficients=beta, p_intercept=3.0, p_noise_sd=0.0))
    expected = 3.0 + 2.0 * d.column("OC") + 0.01 * d.column("K")
    np.testing.assert_allclose(d.column("P"), expected, rtol=1e-12)


def test_negative_p_is_clamped():
    cfg = SynthConfig(n=20, p_coefficients=ZERO_BETA, p_intercept=-5.0, p_noise_sd=0.0)
    assert np.all(generate_synthetic(cfg).column("P") == 0.0)


@pytest.mark.parametrize(
    "overrides, field",
    [
        ({"n": 0}, "n"),
        ({"seed": -1}, "seed"),
        ({"p_noise_sd": -0.1}, "p_noise_sd"),
        ({"label_noise": 1.0}, "label_noise"),
        ({"ranges": dict(DEFAULT_RANGES, Ph=(4.0, 15.0))}, "ranges"),
        ({"ranges": dict(DEFAULT_RANGES, K=(5.0, 5.0))}, "ranges"),
        ({"p_coefficients": {"OC": 1.0}}, "p_coefficients"),
    ],
)
def test_invalid_config(overrides, field):
    with pytest.raises(InvalidConfig) as info:
        SynthConfig(**overrides)
    assert info.value.field == field


def test_provenance_names_seed():
    assert generate_synthetic(SynthConfig(n=3, seed=9)).provenance == "synthetic:seed=9:n=3"


# =============================================================================
# 2. LABEL NOISE
# =============================================================================

def test_noise_changes_exact_count(labeled):
    noisy = inject_label_noise(labeled, 0.05, seed=3)
    changed = int(np.sum(noisy.y != labeled.y))
    assert changed == round(0.05 * len(labeled))
    np.testing.assert_array_equal(noisy.values, labeled.values)


def test_noise_is_seeded(labeled):
    assert inject_label_noise(labeled, 0.1, seed=5) == inject_label_noise(labeled, 0.1, seed=5)


def test_zero_noise_is_identity(labeled):
    assert inject_label_noise(labeled, 0.0) is labeled


def test_noise_needs_labels(synthetic):
    with pytest.raises(UnlabeledDataset):
        inject_label_noise(synthetic, 0.05)


def test_noise_fraction_range(labeled):
    with pytest.raises(InvalidConfig):
        inject_label_noise(labeled, 1.5)


def test_attribute_columns_are_canonical(synthetic):
    assert synthetic.values.shape == (1988, len(ATTRIBUTES))

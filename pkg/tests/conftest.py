"""
Shared fixtures for the soil toolkit test suite.

Run: python3 -m pytest            (everything)
     python3 -m pytest -m "not slow"
"""

import logging
import os
import sys

import hypothesis
import numpy as np
import pytest

# Add parent directory to path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from fertility_rules import default_rules, label_dataset  # noqa: E402
from soil_schema import ATTRIBUTES, Dataset, FertilityClass  # noqa: E402
from synthetic_generator import SynthConfig, generate_synthetic, inject_label_noise  # noqa: E402

hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.register_profile("thorough", max_examples=200, deadline=None)
hypothesis.settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "fast"))


def make_dataset(rows, labels=None, provenance="fixture") -> Dataset:
    """Dataset from short row dicts; unspecified attributes default to 1.0."""
    values = np.ones((len(rows), len(ATTRIBUTES)), dtype=float)
    for i, row in enumerate(rows):
        for name, value in row.items():
            values[i, ATTRIBUTES.index(name)] = value
    if labels is not None:
        labels = [FertilityClass(int(level)) for level in labels]
    return Dataset(values, labels, provenance)


@pytest.fixture(autouse=True)
def restore_logging():
    """The CLI reconfigures the root logger; put it back after each test."""
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture(scope="session")
def rules():
    return default_rules()


@pytest.fixture(scope="session")
def synthetic():
    """The shipped default configuration: 1988 rows, seed 42."""
    return generate_synthetic(SynthConfig())


@pytest.fixture(scope="session")
def labeled(rules, synthetic):
    """Default synthetic data labeled by the default rules, no label noise."""
    return label_dataset(rules, synthetic)


@pytest.fixture(scope="session")
def noisy_labeled(labeled):
    """Default labels with 5% reassigned."""
    return inject_label_noise(labeled, 0.05, seed=42)


@pytest.fixture(scope="session")
def small_labeled(rules):
    """300 rows, quick enough for per-test training."""
    return label_dataset(rules, generate_synthetic(SynthConfig(n=300, seed=7)))

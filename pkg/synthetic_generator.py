"""
Synthetic Soil Generator
========================
Seeded stand-in for a private laboratory dataset.

PRNG Contract:
    numpy Generator(PCG64(seed)). Draw order is fixed so identical configs
    yield identical datasets on every platform numpy supports:
        1. For each non-P attribute in canonical order (Ph, EC, OC, K, Fe, Zn,
           Mn, Cu): n uniform draws on [min, max).
        2. n standard-normal draws, scaled by sigma, for the P noise.

    P = intercept + sum(beta * attribute) + noise, clamped at 0.

The shipped ranges and coefficients are generator configuration only; they
make no claim about any real laboratory's data.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from soil_errors import InvalidConfig, UnlabeledDataset
from soil_schema import ATTRIBUTES, N_CLASSES, PH_MAX, Dataset, FertilityClass

logger = logging.getLogger(__name__)


NON_P_ATTRIBUTES: tuple[str, ...] = tuple(name for name in ATTRIBUTES if name != "P")


# =============================================================================
# DEFAULT CONFIGURATION
# =============================================================================

DEFAULT_RANGES: dict[str, tuple[float, float]] = {
    "Ph": (4.0, 9.0),
    "EC": (0.0, 4.0),
    "OC": (0.1, 1.5),
    "K": (50.0, 400.0),
    "Fe": (0.2, 20.0),
    "Zn": (0.2, 20.0),
    "Mn": (0.2, 20.0),
    "Cu": (0.2, 20.0),
}

# P depends on a handful of attributes; EC, Mn and Cu carry no weight.
DEFAULT_P_COEFFICIENTS: dict[str, float] = {
    "Ph": -0.3,
    "EC": 0.0,
    "OC": 6.0,
    "K": 0.015,
    "Fe": 0.1,
    "Zn": 0.2,
    "Mn": 0.0,
    "Cu": 0.0,
}

DEFAULT_P_INTERCEPT = 1.5
DEFAULT_P_NOISE_SD = 0.3
DEFAULT_ROWS = 1988
DEFAULT_SEED = 42


@dataclass(frozen=True)
class SynthConfig:
    """
    Generator settings.

    Attributes:
        n: Instance count (>= 1).
        seed: 64-bit unsigned PCG64 seed.
        ranges: Per non-P attribute [min, max) for uniform draws.
        p_coefficients: Beta for each of the 8 non-P attributes.
        p_intercept: Intercept of the P formula.
        p_noise_sd: Gaussian noise standard deviation (sigma >= 0).
        label_noise: Fraction of labels reassigned by inject_label_noise, in [0, 1).
    """

    n: int = DEFAULT_ROWS
    seed: int = DEFAULT_SEED
    ranges: Mapping[str, tuple[float, float]] = field(default_factory=lambda: dict(DEFAULT_RANGES))
    p_coefficients: Mapping[str, float] = field(default_factory=lambda: dict(DEFAULT_P_COEFFICIENTS))
    p_intercept: float = DEFAULT_P_INTERCEPT
    p_noise_sd: float = DEFAULT_P_NOISE_SD
    label_noise: float = 0.0

    def __post_init__(self):
        validate_config(self)

    def beta(self) -> np.ndarray:
        return np.array([float(self.p_coefficients[name]) for name in NON_P_ATTRIBUTES])


def validate_config(cfg: SynthConfig) -> None:
    """Raise InvalidConfig naming the first violated field."""
    if not isinstance(cfg.n, (int, np.integer)) or cfg.n < 1:
        raise InvalidConfig("n", f"must be an integer >= 1, got {cfg.n!r}")
    if not isinstance(cfg.seed, (int, np.integer)) or not 0 <= cfg.seed < 2**64:
        raise InvalidConfig("seed", "must be a 64-bit unsigned integer")
    if not math.isfinite(cfg.p_noise_sd) or cfg.p_noise_sd < 0:
        raise InvalidConfig("p_noise_sd", "sigma must be finite and >= 0")
    if not 0 <= cfg.label_noise < 1:
        raise InvalidConfig("label_noise", "must lie in [0, 1)")
    if not math.isfinite(cfg.p_intercept):
        raise InvalidConfig("p_intercept", "must be finite")

    for name in NON_P_ATTRIBUTES:
        if name not in cfg.ranges:
            raise InvalidConfig("ranges", f"missing range for {name}")
        low, high = (float(v) for v in cfg.ranges[name])
        if not (math.isfinite(low) and math.isfinite(high)) or not low < high:
            raise InvalidConfig("ranges", f"{name} needs finite min < max")
        if low < 0 or (name == "Ph" and high > PH_MAX):
            raise InvalidConfig("ranges", f"{name} range [{low}, {high}] violates sample invariants")
        if name not in cfg.p_coefficients or not math.isfinite(float(cfg.p_coefficients[name])):
            raise InvalidConfig("p_coefficients", f"missing or non-finite beta for {name}")

    extra = set(cfg.ranges) - set(NON_P_ATTRIBUTES)
    if extra:
        raise InvalidConfig("ranges", f"unexpected attributes {sorted(extra)}")
    extra = set(cfg.p_coefficients) - set(NON_P_ATTRIBUTES)
    if extra:
        raise InvalidConfig("p_coefficients", f"unexpected attributes {sorted(extra)}")


DEFAULT_SYNTH_CONFIG = SynthConfig()


# =============================================================================
# GENERATION
# =============================================================================

def generate_synthetic(cfg: SynthConfig = DEFAULT_SYNTH_CONFIG) -> Dataset:
    """Generate an unlabeled dataset; a pure function of `cfg`."""
    validate_config(cfg)
    rng = np.random.Generator(np.random.PCG64(int(cfg.seed)))

    values = np.zeros((cfg.n, len(ATTRIBUTES)), dtype=float)
    for name in NON_P_ATTRIBUTES:
        low, high = (float(v) for v in cfg.ranges[name])
        values[:, ATTRIBUTES.index(name)] = rng.uniform(low, high, size=cfg.n)

    noise = rng.standard_normal(cfg.n) * float(cfg.p_noise_sd)
    others = values[:, [ATTRIBUTES.index(name) for name in NON_P_ATTRIBUTES]]
    p_values = float(cfg.p_intercept) + others @ cfg.beta() + noise
    values[:, ATTRIBUTES.index("P")] = np.maximum(p_values, 0.0)

    logger.info("Generated %d synthetic rows (seed=%d, sigma=%g)", cfg.n, cfg.seed, cfg.p_noise_sd)
    return Dataset(values, None, provenance=f"synthetic:seed={cfg.seed}:n={cfg.n}")


def inject_label_noise(dataset: Dataset, fraction: float, seed: int = DEFAULT_SEED) -> Dataset:
    """
    Reassign exactly round(fraction * N) distinct labels to a different class.

    Rows are chosen without replacement from a PCG64 stream seeded by `seed`;
    each chosen row gets one of the 5 other classes uniformly.
    """
    if dataset.labels is None:
        raise UnlabeledDataset()
    if not 0 <= fraction < 1:
        raise InvalidConfig("label_noise", "must lie in [0, 1)")

    count = int(round(fraction * len(dataset)))
    if count == 0:
        return dataset

    rng = np.random.Generator(np.random.PCG64(int(seed)))
    chosen = rng.choice(len(dataset), size=count, replace=False)
    shifts = rng.integers(1, N_CLASSES, size=count)

    codes = np.array(dataset.y, dtype=np.int64)
    codes[chosen] = (codes[chosen] + shifts) % N_CLASSES
    logger.info("Reassigned %d of %d labels (fraction=%g)", count, len(dataset), fraction)
    return dataset.with_labels([FertilityClass(int(c)) for c in codes])

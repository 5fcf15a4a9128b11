"""
Information-theoretic primitives shared by the tree and rule learners.
"""

from typing import Sequence, TypedDict

import numpy as np

from soil_errors import AllZero, DegenerateSplit, UnlabeledDataset
from soil_schema import N_CLASSES, Dataset


class SplitScore(TypedDict):
    info_gain: float
    split_info: float
    gain_ratio: float


def entropy(class_counts: Sequence[float]) -> float:
    """H = -sum p log2 p in bits; zero counts contribute nothing."""
    counts = np.asarray(class_counts, dtype=float)
    if np.any(counts < 0):
        raise ValueError("class counts must be non-negative")
    total = counts.sum()
    if total <= 0:
        raise AllZero()
    p = counts[counts > 0] / total
    return float(max(0.0, -(p * np.log2(p)).sum()))


def entropy_rows(counts: np.ndarray) -> np.ndarray:
    """Entropy of each row of a count matrix; all-zero rows give 0."""
    counts = np.asarray(counts, dtype=float)
    totals = counts.sum(axis=-1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(totals > 0, counts / np.where(totals > 0, totals, 1.0), 0.0)
        terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    return -terms.sum(axis=-1)


def gain_ratio(d: Dataset, attribute: str, threshold: float) -> SplitScore:
    """Score the binary split attribute <= threshold vs > threshold."""
    if d.labels is None:
        raise UnlabeledDataset()
    column = d.column(attribute)
    left = column <= threshold
    n_left = int(left.sum())
    n_right = len(d) - n_left
    if n_left == 0 or n_right == 0:
        raise DegenerateSplit(attribute, threshold)

    y = d.y
    parent = np.bincount(y, minlength=N_CLASSES)
    left_counts = np.bincount(y[left], minlength=N_CLASSES)
    right_counts = parent - left_counts
    n = float(len(d))

    info_gain = entropy(parent) - (n_left / n) * entropy(left_counts) - (n_right / n) * entropy(right_counts)
    split_info = entropy([n_left, n_right])
    return {
        "info_gain": float(info_gain),
        "split_info": float(split_info),
        "gain_ratio": float(info_gain / split_info),
    }

"""
validation/folds.py

Seeded fold assignment for cross-validation.

Stratified folds deal each class's shuffled members round-robin across the
folds. The dealing position carries over from one class to the next, so
fold sizes differ by at most one and every class is spread within one
instance of its global proportion.
"""

import numpy as np

from soil_errors import BadK, UnlabeledDataset
from soil_schema import N_CLASSES, Dataset


def _check_k(k: int, n: int) -> None:
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 2 <= k <= n:
        raise BadK(k, n)


def _split(assignment: np.ndarray, k: int) -> list[np.ndarray]:
    return [np.flatnonzero(assignment == fold) for fold in range(k)]


def stratified_k_fold(d: Dataset, k: int, seed: int) -> list[np.ndarray]:
    """k disjoint, sorted index arrays covering range(len(d))."""
    if d.labels is None:
        raise UnlabeledDataset()
    n = len(d)
    _check_k(k, n)

    rng = np.random.Generator(np.random.PCG64(int(seed)))
    codes = d.y
    assignment = np.empty(n, dtype=np.int64)
    offset = 0
    for level in range(N_CLASSES):
        members = np.flatnonzero(codes == level)
        if members.size == 0:
            continue
        shuffled = rng.permutation(members)
        assignment[shuffled] = (offset + np.arange(members.size)) % k
        offset = (offset + members.size) % k
    return _split(assignment, k)


def k_fold(n: int, k: int, seed: int) -> list[np.ndarray]:
    """Unstratified seeded folds, used when the target is continuous."""
    _check_k(k, n)
    rng = np.random.Generator(np.random.PCG64(int(seed)))
    assignment = np.empty(n, dtype=np.int64)
    assignment[rng.permutation(n)] = np.arange(n) % k
    return _split(assignment, k)


def training_indices(folds: list[np.ndarray], fold: int) -> np.ndarray:
    """Sorted complement of folds[fold]."""
    return np.sort(np.concatenate([f for i, f in enumerate(folds) if i != fold]))

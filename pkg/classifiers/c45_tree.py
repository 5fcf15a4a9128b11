"""
C4.5 Decision Tree
==================
Binary tree over the nine numeric attributes, grown with gain-ratio splits
and pruned by pessimistic-error subtree replacement.

Growth:
    - Candidate thresholds are midpoints between consecutive distinct sorted
      values; a value equal to the threshold goes left.
    - Each attribute contributes its best threshold by information gain,
      restricted to splits leaving >= min_leaf instances on both sides.
    - Among attributes whose gain reaches the mean positive gain, the highest
      gain ratio wins (ties: lower attribute index, then lower threshold).
    - A node becomes a leaf when it is pure, holds fewer than 2 * min_leaf
      instances, or no split has positive gain.

Pruning:
    Bottom-up. A subtree collapses into a leaf when the leaf's estimated
    errors (observed errors plus the binomial upper-bound correction at
    prune_confidence) do not exceed the sum over its children.

Subtree raising and the continuous-split MDL penalty are not implemented.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.stats import norm

from classifiers.distribution import ClassDistribution, laplace
from classifiers.info_theory import entropy_rows
from soil_errors import EmptyDataset, InvalidConfig, InvalidModel, UnlabeledDataset
from soil_schema import ATTRIBUTES, CLASS_LABELS, N_CLASSES, Dataset, FertilityClass, SoilSample

logger = logging.getLogger(__name__)


# =============================================================================
# DEFAULT CONFIGURATION
# =============================================================================

DEFAULT_C45_PARAMS = {
    "min_leaf": 2,
    "prune_confidence": 0.25,
    "pruning": True,
}

GAIN_EPSILON = 1e-12


# =============================================================================
# TYPE DEFINITIONS
# =============================================================================

@dataclass(frozen=True)
class TreeNode:
    """
    Internal nodes carry (attribute, threshold, left, right); leaves carry
    None there. Every node keeps its training class counts and the
    pessimistic error estimate of the subtree rooted at it.
    """

    counts: tuple[int, ...]
    error_estimate: float
    attribute: Optional[str] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.attribute is None

    @property
    def n(self) -> int:
        return int(sum(self.counts))

    @property
    def majority(self) -> FertilityClass:
        return FertilityClass(int(np.argmax(self.counts)))

    def distribution(self) -> np.ndarray:
        return laplace(np.asarray(self.counts, dtype=float))


@dataclass(frozen=True)
class DecisionTree:
    root: TreeNode
    params: dict

    def node_count(self) -> int:
        return _count(self.root)

    def leaf_count(self) -> int:
        return _count(self.root, leaves_only=True)

    def depth(self) -> int:
        return _depth(self.root)


def _count(node: TreeNode, leaves_only: bool = False) -> int:
    if node.is_leaf:
        return 1
    own = 0 if leaves_only else 1
    return own + _count(node.left, leaves_only) + _count(node.right, leaves_only)


def _depth(node: TreeNode) -> int:
    if node.is_leaf:
        return 0
    return 1 + max(_depth(node.left), _depth(node.right))


# =============================================================================
# PESSIMISTIC ERROR
# =============================================================================

def added_errors(total: float, errors: float, confidence: float) -> float:
    """
    Extra errors implied by the upper confidence bound of the binomial error
    rate at `confidence`, for `errors` misclassified out of `total`.
    """
    if total <= 0:
        return 0.0
    if errors < 1e-6:
        return total * (1.0 - math.exp(math.log(confidence) / total))
    if errors < 0.9999:
        base = total * (1.0 - math.exp(math.log(confidence) / total))
        return base + errors * (added_errors(total, 1.0, confidence) - base)
    if errors + 0.5 >= total:
        return 0.67 * (total - errors)

    z2 = float(norm.isf(confidence)) ** 2
    upper = (
        errors + 0.5 + z2 / 2.0
        + math.sqrt(z2 * ((errors + 0.5) * (1.0 - (errors + 0.5) / total) + z2 / 4.0))
    ) / (total + z2)
    return total * upper - errors


def leaf_error_estimate(counts: np.ndarray, confidence: float) -> float:
    total = float(np.sum(counts))
    errors = total - float(np.max(counts))
    return errors + added_errors(total, errors, confidence)


# =============================================================================
# SPLIT SEARCH
# =============================================================================

def _best_threshold(column: np.ndarray, codes: np.ndarray, parent_entropy: float, min_leaf: int):
    """(info_gain, threshold, n_left) of the best threshold on one attribute, or None."""
    m = column.shape[0]
    order = np.argsort(column, kind="stable")
    xs = column[order]
    onehot = np.zeros((m, N_CLASSES), dtype=float)
    onehot[np.arange(m), codes[order]] = 1.0
    left = np.cumsum(onehot, axis=0)[:-1]
    n_left = np.arange(1, m, dtype=float)

    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (m - n_left >= min_leaf)
    if not valid.any():
        return None

    right = left[-1] + onehot[-1] - left
    gain = (
        parent_entropy
        - (n_left / m) * entropy_rows(left)
        - ((m - n_left) / m) * entropy_rows(right)
    )
    gain = np.where(valid, gain, -np.inf)
    best = int(np.argmax(gain))

    threshold = (xs[best] + xs[best + 1]) / 2.0
    if not xs[best] <= threshold < xs[best + 1]:
        threshold = float(xs[best])
    return float(gain[best]), float(threshold), int(n_left[best])


def choose_split(X: np.ndarray, codes: np.ndarray, min_leaf: int) -> Optional[tuple[int, float]]:
    """(attribute column, threshold) for a node, or None if it should be a leaf."""
    m = X.shape[0]
    counts = np.bincount(codes, minlength=N_CLASSES)
    parent_entropy = float(entropy_rows(counts))

    candidates = []
    for col in range(X.shape[1]):
        found = _best_threshold(X[:, col], codes, parent_entropy, min_leaf)
        if found is not None and found[0] > GAIN_EPSILON:
            candidates.append((col, *found))
    if not candidates:
        return None

    mean_gain = sum(c[1] for c in candidates) / len(candidates)
    best = None
    best_ratio = -math.inf
    for col, gain, threshold, n_left in candidates:
        if gain < mean_gain - GAIN_EPSILON:
            continue
        split_info = float(entropy_rows(np.array([n_left, m - n_left], dtype=float)))
        ratio = gain / split_info
        if ratio > best_ratio:
            best, best_ratio = (col, threshold), ratio
    return best


# =============================================================================
# TRAINING
# =============================================================================

def _resolve_params(params: Optional[dict]) -> dict:
    resolved = dict(DEFAULT_C45_PARAMS)
    resolved.update(params or {})
    min_leaf = resolved["min_leaf"]
    if isinstance(min_leaf, bool) or not isinstance(min_leaf, (int, np.integer)) or min_leaf < 1:
        raise InvalidConfig("min_leaf", f"must be an integer >= 1, got {min_leaf!r}")
    confidence = float(resolved["prune_confidence"])
    if not 0.0 < confidence < 1.0:
        raise InvalidConfig("prune_confidence", f"must lie in (0, 1), got {confidence!r}")
    return {"min_leaf": int(min_leaf), "prune_confidence": confidence, "pruning": bool(resolved["pruning"])}


def _grow(X: np.ndarray, codes: np.ndarray, params: dict) -> TreeNode:
    counts = np.bincount(codes, minlength=N_CLASSES)
    leaf = TreeNode(
        counts=tuple(int(c) for c in counts),
        error_estimate=leaf_error_estimate(counts, params["prune_confidence"]),
    )
    min_leaf = params["min_leaf"]
    if np.count_nonzero(counts) <= 1 or X.shape[0] < 2 * min_leaf:
        return leaf

    split = choose_split(X, codes, min_leaf)
    if split is None:
        return leaf

    col, threshold = split
    mask = X[:, col] <= threshold
    left = _grow(X[mask], codes[mask], params)
    right = _grow(X[~mask], codes[~mask], params)
    return TreeNode(
        counts=leaf.counts,
        error_estimate=left.error_estimate + right.error_estimate,
        attribute=ATTRIBUTES[col],
        threshold=threshold,
        left=left,
        right=right,
    )


def prune(node: TreeNode, confidence: float) -> TreeNode:
    """Subtree replacement, children first."""
    if node.is_leaf:
        return node
    left = prune(node.left, confidence)
    right = prune(node.right, confidence)
    subtree_estimate = left.error_estimate + right.error_estimate
    leaf_estimate = leaf_error_estimate(np.asarray(node.counts), confidence)
    if leaf_estimate <= subtree_estimate:
        return TreeNode(counts=node.counts, error_estimate=leaf_estimate)
    return TreeNode(
        counts=node.counts,
        error_estimate=subtree_estimate,
        attribute=node.attribute,
        threshold=node.threshold,
        left=left,
        right=right,
    )


def train_c45(d: Dataset, params: Optional[dict] = None) -> DecisionTree:
    """Grow (and by default prune) a tree on a labeled, gap-free dataset."""
    if d.labels is None:
        raise UnlabeledDataset()
    if len(d) == 0:
        raise EmptyDataset()
    resolved = _resolve_params(params)

    root = _grow(np.asarray(d.values, dtype=float), np.asarray(d.y), resolved)
    grown_nodes = _count(root)
    if resolved["pruning"]:
        root = prune(root, resolved["prune_confidence"])

    tree = DecisionTree(root, resolved)
    logger.debug(
        "C4.5 tree: %d nodes grown, %d after pruning, depth %d",
        grown_nodes, tree.node_count(), tree.depth(),
    )
    return tree


# =============================================================================
# PREDICTION
# =============================================================================

def _leaf_for(node: TreeNode, values: np.ndarray) -> TreeNode:
    while not node.is_leaf:
        column = ATTRIBUTES.index(node.attribute)
        node = node.left if values[column] <= node.threshold else node.right
    return node


def c45_predict(t: DecisionTree, s: SoilSample) -> ClassDistribution:
    return ClassDistribution(tuple(_leaf_for(t.root, s.as_array()).distribution()))


def c45_predict_proba(t: DecisionTree, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float).reshape(-1, len(ATTRIBUTES))
    out = np.empty((X.shape[0], N_CLASSES), dtype=float)
    _route(t.root, X, np.arange(X.shape[0]), out)
    return out


def _route(node: TreeNode, X: np.ndarray, rows: np.ndarray, out: np.ndarray) -> None:
    if rows.size == 0:
        return
    if node.is_leaf:
        out[rows] = node.distribution()
        return
    goes_left = X[rows, ATTRIBUTES.index(node.attribute)] <= node.threshold
    _route(node.left, X, rows[goes_left], out)
    _route(node.right, X, rows[~goes_left], out)


# =============================================================================
# RENDERING AND SERIALIZATION
# =============================================================================

def tree_to_text(t: DecisionTree) -> str:
    """Indented if/else listing; leaves show 'class (count/errors)'."""
    if t.root.is_leaf:
        return f": {_leaf_text(t.root)}"
    lines: list[str] = []
    _render(t.root, 0, lines)
    return "\n".join(lines)


def _leaf_text(node: TreeNode) -> str:
    errors = node.n - max(node.counts)
    return f"{CLASS_LABELS[int(node.majority)]} ({node.n}/{errors})"


def _render(node: TreeNode, depth: int, lines: list[str]) -> None:
    prefix = "|   " * depth
    for op, child in (("<=", node.left), (">", node.right)):
        head = f"{prefix}{node.attribute} {op} {node.threshold:g}"
        if child.is_leaf:
            lines.append(f"{head}: {_leaf_text(child)}")
        else:
            lines.append(head)
            _render(child, depth + 1, lines)


def node_to_dict(node: TreeNode) -> dict:
    if node.is_leaf:
        return {"counts": list(node.counts), "error_estimate": node.error_estimate}
    return {
        "counts": list(node.counts),
        "error_estimate": node.error_estimate,
        "attribute": node.attribute,
        "threshold": node.threshold,
        "left": node_to_dict(node.left),
        "right": node_to_dict(node.right),
    }


def node_from_dict(payload: dict) -> TreeNode:
    try:
        counts = tuple(int(c) for c in payload["counts"])
        if len(counts) != N_CLASSES or any(c < 0 for c in counts):
            raise InvalidModel("tree node counts must be 6 non-negative integers")
        if "attribute" not in payload:
            return TreeNode(counts, float(payload["error_estimate"]))
        if payload["attribute"] not in ATTRIBUTES:
            raise InvalidModel(f"tree node references unknown attribute {payload['attribute']!r}")
        threshold = float(payload["threshold"])
        if not math.isfinite(threshold):
            raise InvalidModel("tree thresholds must be finite")
        return TreeNode(
            counts,
            float(payload["error_estimate"]),
            payload["attribute"],
            threshold,
            node_from_dict(payload["left"]),
            node_from_dict(payload["right"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel(f"malformed tree node: {exc}") from None


def model_to_dict(t: DecisionTree) -> dict:
    return {"params": dict(t.params), "root": node_to_dict(t.root)}


def model_from_dict(payload: dict) -> DecisionTree:
    if "root" not in payload:
        raise InvalidModel("tree document lacks 'root'")
    return DecisionTree(node_from_dict(payload["root"]), dict(payload.get("params", DEFAULT_C45_PARAMS)))

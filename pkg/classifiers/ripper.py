"""
RIPPER Rule Learner
===================
Ordered rule list learned class by class with incremental reduced-error
pruning and description-length (MDL) control.

Algorithm:
    1. Order the present classes by ascending frequency (ties: lower level
       first). The most frequent class becomes the default.
    2. For each other class, with the instances not yet covered by earlier
       classes' rules:
         - shuffle positives and negatives with the seeded generator and hold
           out 1/folds of each as prune data;
         - grow a rule on the rest by adding the numeric condition
           (attr <= v or attr >= v) with the best FOIL gain until it covers
           no negatives or nothing improves;
         - keep the rule prefix maximising (p - n) / (p + n) on prune data;
         - stop when the grown rule is empty, its prune error exceeds 50%,
           or the ruleset's description length passes the best seen + 64 bits.
    3. Each optimisation pass builds a replacement and a revision of every
       rule and keeps whichever variant gives the smallest total description
       length, then covers any positives left and drops rules whose removal
       shortens the description.

Deterministic for a fixed (dataset, params); `seed` only drives the
grow/prune shuffles.

Design:
    Conditions are thresholds at midpoints between consecutive distinct
    values in the rows still covered, ties resolved by attribute order,
    then <= before >=, then the smaller value. Replacement and revision
    variants are pruned with the same prefix metric as fresh rules.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from classifiers.distribution import ClassDistribution, laplace, normalize
from soil_errors import EmptyDataset, InvalidConfig, InvalidModel, UnlabeledDataset
from soil_schema import ATTRIBUTES, CLASS_LABELS, LABEL_COLUMN, N_CLASSES, Dataset, FertilityClass, SoilSample

logger = logging.getLogger(__name__)


# =============================================================================
# DEFAULT CONFIGURATION
# =============================================================================

DEFAULT_RIPPER_PARAMS = {
    "folds": 3,
    "optimizations": 2,
    "seed": 1,
}

MAX_DL_SURPLUS = 64.0
MAX_PRUNE_ERROR = 0.5
THEORY_WEIGHT = 0.5
EXPECTED_FP_SHARE = 0.5

OPERATORS = ("<=", ">=")


# =============================================================================
# TYPE DEFINITIONS
# =============================================================================

@dataclass(frozen=True)
class Condition:
    attribute: str
    op: str
    value: float

    @property
    def column(self) -> int:
        return ATTRIBUTES.index(self.attribute)

    def covers(self, X: np.ndarray) -> np.ndarray:
        values = X[:, self.column]
        return values <= self.value if self.op == "<=" else values >= self.value

    def __str__(self) -> str:
        return f"({self.attribute} {self.op} {self.value:g})"


@dataclass(frozen=True)
class RipperRule:
    """
    conditions -> predicted. covered_counts is the class histogram of the
    training instances this rule fires on under first-match semantics.
    """

    conditions: tuple[Condition, ...]
    predicted: FertilityClass
    covered_counts: tuple[int, ...] = (0,) * N_CLASSES

    @property
    def coverage(self) -> int:
        return int(sum(self.covered_counts))

    @property
    def true_positives(self) -> int:
        return int(self.covered_counts[int(self.predicted)])

    def covers(self, X: np.ndarray) -> np.ndarray:
        return _covers(self.conditions, X)

    def distribution(self) -> np.ndarray:
        """Laplace precision on the predicted class, the rest spread by training counts."""
        target = int(self.predicted)
        confidence = (self.true_positives + 1.0) / (self.coverage + 2.0)
        others = np.asarray(self.covered_counts, dtype=float) + 1.0
        others[target] = 0.0
        dist = (1.0 - confidence) * others / others.sum()
        dist[target] = confidence
        return normalize(dist)


@dataclass(frozen=True)
class RuleList:
    rules: tuple[RipperRule, ...]
    default_class: FertilityClass
    default_counts: tuple[int, ...]
    params: dict

    def default_distribution(self) -> np.ndarray:
        return laplace(np.asarray(self.default_counts, dtype=float))


def _covers(conditions, X: np.ndarray) -> np.ndarray:
    mask = np.ones(X.shape[0], dtype=bool)
    for condition in conditions:
        mask &= condition.covers(X)
    return mask


# =============================================================================
# DESCRIPTION LENGTH
# =============================================================================

def subset_dl(total: float, chosen: float, p: float) -> float:
    """Bits to pick `chosen` of `total` items when each is picked with probability p."""
    bits = 0.0
    if chosen > 0:
        bits -= chosen * math.log2(p) if p > 0 else -math.inf
    if total - chosen > 0:
        bits -= (total - chosen) * math.log2(1.0 - p) if p < 1 else -math.inf
    return bits


def theory_dl(k: int, num_all_conditions: float) -> float:
    if k == 0:
        return 0.0
    k_bits = math.log2(k)
    if k > 1:
        k_bits += 2.0 * math.log2(k_bits)
    return THEORY_WEIGHT * (k_bits + subset_dl(num_all_conditions, k, k / num_all_conditions))


def data_dl(cover: float, uncover: float, fp: float, fn: float) -> float:
    total_bits = math.log2(cover + uncover + 1.0)
    if cover > uncover:
        expected_errors = EXPECTED_FP_SHARE * (fp + fn)
        cover_bits = subset_dl(cover, fp, expected_errors / cover)
        uncover_bits = subset_dl(uncover, fn, fn / uncover) if uncover > 0 else 0.0
    else:
        expected_errors = (1.0 - EXPECTED_FP_SHARE) * (fp + fn)
        cover_bits = subset_dl(cover, fp, fp / cover) if cover > 0 else 0.0
        uncover_bits = subset_dl(uncover, fn, expected_errors / uncover) if uncover > 0 else 0.0
    return total_bits + cover_bits + uncover_bits


def ruleset_dl(rules: list, X: np.ndarray, is_pos: np.ndarray, num_all_conditions: float) -> float:
    """Theory bits of every rule plus the bits for the ruleset's exceptions."""
    covered = np.zeros(X.shape[0], dtype=bool)
    theory = 0.0
    for conditions in rules:
        covered |= _covers(conditions, X)
        theory += theory_dl(len(conditions), num_all_conditions)
    cover = float(covered.sum())
    fp = float((covered & ~is_pos).sum())
    fn = float((~covered & is_pos).sum())
    return theory + data_dl(cover, X.shape[0] - cover, fp, fn)


# =============================================================================
# GROW AND PRUNE
# =============================================================================

def split_grow_prune(is_pos: np.ndarray, folds: int, rng: np.random.Generator):
    """Boolean (grow, prune) masks; 1/folds of positives and of negatives go to prune."""
    prune = np.zeros(is_pos.shape[0], dtype=bool)
    for group in (np.flatnonzero(is_pos), np.flatnonzero(~is_pos)):
        shuffled = rng.permutation(group)
        prune[shuffled[: group.shape[0] // folds]] = True
    return ~prune, prune


def best_condition(X: np.ndarray, is_pos: np.ndarray) -> Optional[Condition]:
    """Highest positive FOIL-gain condition over the rows given, or None."""
    P = float(is_pos.sum())
    N = float(is_pos.shape[0]) - P
    if P == 0:
        return None
    base = math.log2(P / (P + N))

    best: Optional[Condition] = None
    best_gain = 0.0
    for col in range(X.shape[1]):
        order = np.argsort(X[:, col], kind="stable")
        xs = X[order, col]
        pos = is_pos[order]
        boundary = xs[:-1] < xs[1:]
        if not boundary.any():
            continue
        cum_pos = np.cumsum(pos)[:-1].astype(float)
        cum_neg = np.cumsum(~pos)[:-1].astype(float)
        mids = (xs[:-1] + xs[1:]) / 2.0

        for op in OPERATORS:
            if op == "<=":
                p, n = cum_pos, cum_neg
                values = np.where(mids < xs[1:], mids, xs[:-1])
            else:
                p, n = P - cum_pos, N - cum_neg
                values = np.where(mids > xs[:-1], mids, xs[1:])
            with np.errstate(divide="ignore", invalid="ignore"):
                gain = np.where(p > 0, p * (np.log2(p / (p + n)) - base), 0.0)
            gain = np.where(boundary, gain, -np.inf)
            i = int(np.argmax(gain))
            if gain[i] > best_gain:
                best_gain = float(gain[i])
                best = Condition(ATTRIBUTES[col], op, float(values[i]))
    return best


def grow_rule(X: np.ndarray, is_pos: np.ndarray, start: tuple = ()) -> tuple[Condition, ...]:
    conditions = list(start)
    covered = _covers(conditions, X)
    while (covered & ~is_pos).any():
        condition = best_condition(X[covered], is_pos[covered])
        if condition is None:
            break
        conditions.append(condition)
        covered &= condition.covers(X)
    return tuple(conditions)


def prune_rule(conditions: tuple, X: np.ndarray, is_pos: np.ndarray) -> tuple[Condition, ...]:
    """Shortest prefix maximising (p - n) / (p + n) on the prune rows."""
    if X.shape[0] == 0 or len(conditions) <= 1:
        return conditions
    best_length, best_value = len(conditions), -math.inf
    covered = np.ones(X.shape[0], dtype=bool)
    for length, condition in enumerate(conditions, start=1):
        covered &= condition.covers(X)
        p = float((covered & is_pos).sum())
        n = float((covered & ~is_pos).sum())
        value = (p - n) / (p + n) if p + n > 0 else -math.inf
        if value > best_value:
            best_length, best_value = length, value
    return tuple(conditions[:best_length])


def prune_error(conditions: tuple, X: np.ndarray, is_pos: np.ndarray) -> float:
    covered = _covers(conditions, X)
    total = float(covered.sum())
    return float((covered & ~is_pos).sum()) / total if total > 0 else 0.0


# =============================================================================
# TRAINING
# =============================================================================

class _ClassLearner:
    """Rule induction for one target class against all remaining instances."""

    def __init__(self, X, is_pos, num_all_conditions, folds, rng):
        self.X = X
        self.is_pos = is_pos
        self.num_all_conditions = num_all_conditions
        self.folds = folds
        self.rng = rng

    def dl(self, rules: list) -> float:
        return ruleset_dl(rules, self.X, self.is_pos, self.num_all_conditions)

    def _grow_and_prune(self, rows: np.ndarray, start: tuple = ()):
        X, is_pos = self.X[rows], self.is_pos[rows]
        grow, prune = split_grow_prune(is_pos, self.folds, self.rng)
        grown = grow_rule(X[grow], is_pos[grow], start)
        pruned = prune_rule(grown, X[prune], is_pos[prune])
        return pruned, prune_error(pruned, X[prune], is_pos[prune])

    def cover(self, rules: list) -> list:
        """Add rules until the positives are covered or a stopping test fires."""
        best_dl = self.dl(rules)
        uncovered = ~self._covered(rules)
        while (uncovered & self.is_pos).any():
            rows = np.flatnonzero(uncovered)
            conditions, error = self._grow_and_prune(rows)
            if not conditions or error > MAX_PRUNE_ERROR:
                break
            candidate = rules + [conditions]
            dl = self.dl(candidate)
            if dl > best_dl + MAX_DL_SURPLUS:
                break
            rules = candidate
            best_dl = min(best_dl, dl)
            uncovered &= ~_covers(conditions, self.X)
        return rules

    def optimize(self, rules: list) -> list:
        for i in range(len(rules)):
            rows = np.flatnonzero(~self._covered(rules[:i]))
            if not self.is_pos[rows].any():
                continue
            replacement, _ = self._grow_and_prune(rows)
            revision, _ = self._grow_and_prune(rows, start=rules[i])
            best, best_dl = rules[i], self.dl(rules)
            for variant in (replacement, revision):
                if not variant:
                    continue
                dl = self.dl(rules[:i] + [variant] + rules[i + 1:])
                if dl < best_dl:
                    best, best_dl = variant, dl
            rules = rules[:i] + [best] + rules[i + 1:]
        return rules

    def reduce(self, rules: list) -> list:
        """Drop rules, last to first, whose removal shortens the description."""
        for i in range(len(rules) - 1, -1, -1):
            without = rules[:i] + rules[i + 1:]
            if self.dl(without) < self.dl(rules):
                rules = without
        return rules

    def _covered(self, rules: list) -> np.ndarray:
        covered = np.zeros(self.X.shape[0], dtype=bool)
        for conditions in rules:
            covered |= _covers(conditions, self.X)
        return covered


def _resolve_params(params: Optional[dict]) -> dict:
    resolved = dict(DEFAULT_RIPPER_PARAMS)
    resolved.update(params or {})
    for name, minimum in (("folds", 2), ("optimizations", 0), ("seed", 0)):
        value = resolved[name]
        if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < minimum:
            raise InvalidConfig(name, f"must be an integer >= {minimum}, got {value!r}")
        resolved[name] = int(value)
    return resolved


def class_order(codes: np.ndarray) -> list[int]:
    """Present classes by ascending frequency; ties put the lower level first."""
    counts = np.bincount(codes, minlength=N_CLASSES)
    present = [level for level in range(N_CLASSES) if counts[level] > 0]
    return sorted(present, key=lambda level: (counts[level], level))


def train_ripper(d: Dataset, params: Optional[dict] = None) -> RuleList:
    if d.labels is None:
        raise UnlabeledDataset()
    if len(d) == 0:
        raise EmptyDataset()
    resolved = _resolve_params(params)

    X = np.asarray(d.values, dtype=float)
    codes = np.asarray(d.y)
    rng = np.random.Generator(np.random.PCG64(resolved["seed"]))
    num_all_conditions = float(sum(2 * np.unique(X[:, col]).size for col in range(X.shape[1])))

    order = class_order(codes)
    default_class = FertilityClass(order[-1])
    remaining = np.ones(X.shape[0], dtype=bool)
    learned: list[tuple[tuple[Condition, ...], int]] = []

    for level in order[:-1]:
        rows = np.flatnonzero(remaining)
        learner = _ClassLearner(X[rows], codes[rows] == level, num_all_conditions, resolved["folds"], rng)
        rules = learner.cover([])
        for _ in range(resolved["optimizations"]):
            rules = learner.optimize(rules)
            rules = learner.cover(rules)
            rules = learner.reduce(rules)
        logger.debug("RIPPER: %d rule(s) for %s", len(rules), CLASS_LABELS[level])

        for conditions in rules:
            learned.append((conditions, level))
            remaining[rows[_covers(conditions, X[rows])]] = False

    return _with_statistics(learned, default_class, X, codes, resolved)


def _with_statistics(learned, default_class, X, codes, params) -> RuleList:
    """Attach first-match coverage counts over the full training data."""
    uncovered = np.ones(X.shape[0], dtype=bool)
    rules = []
    for conditions, level in learned:
        fired = _covers(conditions, X) & uncovered
        counts = np.bincount(codes[fired], minlength=N_CLASSES)
        rules.append(RipperRule(conditions, FertilityClass(level), tuple(int(c) for c in counts)))
        uncovered &= ~fired
    default_counts = np.bincount(codes[uncovered], minlength=N_CLASSES)
    return RuleList(tuple(rules), default_class, tuple(int(c) for c in default_counts), params)


# =============================================================================
# PREDICTION
# =============================================================================

def first_match(r: RuleList, X: np.ndarray) -> np.ndarray:
    """Index of the rule firing on each row; -1 means the default."""
    fired = np.full(X.shape[0], -1, dtype=np.int64)
    for index, rule in enumerate(r.rules):
        fired[(fired < 0) & rule.covers(X)] = index
    return fired


def ripper_predict_proba(r: RuleList, X: np.ndarray) -> np.ndarray:
    X = np.asarray(X, dtype=float).reshape(-1, len(ATTRIBUTES))
    table = np.vstack([rule.distribution() for rule in r.rules] + [r.default_distribution()])
    return table[first_match(r, X)]


def ripper_predict(r: RuleList, s: SoilSample) -> ClassDistribution:
    return ClassDistribution(tuple(ripper_predict_proba(r, s.as_array())[0]))


# =============================================================================
# RENDERING AND SERIALIZATION
# =============================================================================

def rules_to_text(r: RuleList) -> str:
    """One rule per line as 'conditions => Fertility=Class (covered/errors)'."""
    lines = []
    for rule in r.rules:
        body = " and ".join(str(c) for c in rule.conditions)
        errors = rule.coverage - rule.true_positives
        lines.append(f"{body} => {LABEL_COLUMN}={rule.predicted.label} ({rule.coverage}/{errors})")
    default_total = sum(r.default_counts)
    default_errors = default_total - r.default_counts[int(r.default_class)]
    lines.append(f" => {LABEL_COLUMN}={r.default_class.label} ({default_total}/{default_errors})")
    return "\n".join(lines)


def model_to_dict(r: RuleList) -> dict:
    return {
        "params": dict(r.params),
        "default_class": int(r.default_class),
        "default_counts": list(r.default_counts),
        "rules": [
            {
                "conditions": [[c.attribute, c.op, c.value] for c in rule.conditions],
                "predicted": int(rule.predicted),
                "covered_counts": list(rule.covered_counts),
            }
            for rule in r.rules
        ],
    }


def model_from_dict(payload: dict) -> RuleList:
    try:
        rules = []
        for raw in payload["rules"]:
            conditions = []
            for attribute, op, value in raw["conditions"]:
                if attribute not in ATTRIBUTES or op not in OPERATORS:
                    raise InvalidModel(f"bad rule condition {attribute!r} {op!r}")
                conditions.append(Condition(attribute, op, float(value)))
            counts = tuple(int(c) for c in raw["covered_counts"])
            if len(counts) != N_CLASSES:
                raise InvalidModel("rule coverage needs 6 class counts")
            rules.append(RipperRule(tuple(conditions), FertilityClass(int(raw["predicted"])), counts))
        default_counts = tuple(int(c) for c in payload["default_counts"])
        if len(default_counts) != N_CLASSES:
            raise InvalidModel("default coverage needs 6 class counts")
        return RuleList(
            tuple(rules),
            FertilityClass(int(payload["default_class"])),
            default_counts,
            dict(payload.get("params", DEFAULT_RIPPER_PARAMS)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidModel(f"malformed rule list: {exc}") from None

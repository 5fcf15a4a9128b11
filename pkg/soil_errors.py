"""
Soil Toolkit Errors
===================
One exception hierarchy for every module in the toolkit.

Categories map onto CLI exit codes:
    - UsageError        -> exit 2
    - SoilToolkitError  -> exit 3 (data, rule file, model, evaluation)
    - anything else     -> exit 4 (internal invariant broken)

Every error keeps its located fields (row, column, fold, ...) as attributes
so callers can inspect them without parsing messages.
"""

from typing import Optional


class SoilToolkitError(Exception):
    """Base class for all expected toolkit failures."""


class UsageError(SoilToolkitError):
    """Bad command-line flags or an invalid RunConfig."""


# =============================================================================
# DATA ERRORS
# =============================================================================

class DataError(SoilToolkitError):
    """Input data could not be turned into a valid Dataset."""


class MissingColumn(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"missing required column '{column}'")


class BadValue(DataError):
    """Unparsable or invariant-violating cell. `row` is 1-based over data rows."""

    def __init__(self, row: int, column: str, value: object = None, reason: str = ""):
        self.row = row
        self.column = column
        self.value = value
        detail = f": {reason}" if reason else ""
        super().__init__(f"bad value {value!r} at row {row}, column {column}{detail}")


class MalformedFile(DataError):
    """File structure is unreadable. `line` is the 1-based file line when known."""

    def __init__(self, source: str, reason: str, line: Optional[int] = None):
        self.source = source
        self.line = line
        where = f" at line {line}" if line is not None else ""
        super().__init__(f"{source}{where}: {reason}")


class MissingLabel(DataError):
    def __init__(self, message: str = "dataset has no Fertility column"):
        super().__init__(message)


class MissingValue(DataError):
    def __init__(self, row: int, column: str):
        self.row = row
        self.column = column
        super().__init__(f"missing value at row {row}, column {column}")


class EmptyColumn(DataError):
    def __init__(self, column: str):
        self.column = column
        super().__init__(f"column {column} has no observed values")


class EmptyDataset(DataError):
    def __init__(self, message: str = "dataset has no rows"):
        super().__init__(message)


class InvalidConfig(DataError):
    def __init__(self, field: str, reason: str):
        self.field = field
        super().__init__(f"invalid config field '{field}': {reason}")


# =============================================================================
# RULE FILE ERRORS
# =============================================================================

class RuleFileError(DataError):
    """Rule document is malformed or violates RuleSet invariants."""


class RuleSyntaxError(RuleFileError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"rule file syntax error at line {line}: {message}")


class UnknownAttribute(RuleFileError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown attribute '{name}'")


class DuplicateAttribute(RuleFileError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"more than one rule for attribute '{name}'")


class BandsNotAscending(RuleFileError):
    def __init__(self, attribute: str, reason: str = "band bounds must be strictly ascending"):
        self.attribute = attribute
        super().__init__(f"rule for {attribute}: {reason}")


class BadCuts(RuleFileError):
    def __init__(self, reason: str):
        super().__init__(f"bad class cuts: {reason}")


# =============================================================================
# MODEL ERRORS
# =============================================================================

class ModelError(SoilToolkitError):
    """Training or model-document failure."""


class AllZero(ModelError):
    def __init__(self):
        super().__init__("class counts contain no positive entry")


class DegenerateSplit(ModelError):
    def __init__(self, attribute: str, threshold: float):
        self.attribute = attribute
        self.threshold = threshold
        super().__init__(f"split {attribute} <= {threshold} leaves one side empty")


class TooFewRows(ModelError):
    def __init__(self, needed: int, got: int):
        self.needed = needed
        self.got = got
        super().__init__(f"need at least {needed} rows, got {got}")


class NonFiniteTarget(ModelError):
    def __init__(self, target: str):
        self.target = target
        super().__init__(f"target column {target} contains non-finite values")


class InvalidModel(ModelError):
    def __init__(self, reason: str):
        super().__init__(f"invalid model document: {reason}")


# =============================================================================
# EVALUATION ERRORS
# =============================================================================

class EvaluationError(SoilToolkitError):
    """Cross-validation or metric failure."""


class BadK(EvaluationError):
    def __init__(self, k: int, n: int):
        self.k = k
        self.n = n
        super().__init__(f"fold count k={k} must satisfy 2 <= k <= {n}")


class UnlabeledDataset(EvaluationError):
    def __init__(self):
        super().__init__("operation needs a labeled dataset")


class EmptyMatrix(EvaluationError):
    def __init__(self):
        super().__init__("confusion matrix is empty")


class LengthMismatch(EvaluationError):
    def __init__(self, left: int, right: int):
        self.left = left
        self.right = right
        super().__init__(f"length mismatch or empty input: {left} vs {right}")


class ZeroVariance(EvaluationError):
    def __init__(self, which: str):
        self.which = which
        super().__init__(f"{which} vector is constant; correlation undefined")


class DegenerateBaseline(EvaluationError):
    def __init__(self):
        super().__init__("actual values equal the baseline mean everywhere")


class MixedKinds(EvaluationError):
    def __init__(self, kinds: Optional[set] = None):
        self.kinds = kinds or set()
        super().__init__(f"cannot tabulate mixed or empty report kinds: {sorted(self.kinds)}")


class FoldError(EvaluationError):
    """Trainer failure inside one cross-validation fold."""

    def __init__(self, fold: int, cause: Exception):
        self.fold = fold
        self.cause = cause
        super().__init__(f"fold {fold}: {type(cause).__name__}: {cause}")

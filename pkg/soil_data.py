"""
Soil Data - CSV Ingestion, Imputation and Summaries
===================================================
Turns laboratory CSV exports into validated Datasets and back.

CSV Contract:
    - UTF-8, comma-separated, header row required.
    - Header names match Ph, EC, OC, P, K, Fe, Zn, Mn, Cu case-insensitively,
      plus an optional Fertility column.
    - Missing cells are empty or '?'.
    - Class tokens are exactly: Very Low | Low | Moderate | Moderately High |
      High | Very High.

Conventions:
    - Row numbers in errors are 1-based over data rows (the header is row 0).
    - Standard deviation is always the sample (n - 1) form; a single row
      reports 0.
"""

import logging
import re
from pathlib import Path
from typing import IO, Optional, TypedDict, Union

import numpy as np
import pandas as pd

from soil_errors import (
    BadValue,
    EmptyColumn,
    EmptyDataset,
    MalformedFile,
    MissingColumn,
    MissingLabel,
    MissingValue,
    UsageError,
)
from soil_schema import (
    ATTRIBUTES,
    CLASS_LABELS,
    LABEL_COLUMN,
    Dataset,
    FertilityClass,
    canonical_attribute,
    check_attribute_value,
)

logger = logging.getLogger(__name__)


MISSING_TOKENS = {"", "?"}

# pandas tokenizer message for a line longer than the header.
_FIELD_COUNT = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")

IMPUTE_STRATEGIES = ("reject", "column_mean")

# Decimal places written by write_csv; the round-trip contract refers to this.
CSV_PRECISION = 6


# =============================================================================
# TYPE DEFINITIONS
# =============================================================================

class AttributeSummary(TypedDict):
    min: float
    max: float
    mean: float
    stddev: float


class DatasetSummary(TypedDict):
    rows: int
    provenance: str
    attributes: dict[str, AttributeSummary]
    class_histogram: Optional[dict[str, int]]


# =============================================================================
# LOADING
# =============================================================================

def load_csv(
    path: Union[str, Path],
    require_labels: bool = False,
    strategy: str = "reject",
) -> Dataset:
    """
    Load and validate a soil CSV file.

    Args:
        path: CSV file with a header row.
        require_labels: Raise MissingLabel when the Fertility column is absent.
        strategy: Gap handling passed to impute_missing ("reject" or "column_mean").

    Returns:
        Dataset with rows in file order, gap-free after imputation.

    Raises:
        MalformedFile(line), MissingColumn, BadValue(row, col), MissingLabel,
        MissingValue, EmptyColumn.
    """
    path = Path(path)
    frame = _read_grid(path)
    header = [str(name) for name in frame.iloc[0]]
    body = frame.iloc[1:].reset_index(drop=True)

    column_map = _match_header(header)
    label_source = column_map.get(LABEL_COLUMN)
    if require_labels and label_source is None:
        raise MissingLabel(f"{path.name} has no {LABEL_COLUMN} column")

    values = np.empty((len(body), len(ATTRIBUTES)), dtype=float)
    for col, name in enumerate(ATTRIBUTES):
        source = body[column_map[name]]
        for row, cell in enumerate(source):
            values[row, col] = _parse_cell(cell, row + 1, name)

    labels = None
    if label_source is not None:
        labels = tuple(
            _parse_label(cell, row + 1) for row, cell in enumerate(body[label_source])
        )

    raw = Dataset(values, labels, provenance=f"csv:{path.name}")
    logger.info("Loaded %d rows from %s (labels: %s)", len(raw), path, labels is not None)
    return impute_missing(raw, strategy)


def _read_grid(path: Path) -> pd.DataFrame:
    """
    Read every line, header included, as strings in a fixed-width grid.

    Every line must carry exactly as many fields as the header. Longer lines
    fail in the tokenizer; shorter ones come back padded with NaN, which a
    present-but-empty cell never is (keep_default_na=False keeps it "").
    """
    try:
        frame = pd.read_csv(
            path,
            header=None,
            index_col=False,
            dtype=str,
            keep_default_na=False,
            skipinitialspace=True,
            on_bad_lines="error",
            encoding="utf-8",
        )
    except pd.errors.EmptyDataError:
        raise EmptyDataset(f"{path.name} is empty") from None
    except UnicodeDecodeError as exc:
        raise MalformedFile(path.name, f"not valid UTF-8 (byte offset {exc.start})") from None
    except pd.errors.ParserError as exc:
        match = _FIELD_COUNT.search(str(exc))
        if match is None:
            raise MalformedFile(path.name, str(exc)) from None
        expected, line, seen = (int(g) for g in match.groups())
        raise MalformedFile(
            path.name, f"expected {expected} fields, saw {seen}", line=line
        ) from None

    short = frame.isna().any(axis=1).to_numpy().nonzero()[0]
    if len(short):
        first = int(short[0])
        seen = int(frame.iloc[first].notna().sum())
        raise MalformedFile(
            path.name, f"expected {frame.shape[1]} fields, saw {seen}", line=first + 1
        )
    return frame


def _match_header(header: list[str]) -> dict[str, int]:
    """Map canonical names (and Fertility) to their column position in the header."""
    mapping: dict[str, int] = {}
    for column, name in enumerate(header):
        stripped = name.strip()
        canonical = canonical_attribute(stripped)
        if canonical is not None and canonical not in mapping:
            mapping[canonical] = column
        elif stripped.lower() == LABEL_COLUMN.lower() and LABEL_COLUMN not in mapping:
            mapping[LABEL_COLUMN] = column
    for name in ATTRIBUTES:
        if name not in mapping:
            raise MissingColumn(name)
    return mapping


def _parse_cell(cell: str, row: int, name: str) -> float:
    text = str(cell).strip()
    if text in MISSING_TOKENS:
        return float("nan")
    try:
        number = float(text)
    except ValueError:
        raise BadValue(row, name, text, "not a number") from None
    if np.isnan(number):
        # A literal 'nan' token is not a missing marker.
        raise BadValue(row, name, text, "not finite")
    return check_attribute_value(name, number, row)


def _parse_label(cell: str, row: int) -> FertilityClass:
    try:
        return FertilityClass.from_label(cell)
    except ValueError:
        raise BadValue(row, LABEL_COLUMN, cell, "unknown class token") from None


# =============================================================================
# WRITING
# =============================================================================

def write_csv(
    dataset: Dataset,
    target: Union[str, Path, IO[str]],
    precision: int = CSV_PRECISION,
) -> None:
    """Write a dataset in the canonical CSV layout with fixed decimals."""
    frame = dataset_frame(dataset)
    frame.to_csv(target, index=False, float_format=f"%.{precision}f", lineterminator="\n")


def dataset_frame(dataset: Dataset) -> pd.DataFrame:
    frame = pd.DataFrame(np.asarray(dataset.values), columns=list(ATTRIBUTES))
    if dataset.labels is not None:
        frame[LABEL_COLUMN] = [level.label for level in dataset.labels]
    return frame


# =============================================================================
# IMPUTATION
# =============================================================================

def impute_missing(dataset: Dataset, strategy: str = "reject") -> Dataset:
    """
    Resolve gaps (NaN cells) in a dataset.

    Strategies:
        - reject: raise MissingValue(row, col) at the first gap (row-major order).
        - column_mean: replace each gap with the mean of the column's observed values.

    A gap-free dataset is returned unchanged under either strategy.
    """
    if strategy not in IMPUTE_STRATEGIES:
        raise UsageError(f"unknown imputation strategy '{strategy}' (use {', '.join(IMPUTE_STRATEGIES)})")

    gaps = np.isnan(dataset.values)
    if not gaps.any():
        return dataset

    if strategy == "reject":
        row, col = (int(i) for i in np.argwhere(gaps)[0])
        raise MissingValue(row + 1, ATTRIBUTES[col])

    filled = np.array(dataset.values, dtype=float)
    for col, name in enumerate(ATTRIBUTES):
        column_gaps = gaps[:, col]
        if not column_gaps.any():
            continue
        observed = filled[~column_gaps, col]
        if observed.size == 0:
            raise EmptyColumn(name)
        filled[column_gaps, col] = observed.mean()
        logger.warning("Imputed %d gap(s) in %s with column mean %.4f", int(column_gaps.sum()), name, observed.mean())

    return dataset.with_values(filled)


# =============================================================================
# SUMMARY
# =============================================================================

def dataset_summary(dataset: Dataset) -> DatasetSummary:
    """Per-attribute min/max/mean/sample stddev plus the class histogram."""
    if len(dataset) == 0:
        raise EmptyDataset()

    values = np.asarray(dataset.values, dtype=float)
    ddof = 1 if len(dataset) > 1 else 0
    attributes: dict[str, AttributeSummary] = {}
    for col, name in enumerate(ATTRIBUTES):
        column = values[:, col]
        attributes[name] = {
            "min": float(column.min()),
            "max": float(column.max()),
            "mean": float(column.mean()),
            "stddev": float(column.std(ddof=ddof)),
        }

    histogram = None
    if dataset.labels is not None:
        counts = np.bincount(dataset.y, minlength=len(CLASS_LABELS))
        histogram = {label: int(count) for label, count in zip(CLASS_LABELS, counts)}

    return {
        "rows": len(dataset),
        "provenance": dataset.provenance,
        "attributes": attributes,
        "class_histogram": histogram,
    }

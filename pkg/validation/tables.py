"""
validation/tables.py

Comparison tables (one column per algorithm, one row per metric) and the
actual/predicted/error listing, rendered as aligned text, CSV or JSON.

Formatting:
    percentages  2 decimals + '%'
    MAE, r       4 decimals
    time         2 decimals + ' s', or '-' when timing was not recorded
JSON carries the unformatted report values plus `schema_version`.
"""

import json
from typing import Optional, Sequence

import pandas as pd

from soil_errors import EmptyDataset, MixedKinds, UsageError
from validation.runner import REPORT_SCHEMA_VERSION, EvaluationReport, RegressionReport, Report

FORMATS = ("text", "csv", "json")

TIME_ROW = "Time taken to build the model"

CLASSIFICATION_ROWS = (
    TIME_ROW,
    "Correctly Classified Instances",
    "Incorrectly Classified Instances",
    "Accuracy",
    "Error Rate",
    "Mean Absolute Error",
    "Weighted TP Rate",
    "Weighted FP Rate",
)

REGRESSION_ROWS = (
    TIME_ROW,
    "Relative Absolute Error",
    "Correlation Coefficient",
    "Mean Absolute Error",
    "Root Mean Squared Error",
    "Root Relative Squared Error",
)


def format_percent(fraction_or_percent: float, already_percent: bool = False) -> str:
    value = fraction_or_percent if already_percent else 100.0 * fraction_or_percent
    return f"{value:.2f}%"


def format_time(seconds: Optional[float]) -> str:
    return "-" if seconds is None else f"{seconds:.2f} s"


def _classification_column(r: EvaluationReport) -> list[str]:
    return [
        format_time(r.build_time_s),
        str(r.correct),
        str(r.incorrect),
        format_percent(r.accuracy),
        format_percent(r.error_rate),
        f"{r.mae:.4f}",
        f"{r.weighted_tpr:.4f}",
        f"{r.weighted_fpr:.4f}",
    ]


def _regression_column(r: RegressionReport) -> list[str]:
    return [
        format_time(r.build_time_s),
        f"{r.correlation:.4f}",
        format_percent(r.rae_percent, already_percent=True),
        f"{r.mae:.4f}",
        f"{r.rmse:.4f}",
        format_percent(r.rrse_percent, already_percent=True),
    ]


def report_kind(reports: Sequence[Report]) -> str:
    kinds = {r.kind for r in reports}
    if len(kinds) != 1:
        raise MixedKinds(kinds)
    return kinds.pop()


def comparison_frame(reports: Sequence[Report]) -> pd.DataFrame:
    kind = report_kind(reports)
    if kind == "classification":
        rows, column = CLASSIFICATION_ROWS, _classification_column
    else:
        rows, column = REGRESSION_ROWS, _regression_column
    frame = pd.DataFrame({r.display_name: column(r) for r in reports}, index=list(rows))
    frame.index.name = "Metric"
    return frame


def comparison_document(reports: Sequence[Report]) -> dict:
    return {
        "schema_version": REPORT_SCHEMA_VERSION,
        "kind": report_kind(reports),
        "reports": [r.to_dict() for r in reports],
    }


def compare_table(reports: Sequence[Report], fmt: str = "text") -> str:
    """Render reports of one kind side by side. Raises MixedKinds."""
    if fmt not in FORMATS:
        raise UsageError(f"unknown format '{fmt}' (use {', '.join(FORMATS)})")
    if fmt == "json":
        return json.dumps(comparison_document(reports), indent=2) + "\n"
    frame = comparison_frame(reports)
    if fmt == "csv":
        return frame.to_csv(lineterminator="\n")
    return frame.to_string() + "\n" + protocol_line(reports) + "\n"


def protocol_line(reports: Sequence[Report]) -> str:
    runs = sorted({(r.k, r.seed) for r in reports})
    return "; ".join(f"{k}-fold cross-validation, seed {seed}" for k, seed in runs)


# =============================================================================
# PREDICTION LISTING
# =============================================================================

def prediction_error(actual: float, predicted: float) -> float:
    """predicted - actual at 3 decimals; + 0.0 turns -0.0 into 0.0."""
    return round(predicted - actual, 3) + 0.0


def listing_rows(pairs: Sequence[tuple[float, float]]) -> list[dict]:
    if len(pairs) == 0:
        raise EmptyDataset("prediction listing needs at least one (actual, predicted) pair")
    return [
        {"actual": float(a), "predicted": float(p), "error": prediction_error(float(a), float(p))}
        for a, p in pairs
    ]


def render_prediction_listing(pairs: Sequence[tuple[float, float]], fmt: str = "text") -> str:
    """Actual / Predicted / Error table, error = predicted - actual."""
    rows = listing_rows(pairs)
    if fmt == "json":
        return json.dumps(rows, indent=2) + "\n"
    frame = pd.DataFrame(
        {
            "Actual": [f"{row['actual']:.3f}" for row in rows],
            "Predicted": [f"{row['predicted']:.3f}" for row in rows],
            "Error": [f"{row['error']:.3f}" for row in rows],
        }
    )
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n")
    if fmt == "text":
        return frame.to_string(index=False) + "\n"
    raise UsageError(f"unknown format '{fmt}' (use {', '.join(FORMATS)})")

"""
Soil CLI - Pipeline Entry Point
===============================
Wires the toolkit end to end:

    synth    -> write a seeded synthetic CSV
    label    -> apply a rule file, optionally inject label noise
    compare  -> cross-validate classifiers, print the comparison table
    predict  -> cross-validate regressors for an untested attribute,
                plus an actual / predicted / error listing
    summary  -> per-attribute statistics and the class histogram
    targets  -> rank every attribute by how well the others predict it

Configuration:
    Flags override environment variables, which override built-in defaults.
    The environment is read through python-dotenv, so a local .env works:
        SOIL_SEED, SOIL_FOLDS, SOIL_RULES, SOIL_JOBS, SOIL_LOG_LEVEL,
        SOIL_REPORT_TIMING

Exit Codes:
    0 success | 2 usage | 3 data / model / evaluation error | 4 internal error
"""

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import pandas as pd
from dotenv import load_dotenv

import model_store
from classifiers import get_classifier
from fertility_rules import DEFAULT_RULES_PATH, explain_sample, label_dataset, load_rules
from regressors import get_regressor
from regressors.linear_model import resolve_target
from soil_data import IMPUTE_STRATEGIES, dataset_summary, load_csv, write_csv
from soil_errors import InvalidConfig, SoilToolkitError, UsageError
from soil_schema import Dataset
from synthetic_generator import DEFAULT_ROWS, SynthConfig, generate_synthetic, inject_label_noise
from validation.runner import (
    DEFAULT_FOLDS,
    DEFAULT_SEED,
    cross_validate_classifier,
    cross_validate_regressor,
    rank_predictable_attributes,
)
from validation.tables import (
    FORMATS,
    compare_table,
    comparison_document,
    listing_rows,
    render_prediction_listing,
)

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(levelname)s - %(message)s"

COMMANDS = ("synth", "label", "compare", "predict", "summary", "targets")
DEFAULT_CLASSIFIERS = ("nb", "c45", "ripper")
DEFAULT_REGRESSORS = ("ols", "lms", "simple")
DEFAULT_LISTING_ROWS = 11

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DATA = 3
EXIT_INTERNAL = 4


# =============================================================================
# RUN CONFIGURATION
# =============================================================================

@dataclass(frozen=True)
class RunConfig:
    """One validated CLI invocation."""

    command: str
    data: Optional[Path] = None
    out: Optional[Path] = None
    rules: Path = DEFAULT_RULES_PATH
    k: int = DEFAULT_FOLDS
    seed: int = DEFAULT_SEED
    target: str = "P"
    algorithms: tuple[str, ...] = ()
    fmt: str = "text"
    n: int = DEFAULT_ROWS
    noise: float = 0.0
    jobs: int = 1
    timing: bool = False
    impute: str = "reject"
    select: bool = True
    models: Optional[Path] = None
    listing: int = DEFAULT_LISTING_ROWS
    explain: bool = False

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command '{self.command}' (use {', '.join(COMMANDS)})")
        if self.command != "synth" and self.data is None:
            raise UsageError(f"'{self.command}' needs --data")
        if self.fmt not in FORMATS:
            raise UsageError(f"unknown format '{self.fmt}' (use {', '.join(FORMATS)})")
        if self.k < 2:
            raise UsageError(f"--k must be >= 2, got {self.k}")
        if not 0 <= self.seed < 2**64:
            raise UsageError("--seed must be a 64-bit unsigned integer")
        if self.n < 1:
            raise UsageError(f"--n must be >= 1, got {self.n}")
        if not 0 <= self.noise < 1:
            raise UsageError(f"--noise must lie in [0, 1), got {self.noise}")
        if self.jobs < 1:
            raise UsageError(f"--jobs must be >= 1, got {self.jobs}")
        if self.listing < 0:
            raise UsageError(f"--listing must be >= 0, got {self.listing}")
        if self.impute not in IMPUTE_STRATEGIES:
            raise UsageError(f"--impute must be one of {', '.join(IMPUTE_STRATEGIES)}")
        if self.explain and (self.command != "label" or self.out is None):
            raise UsageError("--explain needs the label command with --out")
        try:
            object.__setattr__(self, "target", resolve_target(self.target))
        except InvalidConfig:
            raise UsageError(f"unknown target attribute '{self.target}'") from None

        lookup = get_classifier if self.command == "compare" else get_regressor
        if self.command in ("compare", "predict", "targets"):
            if not self.algorithms:
                defaults = {"compare": DEFAULT_CLASSIFIERS, "predict": DEFAULT_REGRESSORS, "targets": ("ols",)}
                object.__setattr__(self, "algorithms", defaults[self.command])
            names = tuple(lookup(name).name for name in self.algorithms)
            if len(set(names)) != len(names):
                raise UsageError("--algorithms lists an algorithm twice")
            object.__setattr__(self, "algorithms", names)


# =============================================================================
# ARGUMENT PARSING
# =============================================================================

class SoilArgumentParser(argparse.ArgumentParser):
    """argparse that raises UsageError instead of exiting."""

    def error(self, message):
        raise UsageError(message)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"environment variable {name} must be an integer, got '{raw}'") from None


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "false").strip().lower() in ("1", "true", "yes", "on")


def build_parser() -> SoilArgumentParser:
    parser = SoilArgumentParser(prog="soil_cli", description="Soil fertility data-mining toolkit")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--data", type=Path, help="input CSV")
    parser.add_argument("--out", type=Path, help="output file (default: stdout)")
    parser.add_argument("--rules", type=Path, default=Path(os.environ.get("SOIL_RULES", DEFAULT_RULES_PATH)))
    parser.add_argument("--format", dest="fmt", choices=FORMATS, default="text")
    parser.add_argument("--k", type=int, default=_env_int("SOIL_FOLDS", DEFAULT_FOLDS))
    parser.add_argument("--seed", type=int, default=_env_int("SOIL_SEED", DEFAULT_SEED))
    parser.add_argument("--target", default="P")
    parser.add_argument("--algorithms", default="", help="comma-separated tags, e.g. nb,c45,ripper or ols,lms,simple")
    parser.add_argument("--n", type=int, default=DEFAULT_ROWS)
    parser.add_argument("--noise", type=float, default=0.0, help="label noise fraction (label)")
    parser.add_argument("--jobs", type=int, default=_env_int("SOIL_JOBS", 1))
    parser.add_argument("--timing", action="store_true", default=_env_flag("SOIL_REPORT_TIMING"))
    parser.add_argument("--impute", choices=IMPUTE_STRATEGIES, default="reject")
    parser.add_argument("--no-select", dest="select", action="store_false", help="keep every OLS attribute")
    parser.add_argument("--models", type=Path, help="directory for full-data models (versioned JSON)")
    parser.add_argument("--listing", type=int, default=DEFAULT_LISTING_ROWS)
    parser.add_argument("--explain", action="store_true", help="label: print per-rule traces")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    return parser


def parse_config(argv: Sequence[str]) -> tuple[RunConfig, int]:
    args = build_parser().parse_args(list(argv))
    algorithms = tuple(a.strip() for a in args.algorithms.split(",") if a.strip())
    cfg = RunConfig(
        command=args.command,
        data=args.data,
        out=args.out,
        rules=args.rules,
        k=args.k,
        seed=args.seed,
        target=args.target,
        algorithms=algorithms,
        fmt=args.fmt,
        n=args.n,
        noise=args.noise,
        jobs=args.jobs,
        timing=args.timing,
        impute=args.impute,
        select=args.select,
        models=args.models,
        listing=args.listing,
        explain=args.explain,
    )
    return cfg, args.verbose


def configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = getattr(logging, os.environ.get("SOIL_LOG_LEVEL", "WARNING").upper(), logging.WARNING)
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


# =============================================================================
# OUTPUT
# =============================================================================

def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.out is None:
        sys.stdout.write(text)
        return
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    cfg.out.write_text(text, encoding="utf-8")
    logger.info("Wrote %s", cfg.out)


def _write_dataset(cfg: RunConfig, dataset: Dataset) -> None:
    if cfg.out is None:
        write_csv(dataset, sys.stdout)
        return
    cfg.out.parent.mkdir(parents=True, exist_ok=True)
    with open(cfg.out, "w", encoding="utf-8", newline="") as handle:
        write_csv(dataset, handle)
    logger.info("Wrote %d rows to %s", len(dataset), cfg.out)


def _load(cfg: RunConfig, require_labels: bool = False) -> Dataset:
    return load_csv(cfg.data, require_labels=require_labels, strategy=cfg.impute)


# =============================================================================
# COMMANDS
# =============================================================================

def cmd_synth(cfg: RunConfig) -> None:
    _write_dataset(cfg, generate_synthetic(SynthConfig(n=cfg.n, seed=cfg.seed)))


def cmd_label(cfg: RunConfig) -> None:
    rules = load_rules(cfg.rules)
    dataset = label_dataset(rules, _load(cfg))
    if cfg.noise > 0:
        dataset = inject_label_noise(dataset, cfg.noise, cfg.seed)
    _write_dataset(cfg, dataset)
    if cfg.explain:
        traces = [explain_sample(rules, sample) for sample in dataset.rows]
        sys.stdout.write(render_explanations(traces, cfg.fmt))


def render_explanations(traces: list, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(traces, indent=2) + "\n"
    rows = []
    for number, trace in enumerate(traces, start=1):
        row = {"row": number}
        for step in trace["trace"]:
            row[f"{step['attribute']} rating"] = step["rating"]
        row["index"] = round(trace["index"], 4)
        row["class"] = trace["fertility_class"]
        rows.append(row)
    frame = pd.DataFrame(rows)
    if fmt == "csv":
        return frame.to_csv(index=False, lineterminator="\n")
    return frame.to_string(index=False) + "\n"


def _seeded(params: dict, cfg: RunConfig) -> dict:
    """Learners with a seed of their own take the run seed."""
    if "seed" in params:
        params["seed"] = cfg.seed
    return params


def _classification_params(cfg: RunConfig, name: str) -> dict:
    return _seeded(dict(get_classifier(name).default_params), cfg)


def cmd_compare(cfg: RunConfig) -> None:
    dataset = _load(cfg, require_labels=True)
    reports = [
        cross_validate_classifier(
            name, dataset, cfg.k, cfg.seed,
            params=_classification_params(cfg, name), jobs=cfg.jobs, timing=cfg.timing,
        )
        for name in cfg.algorithms
    ]
    if cfg.models is not None:
        for name in cfg.algorithms:
            spec = get_classifier(name)
            model = spec.train(dataset, _classification_params(cfg, name))
            model_store.save_model(model, cfg.models / f"{name}.json")
    _emit(cfg, compare_table(reports, cfg.fmt))


def _regression_params(cfg: RunConfig, name: str) -> dict:
    params = _seeded(dict(get_regressor(name).default_params), cfg)
    if name == "ols":
        params["select"] = cfg.select
    return params


def cmd_predict(cfg: RunConfig) -> None:
    dataset = _load(cfg)
    reports = [
        cross_validate_regressor(
            name, dataset, cfg.target, cfg.k, cfg.seed,
            params=_regression_params(cfg, name), jobs=cfg.jobs, timing=cfg.timing,
        )
        for name in cfg.algorithms
    ]
    if cfg.models is not None:
        for name in cfg.algorithms:
            model = get_regressor(name).fit(dataset, cfg.target, _regression_params(cfg, name))
            model_store.save_model(model, cfg.models / f"{name}_{cfg.target}.json")

    pairs = list(reports[0].pairs[: cfg.listing])
    if cfg.fmt == "json":
        document = {"comparison": comparison_document(reports), "predictions": listing_rows(pairs) if pairs else []}
        _emit(cfg, json.dumps(document, indent=2) + "\n")
        return
    text = compare_table(reports, cfg.fmt)
    if pairs:
        text += "\n" + render_prediction_listing(pairs, cfg.fmt)
    _emit(cfg, text)


def cmd_summary(cfg: RunConfig) -> None:
    summary = dataset_summary(_load(cfg))
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(summary, indent=2) + "\n")
        return
    frame = pd.DataFrame(summary["attributes"]).T
    frame.index.name = "Attribute"
    if cfg.fmt == "csv":
        text = frame.to_csv(float_format="%.4f", lineterminator="\n")
    else:
        text = f"{summary['provenance']}: {summary['rows']} rows\n" + frame.to_string(float_format=lambda v: f"{v:.4f}") + "\n"
    if summary["class_histogram"] is not None:
        histogram = pd.Series(summary["class_histogram"], name="count")
        histogram.index.name = "Fertility"
        text += "\n" + (histogram.to_csv(lineterminator="\n") if cfg.fmt == "csv" else histogram.to_string() + "\n")
    _emit(cfg, text)


def cmd_targets(cfg: RunConfig) -> None:
    dataset = _load(cfg)
    name = cfg.algorithms[0]
    reports = rank_predictable_attributes(
        dataset, name, cfg.k, cfg.seed, params=_regression_params(cfg, name), jobs=cfg.jobs
    )
    if cfg.fmt == "json":
        _emit(cfg, json.dumps(comparison_document(reports), indent=2) + "\n")
        return
    frame = pd.DataFrame(
        {
            "Correlation Coefficient": [f"{r.correlation:.4f}" for r in reports],
            "Relative Absolute Error": [f"{r.rae_percent:.2f}%" for r in reports],
            "Attributes Used": [" ".join(r.retained) or "-" for r in reports],
        },
        index=pd.Index([r.target for r in reports], name="Target"),
    )
    _emit(cfg, frame.to_csv(lineterminator="\n") if cfg.fmt == "csv" else frame.to_string() + "\n")


HANDLERS = {
    "synth": cmd_synth,
    "label": cmd_label,
    "compare": cmd_compare,
    "predict": cmd_predict,
    "summary": cmd_summary,
    "targets": cmd_targets,
}


def run(cfg: RunConfig) -> int:
    HANDLERS[cfg.command](cfg)
    return EXIT_OK


# =============================================================================
# MAIN
# =============================================================================

def _fail(category: str, message: str, code: int) -> int:
    sys.stderr.write(f"error[{category}]: {message}\n")
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    try:
        cfg, verbosity = parse_config(sys.argv[1:] if argv is None else argv)
        configure_logging(verbosity)
        return run(cfg)
    except UsageError as exc:
        return _fail("Usage", str(exc), EXIT_USAGE)
    except SoilToolkitError as exc:
        return _fail("DataError", str(exc), EXIT_DATA)
    except FileNotFoundError as exc:
        return _fail("DataError", f"file not found: {exc.filename}", EXIT_DATA)
    except Exception as exc:
        logger.exception("Internal error")
        return _fail("InternalInvariant", f"{type(exc).__name__}: {exc}", EXIT_INTERNAL)


if __name__ == "__main__":
    sys.exit(main())

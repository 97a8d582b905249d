"""Named Monte Carlo experiments with deterministic CSV/JSON reports."""

from .config import ExperimentConfig, load_config, parse_config_text
from .registry import REGISTRY, resolve, run_experiment
from .report import ExperimentReport, Row, to_csv, to_json, write_report
from .seeds import derive_seed, mix64

__all__ = [
    "ExperimentConfig",
    "ExperimentReport",
    "REGISTRY",
    "Row",
    "derive_seed",
    "load_config",
    "mix64",
    "parse_config_text",
    "resolve",
    "run_experiment",
    "to_csv",
    "to_json",
    "write_report",
]

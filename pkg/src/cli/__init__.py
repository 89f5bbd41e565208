"""Batch front-end: experiment configs, dispatch and result files."""

from src.cli.demos import DEMOS, demo_config, demo_names
from src.cli.experiment_config import (
    ConfigValidationError,
    Diagnostic,
    ExperimentConfig,
    ExperimentKind,
    parse_config,
    validate_config,
)
from src.cli.runner import ExperimentOutput, RunResult, render_csv, run_experiment

__all__ = [
    "DEMOS",
    "demo_config",
    "demo_names",
    "ConfigValidationError",
    "Diagnostic",
    "ExperimentConfig",
    "ExperimentKind",
    "parse_config",
    "validate_config",
    "ExperimentOutput",
    "RunResult",
    "render_csv",
    "run_experiment",
]

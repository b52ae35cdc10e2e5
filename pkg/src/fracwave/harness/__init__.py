"""Decay fitting, experiment orchestration, and the CLI surface."""

from .config import ExperimentConfig, config_from_dict, load_config
from .experiment import ReportBundle, fit_decay_file, run_experiment
from .fitting import (
    Classification,
    DecayFit,
    classify_decay,
    default_window,
    fit_exponential,
    fit_polynomial,
)

__all__ = [
    "Classification",
    "DecayFit",
    "ExperimentConfig",
    "ReportBundle",
    "classify_decay",
    "config_from_dict",
    "default_window",
    "fit_decay_file",
    "fit_exponential",
    "fit_polynomial",
    "load_config",
    "run_experiment",
]

"""Experiment drivers, configuration, and report plumbing for the CLI."""

from .config import ConfigError, ProblemSetup, load_config
from .report import ExperimentReport, Series, trend_verdict

__all__ = [
    "ConfigError",
    "ExperimentReport",
    "ProblemSetup",
    "Series",
    "load_config",
    "trend_verdict",
]

"""Inequality suites and the command line entry point."""

from .suites import (
    SUITE_NAMES,
    ExperimentConfig,
    default_config,
    hyper_q,
    run_suite,
)

__all__ = [
    "SUITE_NAMES",
    "ExperimentConfig",
    "default_config",
    "hyper_q",
    "run_suite",
]

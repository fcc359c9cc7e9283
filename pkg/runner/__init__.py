from __future__ import annotations

# Purpose: Expose scenario parsing and execution for the command-line entry point.
# Date: 2026-10-15
# Related tests: tests/test_runner.py

"""Scenario runner package exports."""

from .config import ConfigError, ScenarioConfig, load_defaults, parse_config
from .oscillator import (
    BETA_SCALING,
    NORMALIZATION_TOL,
    PROFILE_COLUMNS,
    profile_dataset,
    profile_frame,
    profile_report,
    profile_system,
)
from .observables import BUILTIN_OBSERVABLES, is_known_observable, resolve_observable
from .rules import RULES, RuleContext, RuleSpec, rule_table
from .scenario import (
    WORKERS_ENV,
    ItemResult,
    ScenarioResult,
    build_system,
    profile_config,
    resolve_workers,
    run_scenario,
)

__all__ = [
    "ConfigError",
    "ScenarioConfig",
    "load_defaults",
    "parse_config",
    "BETA_SCALING",
    "NORMALIZATION_TOL",
    "PROFILE_COLUMNS",
    "profile_frame",
    "profile_report",
    "profile_dataset",
    "profile_system",
    "BUILTIN_OBSERVABLES",
    "is_known_observable",
    "resolve_observable",
    "RULES",
    "RuleContext",
    "RuleSpec",
    "rule_table",
    "WORKERS_ENV",
    "ItemResult",
    "ScenarioResult",
    "build_system",
    "profile_config",
    "resolve_workers",
    "run_scenario",
]

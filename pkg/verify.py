from __future__ import annotations

# Purpose: Command-line entry point for running sum-rule verification scenarios.
# Date: 2026-10-15
# Related tests: tests/test_runner.py

"""Verify shifting-gauge sum rules from declarative scenario files."""

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

import pandas as pd

from runner import ConfigError, profile_config, parse_config, rule_table, run_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2


def parse_args(argv: Sequence[str] | None = None) -> argparse.Namespace:
    """Parse CLI arguments for the verification workflow."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--log-level",
        default="info",
        choices=("error", "warning", "info", "debug"),
        help="Logging verbosity. Use 'debug' for per-point residuals.",
    )
    common.add_argument(
        "--log-file",
        type=Path,
        help="Optional file path to write logs. When omitted, logs emit to the console.",
    )

    parser = argparse.ArgumentParser(description="Verify quantum shifting-gauge sum rules.")
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", parents=[common], help="Run a scenario file.")
    check.add_argument("--config", type=Path, required=True, help="Scenario JSON file.")
    check.add_argument("--out", type=Path, help="Output directory (overrides the scenario).")
    check.add_argument(
        "--tol-scale",
        type=float,
        default=1.0,
        help="Multiply every tolerance by this factor; recorded in summary.json.",
    )

    fig1 = commands.add_parser(
        "fig1", parents=[common], help="Emit the harmonic-oscillator profile dataset (fig1.csv)."
    )
    fig1.add_argument("--out", type=Path, help="Output directory.")
    fig1.add_argument("--n-max", type=int, help="Oscillator truncation (default 80).")
    fig1.add_argument("--beta", type=float, nargs="+", help="beta hbar omega values.")
    fig1.add_argument("--tol-scale", type=float, default=1.0)

    commands.add_parser("list-rules", parents=[common], help="Print rule ids, classes and tolerances.")

    validate = commands.add_parser("validate", parents=[common], help="Parse a scenario only.")
    validate.add_argument("--config", type=Path, required=True, help="Scenario JSON file.")
    return parser.parse_args(argv)


def configure_logging(level_name: str, log_file: Path | None) -> None:
    """Configure logging outputs according to runtime preferences."""
    level = getattr(logging, level_name.upper(), logging.INFO)
    handlers: list[logging.Handler] = []
    if log_file:
        log_file.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))
    handlers.append(logging.StreamHandler())
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        handlers=handlers,
        force=True,
    )


def main(argv: Sequence[str] | None = None) -> int:
    """CLI entry point; returns the process exit status."""
    args = parse_args(argv)
    configure_logging(args.log_level, args.log_file)
    logger.debug(
        "Logging configured: level=%s, destination=%s",
        args.log_level,
        args.log_file or "stdout",
    )

    if args.command == "list-rules":
        print(pd.DataFrame(rule_table()).to_string(index=False))
        return EXIT_OK

    if args.command == "fig1":
        config = profile_config(args.n_max, args.beta, args.out)
        result = run_scenario(config, tol_scale=args.tol_scale)
        return result.exit_code

    try:
        config = parse_config(args.config)
    except ConfigError as exc:
        logger.error("Invalid scenario %s: %s", args.config, exc)
        return EXIT_CONFIG

    if args.command == "validate":
        logger.info("Scenario %s is valid (%d checks)", config.name, len(config.checks))
        return EXIT_OK

    result = run_scenario(config, tol_scale=args.tol_scale, out_dir=args.out)
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())

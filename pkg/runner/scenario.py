from __future__ import annotations

# Purpose: Execute a parsed scenario concurrently and write its CSV/JSON artifacts.
# Date: 2026-10-15
# Related tests: tests/test_runner.py

"""Scenario execution."""

import logging
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import pandas as pd

from sumrules import SumRuleReport
from systems import (
    BasisSpec,
    ManyBodySystem,
    build_grand_system,
    build_many_body,
    with_asymmetry,
)

from .config import (
    CheckConfig,
    EnsembleConfig,
    ExternalConfig,
    OutputConfig,
    ScenarioConfig,
    SystemConfig,
    load_defaults,
)
from .oscillator import BETA_SCALING, PROFILE_COLUMNS
from .outputs import sort_frame, write_csv, write_summary
from .rules import RULES, RuleContext

__all__ = [
    "WORKERS_ENV",
    "ItemResult",
    "ScenarioResult",
    "build_system",
    "profile_config",
    "resolve_workers",
    "run_scenario",
]

logger = logging.getLogger(__name__)

WORKERS_ENV = "QGAUGE_WORKERS"


@dataclass
class ItemResult:
    """Outcome of one (check, beta) item."""

    label: str
    rule_id: str
    beta: float | None
    report: SumRuleReport | None = None
    error: str | None = None
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return self.error is None and self.report is not None and self.report.passed

    def summary(self) -> dict[str, Any]:
        base: dict[str, Any] = {
            "label": self.label,
            "rule": self.rule_id,
            "beta": self.beta,
            "wall_time_s": round(self.elapsed, 6),
            "pass": self.passed,
        }
        if self.report is not None:
            base.update(self.report.summary())
        if self.error is not None:
            base["error"] = self.error
        return base


@dataclass
class ScenarioResult:
    config: ScenarioConfig
    items: list[ItemResult]
    summary: dict[str, Any]
    output_dir: Path
    files: list[Path] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.summary.get("pass", False))

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1


def build_system(
    system: SystemConfig, ensemble: EnsembleConfig, spec: BasisSpec | None = None
) -> ManyBodySystem:
    """Build the configured system, optionally on another basis (for doubling studies)."""
    basis = spec or system.basis
    external = system.external.potential(basis) if system.external else None
    pair = system.pair.potential() if system.pair else None
    if ensemble.kind == "grand":
        sys = build_grand_system(
            basis,
            max_particles=system.particles,
            statistics=system.statistics,
            pair_potential=pair,
            external_potential=external,
        )
    else:
        sys = build_many_body(
            basis,
            particles=system.particles,
            statistics=system.statistics,
            pair_potential=pair,
            external_potential=external,
        )
    if system.inject_asymmetry > 0.0:
        sys = with_asymmetry(sys, system.inject_asymmetry, system.asymmetry_seed)
    return sys


def resolve_workers(config: ScenarioConfig) -> int:
    """Worker count: QGAUGE_WORKERS, then the scenario, then defaults.yaml."""
    raw = os.environ.get(WORKERS_ENV)
    if raw:
        try:
            value = int(raw)
        except ValueError:
            logger.warning("Ignoring %s=%r; expected a positive integer", WORKERS_ENV, raw)
        else:
            if value >= 1:
                return value
            logger.warning("Ignoring %s=%r; expected a positive integer", WORKERS_ENV, raw)
    if config.workers:
        return int(config.workers)
    return int(load_defaults()["workers"])


def _run_item(
    sys: ManyBodySystem,
    config: ScenarioConfig,
    check: CheckConfig,
    beta: float | None,
    tol_scale: float,
) -> ItemResult:
    spec = RULES[check.rule]
    started = time.perf_counter()
    result = ItemResult(label=check.label, rule_id=check.rule, beta=beta)
    try:
        ctx = RuleContext(
            system=sys,
            check=check,
            beta=beta,
            mu=config.ensemble.mu,
            tolerance=spec.tolerance * tol_scale,
            rebuild=lambda basis: build_system(config.system, config.ensemble, basis),
        )
        report = spec.run(ctx)
        result.report = report
        logger.info(
            "%s (beta=%s): %s, max residual %.3e",
            check.label,
            beta,
            "pass" if report.passed else "FAIL",
            report.max_residual,
        )
    except Exception as exc:
        result.error = f"{type(exc).__name__}: {exc}"
        logger.warning("%s (beta=%s) failed: %s", check.label, beta, result.error)
    result.elapsed = time.perf_counter() - started
    return result


def _label_frame(items: Sequence[ItemResult]) -> pd.DataFrame:
    frames = []
    for item in items:
        if item.report is None or item.report.frame.empty:
            continue
        frame = item.report.frame.copy()
        if item.beta is not None:
            frame.insert(0, "beta", item.beta)
        frames.append(frame)
    if not frames:
        return pd.DataFrame()
    return sort_frame(pd.concat(frames, ignore_index=True))


def _write_tables(
    items: Sequence[ItemResult], checks: Sequence[CheckConfig], out_dir: Path
) -> list[Path]:
    files = []
    for check in checks:
        frame = _label_frame([item for item in items if item.label == check.label])
        if frame.empty:
            continue
        if check.rule == "fig1":
            frame = sort_frame(frame)[list(PROFILE_COLUMNS)]
        files.append(write_csv(frame, out_dir / f"{check.label}.csv"))
    return files


def _summarize(
    config: ScenarioConfig,
    items: Sequence[ItemResult],
    *,
    tol_scale: float,
    workers: int,
    elapsed: float,
    error: str | None = None,
) -> dict[str, Any]:
    rules: dict[str, Any] = {}
    for check in config.checks:
        mine = [item for item in items if item.label == check.label]
        spec = RULES[check.rule]
        residuals = [item.report.max_residual for item in mine if item.report is not None]
        rules[check.label] = {
            "rule": check.rule,
            "class": spec.rule_class.value,
            "tolerance": spec.tolerance * tol_scale,
            "max_residual": max(residuals) if residuals else None,
            "pass": bool(mine) and all(item.passed for item in mine),
        }
    summary: dict[str, Any] = {
        "scenario": config.name,
        "tol_scale": tol_scale,
        "workers": workers,
        "wall_time_s": round(elapsed, 6),
        "inject_asymmetry": config.system.inject_asymmetry,
        "rules": rules,
        "items": [item.summary() for item in items],
        "pass": error is None and all(entry["pass"] for entry in rules.values()),
    }
    if any(check.rule == "fig1" for check in config.checks):
        summary["profile_beta_scaling"] = BETA_SCALING
    if error is not None:
        summary["error"] = error
    return summary


def run_scenario(
    config: ScenarioConfig, *, tol_scale: float = 1.0, out_dir: Path | None = None
) -> ScenarioResult:
    """Run every (check, beta) item and write the artifacts.

    ``summary.json`` is written in every case, including when the system
    cannot be built.  Tables are written after all items have joined.
    """
    started = time.perf_counter()
    directory = Path(out_dir) if out_dir is not None else config.output.directory
    workers = resolve_workers(config)
    logger.info(
        "Running scenario %s: %d checks, %d beta values, %d workers",
        config.name,
        len(config.checks),
        len(config.ensemble.betas),
        workers,
    )
    try:
        sys = build_system(config.system, config.ensemble)
        _ = sys.hamiltonian  # cached before worker threads share the system
    except Exception as exc:
        error = f"{type(exc).__name__}: {exc}"
        logger.warning("Could not build system for %s: %s", config.name, error)
        summary = _summarize(
            config, [], tol_scale=tol_scale, workers=workers, elapsed=0.0, error=error
        )
        path = write_summary(summary, directory / "summary.json")
        return ScenarioResult(config=config, items=[], summary=summary, output_dir=directory, files=[path])

    jobs = []
    for check in config.checks:
        betas = config.ensemble.betas if RULES[check.rule].thermal else (None,)
        jobs.extend((check, beta) for beta in betas)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = [
            pool.submit(_run_item, sys, config, check, beta, tol_scale) for check, beta in jobs
        ]
        items = [future.result() for future in futures]

    files = []
    if "csv" in config.output.formats:
        files.extend(_write_tables(items, config.checks, directory))
    summary = _summarize(
        config,
        items,
        tol_scale=tol_scale,
        workers=workers,
        elapsed=time.perf_counter() - started,
    )
    files.append(write_summary(summary, directory / "summary.json"))
    logger.info(
        "Scenario %s %s in %.2fs",
        config.name,
        "passed" if summary["pass"] else "FAILED",
        summary["wall_time_s"],
    )
    return ScenarioResult(config=config, items=items, summary=summary, output_dir=directory, files=files)


def profile_config(
    n_max: int | None = None,
    betas: Sequence[float] | None = None,
    out_dir: Path | None = None,
) -> ScenarioConfig:
    """Scenario producing only the oscillator profile dataset."""
    defaults = load_defaults()
    settings = defaults["fig1"]
    basis = BasisSpec(
        kind="oscillator",
        n_max=int(n_max or settings["n_max"]),
        eval_points=int(settings["eval_points"]),
        x_span=float(settings["x_span"]),
    )
    return ScenarioConfig(
        name="fig1",
        system=SystemConfig(basis=basis, external=ExternalConfig(kind="harmonic")),
        ensemble=EnsembleConfig(betas=tuple(float(b) for b in (betas or settings["betas"]))),
        checks=(CheckConfig(rule="fig1", label="fig1"),),
        output=OutputConfig(directory=Path(out_dir or defaults["output"]["directory"])),
    )

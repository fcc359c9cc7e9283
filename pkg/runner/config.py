from __future__ import annotations

# Purpose: Parse and validate scenario JSON files and load package defaults.
# Date: 2026-10-13
# Related tests: tests/test_runner.py

"""Scenario configuration: strict JSON in, frozen dataclasses out."""

import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping

import yaml
from jsonschema import Draft202012Validator
from jsonschema.exceptions import best_match

from systems import (
    BasisSpec,
    BasisSpecError,
    gaussian_pair_potential,
    harmonic_potential,
    tabulated_potential,
    tilted_potential,
)

from .observables import is_known_observable

__all__ = [
    "ConfigError",
    "ExternalConfig",
    "PairConfig",
    "SystemConfig",
    "EnsembleConfig",
    "ProtocolConfig",
    "CheckConfig",
    "OutputConfig",
    "ScenarioConfig",
    "load_defaults",
    "load_schema",
    "parse_config",
]

logger = logging.getLogger(__name__)

DEFAULTS_PATH = Path(__file__).parent / "defaults.yaml"
SCHEMA_PATH = Path(__file__).parent / "scenario.schema.json"


class ConfigError(ValueError):
    """Invalid scenario; ``path`` is a JSON pointer to the offending field."""

    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(message)
        self.message = message
        self.path = path

    def __str__(self) -> str:
        return f"{self.path or '/'}: {self.message}"


@lru_cache(maxsize=1)
def load_defaults() -> dict[str, Any]:
    with open(DEFAULTS_PATH, "r", encoding="utf-8") as f:
        return yaml.safe_load(f)


@lru_cache(maxsize=1)
def load_schema() -> dict[str, Any]:
    with open(SCHEMA_PATH, "r", encoding="utf-8") as f:
        return json.load(f)


def _pointer(parts: Any) -> str:
    tokens = [str(part).replace("~", "~0").replace("/", "~1") for part in parts]
    return "/" + "/".join(tokens) if tokens else ""


@dataclass(frozen=True)
class ExternalConfig:
    kind: str
    omega: float | None = None
    center: float = 0.0
    force: float = 0.0
    points: tuple[float, ...] = ()
    values: tuple[float, ...] = ()

    def potential(self, spec: BasisSpec):
        """Return V_ext as a callable; trap frequency defaults to the basis frequency."""
        omega = self.omega if self.omega is not None else spec.omega
        if self.kind == "harmonic":
            return harmonic_potential(omega=omega, mass=spec.mass, center=self.center)
        if self.kind == "tilted":
            base = (
                harmonic_potential(omega=self.omega, mass=spec.mass, center=self.center)
                if self.omega is not None
                else None
            )
            return tilted_potential(self.force, base)
        return tabulated_potential(self.points, self.values)


@dataclass(frozen=True)
class PairConfig:
    strength: float = 1.0
    width: float = 1.0

    def potential(self):
        return gaussian_pair_potential(strength=self.strength, width=self.width)


@dataclass(frozen=True)
class SystemConfig:
    basis: BasisSpec
    particles: int = 1
    statistics: str = "distinguishable"
    pair: PairConfig | None = None
    external: ExternalConfig | None = None
    inject_asymmetry: float = 0.0
    asymmetry_seed: int = 0


@dataclass(frozen=True)
class EnsembleConfig:
    betas: tuple[float, ...]
    kind: str = "canonical"
    mu: float | None = None


@dataclass(frozen=True)
class ProtocolConfig:
    kind: str = "static"
    omega: float | None = None
    force: float = 0.0
    duration: float | None = None
    segments: int = 1


@dataclass(frozen=True)
class CheckConfig:
    """One requested rule with its options; unset options fall back to defaults.yaml."""

    rule: str
    label: str
    observable: str | None = None
    second_observable: str | None = None
    coupling: float | None = None
    step: float | None = None
    points: tuple[float, ...] | None = None
    stride: int | None = None
    times: tuple[float, ...] | None = None
    protocol: ProtocolConfig | None = None
    fields: tuple[str, ...] | None = None
    smearing: float | None = None
    levels: int | None = None
    n_states: int | None = None


@dataclass(frozen=True)
class OutputConfig:
    directory: Path
    formats: tuple[str, ...] = ("csv", "json")


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    system: SystemConfig
    ensemble: EnsembleConfig
    checks: tuple[CheckConfig, ...]
    output: OutputConfig
    workers: int | None = None
    raw: Mapping[str, Any] = field(default_factory=dict, compare=False, repr=False)


def _read_source(source: str | Path) -> tuple[str, str]:
    if isinstance(source, Path) or not str(source).lstrip().startswith("{"):
        path = Path(source)
        try:
            return path.read_text(encoding="utf-8"), str(path)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return str(source), "<text>"


def parse_config(source: str | Path) -> ScenarioConfig:
    """Parse a scenario from a JSON file path or JSON text.

    Args:
        source: Path to a UTF-8 JSON file, or the JSON document itself.

    Returns:
        ScenarioConfig: Validated, defaults-resolved scenario.

    Raises:
        ConfigError: For unreadable, malformed, schema-violating or
            semantically invalid documents.
    """
    text, origin = _read_source(source)
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc

    error = best_match(Draft202012Validator(load_schema()).iter_errors(document))
    if error is not None:
        raise ConfigError(error.message, _pointer(error.absolute_path))

    config = _build(document)
    logger.debug("Parsed scenario %s from %s (%d checks)", config.name, origin, len(config.checks))
    return config


def _build(document: Mapping[str, Any]) -> ScenarioConfig:
    from .rules import RULES

    defaults = load_defaults()
    system = _build_system(document["system"])
    ensemble_doc = document["ensemble"]
    betas = tuple(float(beta) for beta in ensemble_doc["beta"])
    if not betas:
        raise ConfigError("empty beta list", "/ensemble/beta")
    ensemble = EnsembleConfig(
        betas=betas,
        kind=ensemble_doc.get("kind", "canonical"),
        mu=ensemble_doc.get("mu"),
    )

    checks = []
    seen: dict[str, int] = {}
    for index, entry in enumerate(document["checks"]):
        rule = entry["rule"]
        if rule not in RULES:
            raise ConfigError(f"unknown rule id {rule!r}", f"/checks/{index}/rule")
        for key in ("observable", "second_observable"):
            name = entry.get(key)
            if name is not None and not is_known_observable(name):
                raise ConfigError(f"unknown observable {name!r}", f"/checks/{index}/{key}")
        label = entry.get("label") or rule
        seen[label] = seen.get(label, 0) + 1
        if seen[label] > 1:
            label = f"{label}_{seen[label]}"
        protocol_doc = entry.get("protocol")
        checks.append(
            CheckConfig(
                rule=rule,
                label=label,
                observable=entry.get("observable"),
                second_observable=entry.get("second_observable"),
                coupling=entry.get("lambda"),
                step=entry.get("step"),
                points=tuple(entry["points"]) if "points" in entry else None,
                stride=entry.get("stride"),
                times=tuple(entry["times"]) if "times" in entry else None,
                protocol=ProtocolConfig(**protocol_doc) if protocol_doc else None,
                fields=tuple(entry["fields"]) if "fields" in entry else None,
                smearing=entry.get("smearing"),
                levels=entry.get("levels"),
                n_states=entry.get("n_states"),
            )
        )

    output_doc = document.get("output", {})
    output = OutputConfig(
        directory=Path(output_doc.get("directory", defaults["output"]["directory"])),
        formats=tuple(output_doc.get("formats", defaults["output"]["formats"])),
    )
    return ScenarioConfig(
        name=document.get("name", "scenario"),
        system=system,
        ensemble=ensemble,
        checks=tuple(checks),
        output=output,
        workers=document.get("workers"),
        raw=document,
    )


def _build_system(block: Mapping[str, Any]) -> SystemConfig:
    try:
        basis = BasisSpec(**block["basis"])
    except BasisSpecError as exc:
        raise ConfigError(str(exc), "/system/basis") from exc
    external_doc = block.get("external")
    external = None
    if external_doc is not None:
        if external_doc["kind"] == "tabulated" and len(external_doc["points"]) != len(
            external_doc["values"]
        ):
            raise ConfigError("tabulated points and values differ in length", "/system/external")
        external = ExternalConfig(
            kind=external_doc["kind"],
            omega=external_doc.get("omega"),
            center=external_doc.get("center", 0.0),
            force=external_doc.get("force", 0.0),
            points=tuple(external_doc.get("points", ())),
            values=tuple(external_doc.get("values", ())),
        )
    pair_doc = block.get("pair")
    return SystemConfig(
        basis=basis,
        particles=block.get("particles", 1),
        statistics=block.get("statistics", "distinguishable"),
        pair=PairConfig(**pair_doc) if pair_doc is not None else None,
        external=external,
        inject_asymmetry=float(block.get("inject_asymmetry", 0.0)),
        asymmetry_seed=int(block.get("asymmetry_seed", 0)),
    )

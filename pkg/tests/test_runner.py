from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

import verify
from gauge import RepresentationError
from runner import (
    NORMALIZATION_TOL,
    PROFILE_COLUMNS,
    RULES,
    WORKERS_ENV,
    ConfigError,
    profile_config,
    profile_dataset,
    profile_frame,
    profile_report,
    profile_system,
    parse_config,
    resolve_observable,
    resolve_workers,
    rule_table,
    run_scenario,
)
from systems import ManyBodySystem


def _scenario(**overrides) -> dict:
    document = {
        "name": "small-grid",
        "system": {
            "basis": {"kind": "grid", "grid_points": 16, "box_length": 8.0},
            "external": {"kind": "harmonic"},
        },
        "ensemble": {"beta": [1.0]},
        "checks": [
            {"rule": "force_balance"},
            {"rule": "hyperforce", "observable": "random_hermitian(3)"},
            {"rule": "boltzmann"},
            {"rule": "anti_self_adjoint", "points": [0.0, 1.0]},
        ],
    }
    document.update(overrides)
    return document


def _write(tmp_path: Path, document: dict) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(document), encoding="utf-8")
    return path


def test_parse_minimal_scenario(tmp_path: Path) -> None:
    config = parse_config(_write(tmp_path, _scenario()))
    assert config.name == "small-grid"
    assert config.system.basis.grid_points == 16
    assert config.ensemble.betas == (1.0,)
    assert [check.label for check in config.checks] == [
        "force_balance",
        "hyperforce",
        "boltzmann",
        "anti_self_adjoint",
    ]
    assert config.output.formats == ("csv", "json")


def test_parse_accepts_json_text() -> None:
    config = parse_config(json.dumps(_scenario()))
    assert config.checks[1].observable == "random_hermitian(3)"


def test_unknown_rule_is_named() -> None:
    document = _scenario(checks=[{"rule": "frobnicate"}])
    with pytest.raises(ConfigError, match="frobnicate") as excinfo:
        parse_config(json.dumps(document))
    assert excinfo.value.path == "/checks/0/rule"


def test_empty_beta_list_is_rejected() -> None:
    with pytest.raises(ConfigError, match="empty beta list") as excinfo:
        parse_config(json.dumps(_scenario(ensemble={"beta": []})))
    assert excinfo.value.path == "/ensemble/beta"


def test_unknown_keys_are_rejected_with_a_pointer() -> None:
    document = _scenario()
    document["system"]["basis"]["grid_pointz"] = 16
    with pytest.raises(ConfigError, match="grid_pointz") as excinfo:
        parse_config(json.dumps(document))
    assert excinfo.value.path == "/system/basis"
    assert str(excinfo.value).startswith("/system/basis: ")


def test_grand_ensemble_needs_mu() -> None:
    with pytest.raises(ConfigError, match="mu"):
        parse_config(json.dumps(_scenario(ensemble={"kind": "grand", "beta": [1.0]})))


def test_semantic_config_errors() -> None:
    with pytest.raises(ConfigError, match="invalid JSON"):
        parse_config("{not json")
    with pytest.raises(ConfigError, match="unknown observable") as excinfo:
        parse_config(json.dumps(_scenario(checks=[{"rule": "hyperforce", "observable": "banana"}])))
    assert excinfo.value.path == "/checks/0/observable"
    document = _scenario()
    document["system"]["external"] = {"kind": "tabulated", "points": [0.0, 1.0, 2.0], "values": [0.0, 1.0]}
    with pytest.raises(ConfigError, match="differ in length"):
        parse_config(json.dumps(document))


def test_duplicate_labels_get_suffixes() -> None:
    document = _scenario(checks=[{"rule": "force_balance"}, {"rule": "force_balance"}])
    config = parse_config(json.dumps(document))
    assert [check.label for check in config.checks] == ["force_balance", "force_balance_2"]


def test_rule_registry_covers_every_default() -> None:
    table = pd.DataFrame(rule_table())
    assert len(table) == len(RULES) == 19
    assert set(table["class"]) == {"exact", "convergence"}
    assert RULES["force_balance"].tolerance == pytest.approx(1e-10)
    assert RULES["chi_density_response"].tolerance == pytest.approx(0.3)


def test_resolve_builtin_observables(grid_system: ManyBodySystem) -> None:
    assert resolve_observable("sum_x", grid_system) is grid_system.position_sum
    assert resolve_observable("gaussian_x", grid_system).is_hermitian()
    first = resolve_observable("random_hermitian(5)", grid_system)
    second = resolve_observable("random_hermitian(5)", grid_system)
    np.testing.assert_array_equal(first.entries, second.entries)
    with pytest.raises(ValueError, match="beta"):
        resolve_observable("beta_H0", grid_system)


def test_run_scenario_passes_and_writes_artifacts(tmp_path: Path) -> None:
    config = parse_config(json.dumps(_scenario()))
    result = run_scenario(config, out_dir=tmp_path)
    assert result.passed, result.summary
    assert result.exit_code == 0
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["pass"] is True
    assert summary["rules"]["force_balance"]["class"] == "exact"
    assert summary["rules"]["force_balance"]["max_residual"] <= 1e-10
    table = pd.read_csv(tmp_path / "force_balance.csv")
    assert len(table) == 16
    assert list(table.columns[:2]) == ["beta", "r"]


def test_tolerance_scale_is_recorded(tmp_path: Path) -> None:
    config = parse_config(json.dumps(_scenario(checks=[{"rule": "force_balance"}])))
    result = run_scenario(config, tol_scale=10.0, out_dir=tmp_path)
    assert result.summary["tol_scale"] == 10.0
    assert result.summary["rules"]["force_balance"]["tolerance"] == pytest.approx(1e-9)


def test_injected_asymmetry_fails_exact_rules(tmp_path: Path) -> None:
    document = _scenario()
    document["system"]["inject_asymmetry"] = 1e-3
    result = run_scenario(parse_config(json.dumps(document)), out_dir=tmp_path)
    assert result.exit_code == 1
    failed = [
        label
        for label, entry in result.summary["rules"].items()
        if entry["class"] == "exact" and not entry["pass"]
    ]
    assert {"force_balance", "hyperforce", "boltzmann"} <= set(failed)
    assert result.summary["inject_asymmetry"] == pytest.approx(1e-3)


def test_summary_is_written_when_the_system_cannot_be_built(tmp_path: Path) -> None:
    document = _scenario()
    document["system"]["external"] = {"kind": "tabulated", "points": [1.0, 0.0], "values": [0.0, 1.0]}
    result = run_scenario(parse_config(json.dumps(document)), out_dir=tmp_path)
    assert result.exit_code == 1
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["pass"] is False
    assert "SystemBuildError" in summary["error"]


def test_convergence_rule_in_oscillator_basis(tmp_path: Path) -> None:
    document = {
        "system": {"basis": {"kind": "oscillator", "n_max": 16}, "external": {"kind": "harmonic"}},
        "ensemble": {"beta": [1.0]},
        "checks": [{"rule": "canonical_shift"}],
    }
    result = run_scenario(parse_config(json.dumps(document)), out_dir=tmp_path)
    assert result.passed, result.summary
    assert result.summary["rules"]["canonical_shift"]["class"] == "convergence"
    table = pd.read_csv(tmp_path / "canonical_shift.csv")
    assert list(table["size"]) == [17, 33, 65]


def test_workers_environment_override(monkeypatch: pytest.MonkeyPatch) -> None:
    config = parse_config(json.dumps(_scenario(workers=3)))
    monkeypatch.setenv(WORKERS_ENV, "2")
    assert resolve_workers(config) == 2
    monkeypatch.setenv(WORKERS_ENV, "zero")
    assert resolve_workers(config) == 3
    monkeypatch.delenv(WORKERS_ENV)
    assert resolve_workers(parse_config(json.dumps(_scenario()))) == 4


def test_fig1_dataset(tmp_path: Path) -> None:
    result = run_scenario(profile_config(out_dir=tmp_path))
    assert result.passed, result.summary
    table = pd.read_csv(tmp_path / "fig1.csv")
    assert list(table.columns) == list(PROFILE_COLUMNS)
    assert len(table) == 6 * 161
    assert list(table["beta_hbar_omega"].unique()) == [0.5, 1.0, 2.0, 3.0, 4.0, 6.0]
    scale = table["cov_kin"].abs().max()
    assert table["sum"].abs().max() <= 1e-8 * scale
    for item in result.summary["items"]:
        assert item["normalization"] == pytest.approx(1.0, abs=1e-6)
        assert item["requirements"] == {"normalization": True}
    assert result.summary["profile_beta_scaling"].startswith("symmetric")


def test_profile_is_gaussian_at_low_temperature() -> None:
    frame = profile_frame(profile_system(), 6.0)
    variance = 0.5 / np.tanh(3.0)
    x = frame["x_over_a"].to_numpy()
    expected = np.exp(-(x**2) / (2.0 * variance)) / np.sqrt(2.0 * np.pi * variance)
    np.testing.assert_allclose(frame["rho_times_a"], expected, atol=1e-8)


def test_profile_needs_a_single_oscillator_particle(grid_system: ManyBodySystem) -> None:
    with pytest.raises(RepresentationError):
        profile_frame(grid_system, 1.0)


def test_cli_validate_and_list_rules(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    path = _write(tmp_path, _scenario())
    assert verify.main(["validate", "--config", str(path)]) == verify.EXIT_OK
    assert verify.main(["list-rules"]) == verify.EXIT_OK
    assert "extended_force_derivative" in capsys.readouterr().out


def test_cli_reports_config_errors(tmp_path: Path) -> None:
    path = _write(tmp_path, _scenario(ensemble={"beta": []}))
    assert verify.main(["check", "--config", str(path)]) == verify.EXIT_CONFIG


def test_cli_check_exit_status(tmp_path: Path) -> None:
    path = _write(tmp_path, _scenario(checks=[{"rule": "force_balance"}]))
    out = tmp_path / "out"
    assert verify.main(["check", "--config", str(path), "--out", str(out)]) == verify.EXIT_OK
    assert (out / "summary.json").exists()


def test_profile_dataset_stacks_betas_in_order() -> None:
    table = profile_dataset(n_max=30, betas=(2.0, 1.0), eval_points=21, x_span=4.0)
    assert list(table.columns) == list(PROFILE_COLUMNS)
    assert len(table) == 2 * 21
    assert list(table["beta_hbar_omega"].iloc[[0, 21]]) == [2.0, 1.0]


def test_fig1_fails_when_the_density_is_cut_off() -> None:
    sys = profile_system(30, eval_points=21, x_span=1.0)
    report = profile_report(sys, 1.0, RULES["fig1"].tolerance)
    assert report.max_residual <= RULES["fig1"].tolerance
    assert report.details["normalization"] < 1.0 - NORMALIZATION_TOL
    assert report.requirements == {"normalization": False}
    assert not report.passed


def test_cli_fig1_writes_the_dataset(tmp_path: Path) -> None:
    out = tmp_path / "fig1"
    status = verify.main(["fig1", "--out", str(out), "--n-max", "30", "--beta", "1.0", "2.0"])
    assert status == verify.EXIT_OK
    table = pd.read_csv(out / "fig1.csv")
    assert len(table) == 2 * 161
    summary = json.loads((out / "summary.json").read_text(encoding="utf-8"))
    assert summary["rules"]["fig1"]["pass"]

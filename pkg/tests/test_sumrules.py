from __future__ import annotations

import numpy as np
import pytest

from operators import HermiticityError, random_hermitian
from sumrules import (
    RuleClass,
    build_report,
    canonical_shift_residual,
    check_3g,
    check_force_balance,
    check_hyperforce,
    check_product_rule,
    density_hyperforce_residual,
    doubling_study,
    external_force_residual,
    nearest_point,
)
from systems import BasisSpec, ManyBodySystem, build_grand_system, build_many_body, harmonic_potential
from thermal import EnsembleError, SpectralThermalState


def _observable(sys: ManyBodySystem, seed: int):
    return random_hermitian(sys.dim, seed=seed, scale=1.0 / np.sqrt(sys.dim))


def test_force_balance_on_grid(grid_state: SpectralThermalState, grid_system: ManyBodySystem) -> None:
    report = check_force_balance(grid_state, grid_system)
    assert report.passed, report.frame.sort_values("residual").tail()
    assert len(report.frame) == grid_system.spec.grid_points
    split = report.frame["kinetic"] + report.frame["interparticle"] + report.frame["external"]
    np.testing.assert_allclose(split, report.frame["total"], atol=1e-10)


def test_force_balance_for_interacting_pairs(
    pair_state: SpectralThermalState, pair_system: ManyBodySystem
) -> None:
    report = check_force_balance(pair_state, pair_system)
    assert report.passed
    assert report.frame["interparticle"].abs().max() > 0.0


def test_force_balance_at_selected_oscillator_points(
    osc_state: SpectralThermalState, osc_system: ManyBodySystem
) -> None:
    report = check_force_balance(osc_state, osc_system, points=[-1.0, 0.0, 0.4])
    assert report.passed
    assert list(report.frame["r"]) == pytest.approx([-1.0, 0.0, 0.4])
    assert report.residuals.label == "force_balance"


def test_force_balance_rejects_foreign_state(
    osc_state: SpectralThermalState, grid_system: ManyBodySystem
) -> None:
    with pytest.raises(EnsembleError, match="does not match"):
        check_force_balance(osc_state, grid_system)


def test_hyperforce_for_random_observable(
    grid_state: SpectralThermalState, grid_system: ManyBodySystem
) -> None:
    report = check_hyperforce(grid_state, grid_system, _observable(grid_system, 41))
    assert report.passed
    assert report.rule_class is RuleClass.EXACT
    cancellation = report.frame["mean_hyperforce"] + report.frame["mori"]
    assert np.max(np.abs(cancellation)) <= 1e-9 * max(1.0, report.frame["scale"].max())


def test_hyperforce_for_position_sum(osc_state: SpectralThermalState, osc_system: ManyBodySystem) -> None:
    report = check_hyperforce(osc_state, osc_system, osc_system.position_sum, points=[0.0, 0.8])
    assert report.passed


def test_hyperforce_rejects_non_hermitian_observable(
    grid_state: SpectralThermalState, grid_system: ManyBodySystem, rng: np.random.Generator
) -> None:
    dim = grid_system.dim
    skew = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    with pytest.raises(HermiticityError, match="Hermitian"):
        check_hyperforce(grid_state, grid_system, skew)


def test_product_rule(pair_state: SpectralThermalState, pair_system: ManyBodySystem) -> None:
    first = _observable(pair_system, 51)
    second = _observable(pair_system, 52)
    points = pair_system.evaluation_points[4:12:3]
    report = check_product_rule(pair_state, pair_system, first, second, points=points)
    assert report.passed
    assert report.frame["leibniz"].max() <= 1e-12


def test_3g_uses_strided_pairs(grid_state: SpectralThermalState, grid_system: ManyBodySystem) -> None:
    report = check_3g(grid_state, grid_system)
    assert report.passed
    assert len(report.frame) == (grid_system.spec.grid_points // 4) ** 2
    assert report.frame["construction"].max() <= 1e-12


def test_canonical_shifts_on_oscillator(osc_system: ManyBodySystem) -> None:
    # default projection keeps the lowest half of the spectrum
    assert canonical_shift_residual(osc_system, shift=0.7) <= 1e-9
    assert canonical_shift_residual(osc_system, shift=0.7, n_states=osc_system.dim // 2) <= 1e-9


def test_canonical_shifts_on_grand_oscillator() -> None:
    spec = BasisSpec(kind="oscillator", n_max=30, eval_points=21, x_span=4.0)
    sys = build_grand_system(spec, max_particles=1, external_potential=harmonic_potential())
    assert sys.is_grand
    assert canonical_shift_residual(sys, shift=-1.3) <= 1e-9


def test_nearest_point_snaps_onto_the_grid(grid_system: ManyBodySystem) -> None:
    points = grid_system.evaluation_points
    assert nearest_point(grid_system, points[3] + 0.01) == points[3]


def test_doubling_study_passes_on_decay() -> None:
    spec = BasisSpec(kind="grid", grid_points=8, box_length=4.0)
    report = doubling_study(
        "synthetic",
        spec,
        lambda basis: build_many_body(basis, particles=1),
        lambda sys: 1.0 / sys.dim**2,
    )
    assert report.rule_class is RuleClass.CONVERGENCE
    assert list(report.frame["size"]) == [8, 16, 32]
    assert report.passed
    assert report.summary()["floor"] == pytest.approx(1e-10)


def test_doubling_study_fails_without_decay() -> None:
    spec = BasisSpec(kind="grid", grid_points=8, box_length=4.0)
    report = doubling_study(
        "stalled", spec, lambda basis: build_many_body(basis, particles=1), lambda sys: 1e-3
    )
    assert not report.passed


def test_doubling_study_accepts_residuals_at_the_floor() -> None:
    spec = BasisSpec(kind="grid", grid_points=8, box_length=4.0)
    report = doubling_study(
        "converged", spec, lambda basis: build_many_body(basis, particles=1), lambda sys: 1e-13
    )
    assert report.passed


def test_empty_report_passes_with_zero_residual() -> None:
    report = build_report("empty", [], 1e-9)
    assert report.max_residual == 0.0
    assert report.passed


@pytest.mark.parametrize(
    "residual",
    [density_hyperforce_residual, external_force_residual],
    ids=["density_hyperforce", "external_force_split"],
)
def test_local_identities_converge_on_the_grid(residual) -> None:
    spec = BasisSpec(kind="grid", grid_points=16, box_length=8.0)
    report = doubling_study(
        residual.__name__,
        spec,
        lambda basis: build_many_body(basis, particles=1, external_potential=harmonic_potential()),
        lambda sys: residual(sys, 0.0, 8),
        levels=3,
    )
    assert len(report.frame) == 3
    assert report.passed
    values = list(report.frame["residual"])
    assert values[0] > values[1] > values[2]

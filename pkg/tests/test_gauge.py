from __future__ import annotations

import numpy as np
import pytest

from gauge import (
    RepresentationError,
    ShiftField,
    ShiftFieldError,
    check_adjoint_covariance,
    check_anti_self_adjoint,
    check_lie_algebra,
    check_sigma_commutator,
    constant_field,
    cosine_field,
    decays_under_doubling,
    force_density,
    gaussian_field,
    hyperforce_density,
    lie_bracket_field,
    power_field,
    projected_residual,
    shift_generator,
    sigma_apply,
    sigma_integrated_apply,
    sine_field,
)
from operators import DimensionMismatchError, identity, max_abs, random_hermitian
from sumrules import doubling_study
from systems import BasisSpec, ManyBodySystem, build_many_body, harmonic_potential


def test_sigma_annihilates_identity(grid_system: ManyBodySystem) -> None:
    for r in grid_system.evaluation_points[::7]:
        assert max_abs(sigma_apply(grid_system, r, identity(grid_system.dim))) == 0.0


def test_sigma_preserves_hermiticity(grid_system: ManyBodySystem) -> None:
    a = random_hermitian(grid_system.dim, seed=5)
    r = grid_system.evaluation_points[10]
    shifted = sigma_apply(grid_system, r, a)
    assert shifted.is_hermitian(1e-10)


def test_sigma_rejects_foreign_dimension(grid_system: ManyBodySystem) -> None:
    with pytest.raises(DimensionMismatchError):
        sigma_apply(grid_system, grid_system.evaluation_points[0], np.eye(3))


def test_force_density_is_additive(pair_system: ManyBodySystem) -> None:
    r = pair_system.evaluation_points[8]
    force = force_density(pair_system, r)
    assert force.additivity_residual() <= 1e-12 * max(1.0, max_abs(force.total))
    assert set(force.parts()) == {"kinetic", "interparticle", "external"}


def test_anti_self_adjointness(grid_system: ManyBodySystem) -> None:
    a = random_hermitian(grid_system.dim, seed=1)
    b = random_hermitian(grid_system.dim, seed=2)
    for r in grid_system.evaluation_points[::5]:
        assert check_anti_self_adjoint(grid_system, r, a, b) <= 1e-12


def test_adjoint_covariance_for_non_hermitian_operator(
    osc_system: ManyBodySystem, rng: np.random.Generator
) -> None:
    dim = osc_system.dim
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    assert check_adjoint_covariance(osc_system, 0.4, a) <= 1e-12


def test_integrated_shift_matches_weighted_sum_on_grid(grid_system: ManyBodySystem) -> None:
    field = power_field(2, scale=0.3)
    a = random_hermitian(grid_system.dim, seed=9)
    h = grid_system.spec.spacing
    summed = sum(
        h * float(field(r)) * sigma_apply(grid_system, r, a).entries
        for r in grid_system.evaluation_points
    )
    integrated = sigma_integrated_apply(grid_system, field, a).entries
    assert np.max(np.abs(summed - integrated)) <= 1e-10 * max(1.0, np.max(np.abs(integrated)))


def test_constant_shift_of_position_is_particle_number(osc_system: ManyBodySystem) -> None:
    shifted = sigma_integrated_apply(osc_system, constant_field(1.5), osc_system.position_sum)
    difference = shifted.entries - 1.5 * osc_system.number_operator.entries
    assert projected_residual(osc_system, difference) <= 1e-10


def test_shift_generator_is_hermitian(pair_system: ManyBodySystem) -> None:
    generator = shift_generator(pair_system, sine_field(0.5))
    assert generator.is_hermitian()


def test_lie_bracket_of_linear_and_quadratic_fields() -> None:
    bracket = lie_bracket_field(power_field(1), power_field(2))
    xs = np.linspace(-2.0, 2.0, 9)
    np.testing.assert_allclose(bracket(xs), xs**2, atol=1e-12)
    np.testing.assert_allclose(bracket.derivative(xs), 2.0 * xs, atol=1e-6)


def test_lie_bracket_of_sine_and_cosine_is_constant() -> None:
    bracket = lie_bracket_field(sine_field(), cosine_field())
    xs = np.linspace(-3.0, 3.0, 13)
    np.testing.assert_allclose(bracket(xs), -np.ones_like(xs), atol=1e-12)


def test_field_gradients_validate() -> None:
    for field in (constant_field(2.0), power_field(3), sine_field(2.0), gaussian_field(0.5, 0.7)):
        assert field.validate() is field


def test_inconsistent_gradient_is_rejected() -> None:
    broken = ShiftField(eval=np.sin, grad=np.sin, label="broken")
    with pytest.raises(ShiftFieldError, match="broken"):
        broken.validate()
    with pytest.raises(ShiftFieldError):
        gaussian_field(0.0, 0.0)


def test_sigma_commutator_vanishes_for_distant_points(grid_system: ManyBodySystem) -> None:
    a = random_hermitian(grid_system.dim, seed=4)
    points = grid_system.evaluation_points
    assert check_sigma_commutator(grid_system, points[5], points[20], a) <= 1e-10
    assert check_sigma_commutator(grid_system, points[12], points[12], a) == 0.0


def test_sigma_commutator_needs_a_grid(osc_system: ManyBodySystem) -> None:
    with pytest.raises(RepresentationError, match="grid"):
        check_sigma_commutator(osc_system, 0.0, 0.2, identity(osc_system.dim))


def test_lie_algebra_for_constant_fields(grid_system: ManyBodySystem) -> None:
    a = random_hermitian(grid_system.dim, seed=6)
    residual = check_lie_algebra(grid_system, constant_field(1.0), constant_field(-0.5), a)
    assert residual <= 1e-10


@pytest.mark.parametrize(
    ("residuals", "expected"),
    [
        ([1.0, 0.4, 0.1], True),
        ([1.0, 0.8], False),
        ([1e-3, 1e-11, 2e-11], True),
        ([1.0], False),
    ],
)
def test_decays_under_doubling(residuals: list[float], expected: bool) -> None:
    assert decays_under_doubling(residuals) is expected


def test_hyperforce_density_is_the_shifted_observable(grid_system: ManyBodySystem) -> None:
    a = random_hermitian(grid_system.dim, seed=17)
    r = grid_system.evaluation_points[7]
    np.testing.assert_array_equal(
        hyperforce_density(grid_system, r, a).entries, sigma_apply(grid_system, r, a).entries
    )
    assert max_abs(hyperforce_density(grid_system, r, identity(grid_system.dim))) <= 1e-14


def _periodic_trap(spec: BasisSpec) -> ManyBodySystem:
    return build_many_body(spec, particles=1, external_potential=harmonic_potential())


def _wide_bump(sys: ManyBodySystem) -> np.ndarray:
    return sys.lift(sys.single.function_of_position(lambda x: np.exp(-(x**2) / 8.0)).entries).entries


PERIODIC_SPEC = BasisSpec(
    kind="grid",
    grid_points=32,
    box_length=16.0,
    boundary="periodic",
    momentum_scheme="spectral",
)


def test_kronecker_sigma_commutator_is_reported_for_neighbours(grid_system: ManyBodySystem) -> None:
    a = random_hermitian(grid_system.dim, seed=8)
    points = grid_system.evaluation_points
    assert check_sigma_commutator(grid_system, points[11], points[11], a, n_states=8) == 0.0
    neighbours = check_sigma_commutator(grid_system, points[10], points[11], a, n_states=8)
    assert np.isfinite(neighbours)
    assert neighbours > 0.0


def test_smeared_sigma_commutator_decays_under_doubling() -> None:
    report = doubling_study(
        "sigma_commutator",
        PERIODIC_SPEC,
        _periodic_trap,
        lambda sys: check_sigma_commutator(
            sys, 0.0, 0.5, _wide_bump(sys), smearing=1.0, n_states=4
        ),
        levels=3,
    )
    assert len(report.frame) == 3
    assert report.passed


def test_lie_algebra_with_bounded_fields_decays_under_doubling() -> None:
    first = gaussian_field(0.0, 1.0, normalized=False)
    second = gaussian_field(0.5, 1.0, normalized=False)
    report = doubling_study(
        "lie_algebra",
        PERIODIC_SPEC,
        _periodic_trap,
        lambda sys: check_lie_algebra(sys, first, second, _wide_bump(sys), n_states=4),
        levels=3,
    )
    assert len(report.frame) == 3
    assert report.passed


def test_lie_algebra_of_polynomial_fields_on_oscillator() -> None:
    spec = BasisSpec(kind="oscillator", n_max=64, eval_points=21, x_span=4.0)
    residuals = []
    for basis in (spec, spec.doubled()):
        sys = build_many_body(basis, particles=1, external_potential=harmonic_potential())
        a = sys.single.function_of_position(lambda x: np.exp(-0.5 * x**2))
        residuals.append(check_lie_algebra(sys, power_field(1), power_field(2), a, n_states=8))
    assert decays_under_doubling(residuals)

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from operators import identity, residual_norm, spectral_decompose
from systems import (
    BasisSpec,
    BasisSpecError,
    EvaluationPointError,
    ManyBodySystem,
    Profile,
    SystemBuildError,
    build_grand_system,
    build_many_body,
    build_single_particle,
    current_operator,
    density_operator,
    exchange_projector,
    gaussian_pair_potential,
    harmonic_potential,
    hermite_functions,
    locate_point,
    low_subspace_projector,
    tabulated_potential,
    tilted_potential,
    with_asymmetry,
)


def test_oscillator_spectrum_is_n_plus_half() -> None:
    spec = BasisSpec(kind="oscillator", n_max=60)
    sys = build_many_body(spec, particles=1, external_potential=harmonic_potential())
    levels = spectral_decompose(sys.hamiltonian).eigenvalues[:10]
    np.testing.assert_allclose(levels, np.arange(10) + 0.5, atol=1e-9)


def test_hermite_functions_are_orthonormal() -> None:
    x = np.linspace(-12.0, 12.0, 4001)
    phi = hermite_functions(6, x)
    overlap = (phi @ phi.T) * (x[1] - x[0])
    np.testing.assert_allclose(overlap, np.eye(7), atol=1e-8)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"kind": "grid", "grid_points": 4},
        {"kind": "grid", "box_length": -1.0},
        {"kind": "grid", "boundary": "reflecting"},
        {"kind": "oscillator", "n_max": 3},
        {"kind": "oscillator", "omega": 0.0},
        {"kind": "lattice"},
    ],
)
def test_basis_spec_rejects_invalid_settings(kwargs: dict) -> None:
    with pytest.raises(BasisSpecError):
        BasisSpec(**kwargs)


def test_doubled_spec_keeps_box_and_doubles_resolution(grid_spec: BasisSpec, osc_spec: BasisSpec) -> None:
    finer = grid_spec.doubled()
    assert finer.grid_points == 64
    assert finer.box_length == grid_spec.box_length
    assert finer.spacing == pytest.approx(grid_spec.spacing / 2)
    assert osc_spec.doubled().n_max == 80


def test_grid_points_are_centred_cells(grid_system: ManyBodySystem) -> None:
    points = grid_system.evaluation_points
    assert points.size == 32
    np.testing.assert_allclose(points, -points[::-1], atol=1e-12)
    np.testing.assert_allclose(np.diff(points), 10.0 / 32)


def test_density_sums_to_particle_count_on_grid(grid_system: ManyBodySystem) -> None:
    h = grid_system.spec.spacing
    total = sum(h * grid_system.density_at(r).entries for r in grid_system.evaluation_points)
    assert residual_norm(total, grid_system.number_operator) <= 1e-12


def test_pair_density_counts_two_particles(pair_system: ManyBodySystem) -> None:
    h = pair_system.spec.spacing
    total = sum(h * pair_system.density_at(r).entries for r in pair_system.evaluation_points)
    assert residual_norm(total, 2.0 * identity(pair_system.dim).entries) <= 1e-12


def test_local_operators_are_hermitian(osc_system: ManyBodySystem) -> None:
    for r in (0.0, 1.0, -2.0):
        assert osc_system.density_at(r).is_hermitian()
        assert osc_system.current_at(r).is_hermitian()


def test_density_rejects_points_outside_the_evaluation_set(osc_system: ManyBodySystem) -> None:
    with pytest.raises(EvaluationPointError, match="not an evaluation point"):
        osc_system.density_at(0.123)
    with pytest.raises(EvaluationPointError):
        locate_point(np.array([]), 0.0)


@pytest.mark.parametrize(
    ("grid_points", "statistics", "expected"),
    [
        (8, "distinguishable", 64),
        (8, "boson", 36),
        (8, "fermion", 28),
        (16, "distinguishable", 256),
        (16, "boson", 136),
        (16, "fermion", 120),
    ],
)
def test_two_particle_sector_dimension(grid_points: int, statistics: str, expected: int) -> None:
    spec = BasisSpec(kind="grid", grid_points=grid_points, box_length=4.0)
    sys = build_many_body(spec, particles=2, statistics=statistics)
    assert sys.dim == expected
    assert sys.hamiltonian.is_hermitian()
    assert len(sys.positions) == 2


def test_exchange_projector_is_idempotent() -> None:
    spec = BasisSpec(kind="grid", grid_points=8, box_length=4.0)
    sys = build_many_body(spec, particles=2, statistics="fermion")
    projector = exchange_projector(sys.sectors[0]).entries
    assert np.max(np.abs(projector @ projector - projector)) <= 1e-12
    assert np.trace(projector).real == pytest.approx(sys.dim)


def test_build_rejects_unsupported_requests(grid_spec: BasisSpec) -> None:
    with pytest.raises(SystemBuildError, match="at most"):
        build_many_body(grid_spec, particles=3)
    with pytest.raises(SystemBuildError, match="statistics"):
        build_many_body(grid_spec, particles=2, statistics="anyon")
    with pytest.raises(SystemBuildError):
        build_many_body(grid_spec, particles=0)


def test_grand_system_stacks_sectors(grand_system: ManyBodySystem) -> None:
    assert grand_system.is_grand
    assert [sector.dim for sector in grand_system.sectors] == [1, 10, 55]
    counts = np.diag(grand_system.number_operator.entries).real
    assert np.count_nonzero(counts == 0.0) == 1
    assert np.count_nonzero(counts == 1.0) == 10
    assert np.count_nonzero(counts == 2.0) == 55
    assert grand_system.hamiltonian.is_hermitian()


def test_potentials_evaluate_pointwise() -> None:
    trap = harmonic_potential(omega=2.0)
    np.testing.assert_allclose(trap(np.array([1.0])), [2.0])
    tilt = tilted_potential(0.5, base=trap)
    np.testing.assert_allclose(tilt(np.array([1.0])), [2.5])
    table = tabulated_potential([0.0, 1.0, 2.0], [0.0, 2.0, 0.0])
    np.testing.assert_allclose(table(np.array([0.5, 1.5])), [1.0, 1.0])


def test_tabulated_potential_requires_increasing_points() -> None:
    with pytest.raises(SystemBuildError):
        tabulated_potential([0.0, 0.0, 1.0], [1.0, 2.0, 3.0])
    with pytest.raises(SystemBuildError):
        tabulated_potential([0.0, 1.0], [1.0])


def test_with_asymmetry_breaks_hermiticity_only_when_requested(grid_system: ManyBodySystem) -> None:
    assert with_asymmetry(grid_system, 0.0) is grid_system
    corrupted = with_asymmetry(grid_system, 1e-3, seed=7)
    assert not corrupted.hamiltonian.is_hermitian()
    assert grid_system.hamiltonian.is_hermitian()


def test_low_subspace_projector(grid_system: ManyBodySystem) -> None:
    projector = low_subspace_projector(grid_system, 5).entries
    assert np.trace(projector).real == pytest.approx(5.0)
    assert np.max(np.abs(projector @ projector - projector)) <= 1e-10
    with pytest.raises(SystemBuildError):
        low_subspace_projector(grid_system, 0)


def test_profile_validates_and_integrates() -> None:
    profile = Profile(np.array([0.0, 0.5, 1.0]), np.array([1.0, 1.0, 1.0]), label="flat")
    assert profile.integrate() == pytest.approx(1.5)
    frame = profile.to_frame(["value"])
    assert list(frame.columns) == ["r", "value"]
    with pytest.raises(ValueError, match="strictly increasing"):
        Profile(np.array([1.0, 0.0]), np.array([1.0, 1.0]))


def test_single_particle_grid_operators(grid_spec: BasisSpec) -> None:
    single = build_single_particle(grid_spec)
    np.testing.assert_allclose(np.diag(single.position.entries).real, single.coordinates)
    assert single.momentum.is_hermitian()
    assert single.kinetic.is_hermitian()
    assert single.dim == grid_spec.grid_points


def test_integrated_current_is_total_momentum(grid_system: ManyBodySystem) -> None:
    h = grid_system.spec.spacing
    points = grid_system.evaluation_points
    total = sum(h * current_operator(grid_system, r).entries for r in points)
    assert residual_norm(total, grid_system.single.momentum) <= 1e-12
    r = points[5]
    assert density_operator(grid_system, r) is grid_system.density_at(r)
    assert current_operator(grid_system, r).is_hermitian()


def test_oscillator_hamiltonian_is_exact_up_to_the_last_level(osc_system: ManyBodySystem) -> None:
    n_max = osc_system.spec.n_max
    expected = np.diag(np.arange(n_max + 1) + 0.5)
    assert residual_norm(osc_system.hamiltonian, expected) <= 1e-10
    levels = spectral_decompose(osc_system.hamiltonian).eigenvalues
    assert levels[-1] == pytest.approx(n_max + 0.5, abs=1e-10)


def test_oscillator_commutator_carries_the_truncation_edge(osc_spec: BasisSpec) -> None:
    single = build_single_particle(osc_spec)
    x, p = single.position.entries, single.momentum.entries
    levels = osc_spec.n_max + 1
    edge = np.zeros((levels, levels))
    edge[-1, -1] = 1.0
    expected = 1j * osc_spec.hbar * (np.eye(levels) - levels * edge)
    np.testing.assert_allclose(x @ p - p @ x, expected, atol=1e-10)


def test_oscillator_position_function_matches_ladder_algebra(osc_spec: BasisSpec) -> None:
    single = build_single_particle(osc_spec)
    square = single.function_of_position(lambda x: x**2).entries
    levels = osc_spec.n_max + 1
    # <n|x^2|n> = (n + 1/2) hbar / (m omega), including the last kept level
    np.testing.assert_allclose(np.diag(square).real, np.arange(levels) + 0.5, atol=1e-10)
    assert single.function_of_position(lambda x: x**2).is_hermitian()


def test_periodic_spectral_momentum_spectrum() -> None:
    spec = BasisSpec(
        kind="grid",
        grid_points=16,
        box_length=8.0,
        boundary="periodic",
        momentum_scheme="spectral",
    )
    single = build_single_particle(spec)
    wavenumbers = np.fft.fftfreq(16, d=1.0 / 16)
    wavenumbers[8] = 0.0
    expected = np.sort(2.0 * np.pi * spec.hbar * wavenumbers / spec.box_length)
    levels = spectral_decompose(single.momentum).eigenvalues
    np.testing.assert_allclose(levels, expected, atol=1e-10)


@pytest.mark.parametrize("particles", [1, 2])
def test_total_momentum_commutes_without_external_potential(particles: int) -> None:
    spec = BasisSpec(
        kind="grid",
        grid_points=12,
        box_length=6.0,
        boundary="periodic",
        momentum_scheme="spectral",
    )
    sys = build_many_body(
        spec,
        particles=particles,
        statistics="boson",
        pair_potential=gaussian_pair_potential(strength=0.0),
    )
    total = sys.lift(sys.single.momentum.entries).entries
    h = sys.hamiltonian.entries
    assert np.max(np.abs(total @ h - h @ total)) <= 1e-10


def test_local_operators_are_shared_across_threads(grid_spec: BasisSpec) -> None:
    sys = build_many_body(grid_spec, particles=1, external_potential=harmonic_potential())
    r = float(sys.evaluation_points[3])
    with ThreadPoolExecutor(max_workers=4) as pool:
        results = list(pool.map(lambda _: sys.density_at(r), range(16)))
    assert all(result is results[0] for result in results)

from __future__ import annotations

# Purpose: Assemble one- and two-particle Hamiltonians, exchange sectors and local operators.
# Date: 2026-10-06
# Related tests: tests/test_systems.py

"""Many-body systems built from a single-particle basis."""

import logging
import threading
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Literal, Sequence

import numpy as np
import scipy.linalg

from operators import (
    OperatorMatrix,
    hermitian_part,
    identity,
    max_abs,
    spectral_decompose,
)

from .basis import BasisSpec, SingleParticleOperators, build_single_particle, locate_point

__all__ = [
    "SystemBuildError",
    "Statistics",
    "Sector",
    "ManyBodySystem",
    "build_many_body",
    "build_grand_system",
    "density_operator",
    "current_operator",
    "gaussian_pair_potential",
    "harmonic_potential",
    "tilted_potential",
    "tabulated_potential",
    "with_asymmetry",
    "low_subspace_projector",
    "exchange_projector",
]

logger = logging.getLogger(__name__)

Statistics = Literal["distinguishable", "boson", "fermion"]
PairPotential = Callable[[np.ndarray, np.ndarray], np.ndarray]
ExternalPotential = Callable[[np.ndarray], np.ndarray]

MAX_PARTICLES = 2


class SystemBuildError(ValueError):
    """Raised when a many-body system cannot be assembled."""


def gaussian_pair_potential(strength: float = 1.0, width: float = 1.0) -> PairPotential:
    """u(x1, x2) = strength * exp(-(x1 - x2)^2 / (2 width^2))."""

    def pair(x1: np.ndarray, x2: np.ndarray) -> np.ndarray:
        return strength * np.exp(-((x1 - x2) ** 2) / (2.0 * width**2))

    return pair


def harmonic_potential(omega: float = 1.0, mass: float = 1.0, center: float = 0.0) -> ExternalPotential:
    def trap(x: np.ndarray) -> np.ndarray:
        return 0.5 * mass * omega**2 * (x - center) ** 2

    return trap


def tilted_potential(force: float, base: ExternalPotential | None = None) -> ExternalPotential:
    """Add a uniform tilt f*x to an optional base potential."""

    def tilt(x: np.ndarray) -> np.ndarray:
        values = force * np.asarray(x, dtype=float)
        return values if base is None else values + base(x)

    return tilt


def tabulated_potential(points: Sequence[float], values: Sequence[float]) -> ExternalPotential:
    """Piecewise-linear potential through tabulated (x, V) pairs."""
    xs = np.asarray(points, dtype=float)
    vs = np.asarray(values, dtype=float)
    if xs.ndim != 1 or xs.shape != vs.shape or xs.size < 2:
        raise SystemBuildError("tabulated potential needs matching 1-D point/value lists (>= 2 entries)")
    if np.any(np.diff(xs) <= 0.0):
        raise SystemBuildError("tabulated potential points must be strictly increasing")

    def table(x: np.ndarray) -> np.ndarray:
        return np.interp(x, xs, vs)

    return table


@dataclass(frozen=True, eq=False)
class Sector:
    """Fixed particle-number block with its exchange isometry.

    ``isometry`` maps the sector onto the tensor-product space; it is ``None``
    when the sector is the full tensor space.
    """

    particles: int
    statistics: Statistics
    single_dim: int
    isometry: np.ndarray | None = None

    @property
    def dim(self) -> int:
        if self.particles == 0:
            return 1
        if self.isometry is not None:
            return int(self.isometry.shape[1])
        return self.single_dim**self.particles

    def compress(self, full: np.ndarray) -> np.ndarray:
        """Return Q† A Q (identity map without an isometry)."""
        if self.isometry is None:
            return full
        return self.isometry.conj().T @ full @ self.isometry

    def lift(self, one_body: np.ndarray) -> np.ndarray:
        """Return sum_i o_i restricted to the sector."""
        if self.particles == 0:
            return np.zeros((1, 1), dtype=np.complex128)
        if self.particles == 1:
            return np.asarray(one_body, dtype=np.complex128)
        eye = np.eye(self.single_dim)
        return self.compress(np.kron(one_body, eye) + np.kron(eye, one_body))

    def particle_operator(self, one_body: np.ndarray, index: int) -> np.ndarray:
        """Operator acting on particle ``index`` only, projected into the sector."""
        if self.particles == 1:
            return np.asarray(one_body, dtype=np.complex128)
        eye = np.eye(self.single_dim)
        full = np.kron(one_body, eye) if index == 0 else np.kron(eye, one_body)
        return self.compress(full)


def _exchange_isometry(single_dim: int, statistics: Statistics) -> np.ndarray | None:
    if statistics == "distinguishable":
        return None
    sign = 1.0 if statistics == "boson" else -1.0
    columns = []
    for a in range(single_dim):
        if statistics == "boson":
            diagonal = np.zeros(single_dim * single_dim)
            diagonal[a * single_dim + a] = 1.0
            columns.append(diagonal)
        for b in range(a + 1, single_dim):
            column = np.zeros(single_dim * single_dim)
            column[a * single_dim + b] = 1.0 / np.sqrt(2.0)
            column[b * single_dim + a] = sign / np.sqrt(2.0)
            columns.append(column)
    return np.array(columns, dtype=np.complex128).T


def _make_sector(particles: int, statistics: Statistics, single_dim: int) -> Sector:
    isometry = _exchange_isometry(single_dim, statistics) if particles == 2 else None
    return Sector(particles=particles, statistics=statistics, single_dim=single_dim, isometry=isometry)


@dataclass(frozen=True, eq=False)
class ManyBodySystem:
    """Finite matrix representation of H = T + U + V for up to two particles.

    Canonical systems carry one sector.  Grand systems stack the sectors
    N = 0..N_max block-diagonally; their per-particle operators are empty.
    """

    single: SingleParticleOperators
    statistics: Statistics
    sectors: tuple[Sector, ...]
    positions: tuple[OperatorMatrix, ...]
    momenta: tuple[OperatorMatrix, ...]
    kinetic: OperatorMatrix
    interparticle: OperatorMatrix
    external: OperatorMatrix
    external_potential: ExternalPotential | None = None
    pair_potential: PairPotential | None = None
    _local_cache: dict = field(init=False, default_factory=dict, repr=False)
    _local_lock: threading.Lock = field(init=False, default_factory=threading.Lock, repr=False)

    @property
    def spec(self) -> BasisSpec:
        return self.single.spec

    @property
    def hbar(self) -> float:
        return self.single.spec.hbar

    @property
    def mass(self) -> float:
        return self.single.spec.mass

    @property
    def dim(self) -> int:
        return self.kinetic.dim

    @property
    def is_grand(self) -> bool:
        return len(self.sectors) > 1

    @property
    def particles(self) -> int:
        """Particle number of a canonical system (largest N for grand systems)."""
        return max(sector.particles for sector in self.sectors)

    @cached_property
    def hamiltonian(self) -> OperatorMatrix:
        return OperatorMatrix(
            self.kinetic.entries + self.interparticle.entries + self.external.entries,
            hermitian_hint=self.external.hermitian_hint,
        )

    @property
    def evaluation_points(self) -> np.ndarray:
        return self.single.evaluation_points

    @property
    def sector_slices(self) -> tuple[slice, ...]:
        slices = []
        start = 0
        for sector in self.sectors:
            slices.append(slice(start, start + sector.dim))
            start += sector.dim
        return tuple(slices)

    def lift(self, one_body: np.ndarray) -> OperatorMatrix:
        """Sum a single-particle matrix over particles in every sector."""
        blocks = [sector.lift(one_body) for sector in self.sectors]
        return OperatorMatrix(_stack(blocks))

    @cached_property
    def position_sum(self) -> OperatorMatrix:
        return OperatorMatrix(self.lift(self.single.position.entries).entries, hermitian_hint=True)

    @cached_property
    def number_operator(self) -> OperatorMatrix:
        diagonal = np.concatenate(
            [np.full(sector.dim, float(sector.particles)) for sector in self.sectors]
        )
        return OperatorMatrix(np.diag(diagonal), hermitian_hint=True)

    def sector_hamiltonians(self) -> list[tuple[int, OperatorMatrix]]:
        h = self.hamiltonian.entries
        return [
            (sector.particles, OperatorMatrix(h[block, block], self.hamiltonian.hermitian_hint))
            for sector, block in zip(self.sectors, self.sector_slices)
        ]

    def point_index(self, r: float) -> int:
        return locate_point(self.evaluation_points, r)

    def density_at(self, r: float) -> OperatorMatrix:
        return self._local("density", r)

    def current_at(self, r: float) -> OperatorMatrix:
        return self._local("current", r)

    def _local(self, kind: str, r: float) -> OperatorMatrix:
        index = self.point_index(r)
        key = (kind, index)
        # runner items share one system across worker threads
        with self._local_lock:
            cached = self._local_cache.get(key)
            if cached is None:
                point = float(self.evaluation_points[index])
                if kind == "density":
                    factor = self.single.density_factor(point)
                else:
                    factor = self.single.current_factor(point)
                lifted = self.lift(factor).entries
                cached = OperatorMatrix(0.5 * (lifted + lifted.conj().T), hermitian_hint=True)
                self._local_cache[key] = cached
        return cached


def _stack(blocks: Sequence[np.ndarray]) -> np.ndarray:
    if len(blocks) == 1:
        return np.asarray(blocks[0], dtype=np.complex128)
    return scipy.linalg.block_diag(*blocks).astype(np.complex128)


def density_operator(sys: ManyBodySystem, r: float) -> OperatorMatrix:
    """Return the one-body density operator at an evaluation point.

    Raises:
        EvaluationPointError: If r is not one of the system's evaluation points.
    """
    return sys.density_at(r)


def current_operator(sys: ManyBodySystem, r: float) -> OperatorMatrix:
    """Return m J(r), the mass-scaled one-body current operator."""
    return sys.current_at(r)


def _pair_matrix(
    single: SingleParticleOperators, pair: PairPotential
) -> np.ndarray:
    spectrum = single.position_spectrum
    xs = spectrum.eigenvalues
    values = pair(xs[:, np.newaxis], xs[np.newaxis, :]).reshape(-1)
    basis = np.kron(spectrum.unitary, spectrum.unitary)
    return (basis * values[np.newaxis, :]) @ basis.conj().T


def _sector_parts(
    single: SingleParticleOperators,
    sector: Sector,
    external: np.ndarray,
    pair_full: np.ndarray | None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    kinetic = sector.lift(single.kinetic.entries)
    external_part = sector.lift(external)
    if sector.particles == 2 and pair_full is not None:
        interparticle = sector.compress(pair_full)
    else:
        interparticle = np.zeros((sector.dim, sector.dim), dtype=np.complex128)
    return kinetic, interparticle, external_part


def _validate_request(particles: int, statistics: str) -> None:
    if statistics not in ("distinguishable", "boson", "fermion"):
        raise SystemBuildError(f"unknown statistics {statistics!r}")
    if particles < 1:
        raise SystemBuildError(f"particle count must be at least 1, got {particles}")
    if particles > MAX_PARTICLES:
        raise SystemBuildError(
            f"at most {MAX_PARTICLES} particles are supported, got {particles}"
        )


def build_many_body(
    spec: BasisSpec,
    particles: int = 1,
    statistics: Statistics = "distinguishable",
    pair_potential: PairPotential | None = None,
    external_potential: ExternalPotential | None = None,
) -> ManyBodySystem:
    """Build a canonical system of one or two particles.

    Args:
        spec: Single-particle basis.
        particles: N, 1 or 2.
        statistics: Exchange symmetry of the two-particle space.
        pair_potential: u(x1, x2); defaults to a unit Gaussian for N=2.
        external_potential: V_ext(x); defaults to zero.

    Returns:
        ManyBodySystem: Hamiltonian parts projected onto the exchange sector.

    Raises:
        SystemBuildError: For unsupported particle counts or statistics.
    """
    _validate_request(particles, statistics)
    single = build_single_particle(spec)
    if particles == 2 and pair_potential is None:
        pair_potential = gaussian_pair_potential()
    sector = _make_sector(particles, statistics, single.dim)
    external = _external_matrix(single, external_potential)
    pair_full = _pair_matrix(single, pair_potential) if particles == 2 and pair_potential else None
    kinetic, interparticle, external_part = _sector_parts(single, sector, external, pair_full)

    positions = tuple(
        OperatorMatrix(sector.particle_operator(single.position.entries, i), hermitian_hint=True)
        for i in range(particles)
    )
    momenta = tuple(
        OperatorMatrix(sector.particle_operator(single.momentum.entries, i), hermitian_hint=True)
        for i in range(particles)
    )
    system = ManyBodySystem(
        single=single,
        statistics=statistics,
        sectors=(sector,),
        positions=positions,
        momenta=momenta,
        kinetic=OperatorMatrix(kinetic, hermitian_hint=True),
        interparticle=OperatorMatrix(interparticle, hermitian_hint=True),
        external=OperatorMatrix(external_part, hermitian_hint=True),
        external_potential=external_potential,
        pair_potential=pair_potential if particles == 2 else None,
    )
    logger.info(
        "Built %s system: N=%d %s, dim=%d",
        spec.kind,
        particles,
        statistics,
        system.dim,
    )
    return system


def build_grand_system(
    spec: BasisSpec,
    max_particles: int = 2,
    statistics: Statistics = "distinguishable",
    pair_potential: PairPotential | None = None,
    external_potential: ExternalPotential | None = None,
) -> ManyBodySystem:
    """Stack sectors N = 0..max_particles into one block-diagonal system."""
    _validate_request(max(max_particles, 1), statistics)
    single = build_single_particle(spec)
    if max_particles == 2 and pair_potential is None:
        pair_potential = gaussian_pair_potential()
    external = _external_matrix(single, external_potential)
    pair_full = _pair_matrix(single, pair_potential) if max_particles == 2 and pair_potential else None

    sectors = tuple(_make_sector(n, statistics, single.dim) for n in range(max_particles + 1))
    kinetic_blocks, pair_blocks, external_blocks = [], [], []
    for sector in sectors:
        if sector.particles == 0:
            zero = np.zeros((1, 1), dtype=np.complex128)
            kinetic_blocks.append(zero)
            pair_blocks.append(zero)
            external_blocks.append(zero)
            continue
        kinetic, interparticle, external_part = _sector_parts(single, sector, external, pair_full)
        kinetic_blocks.append(kinetic)
        pair_blocks.append(interparticle)
        external_blocks.append(external_part)

    system = ManyBodySystem(
        single=single,
        statistics=statistics,
        sectors=sectors,
        positions=(),
        momenta=(),
        kinetic=OperatorMatrix(_stack(kinetic_blocks), hermitian_hint=True),
        interparticle=OperatorMatrix(_stack(pair_blocks), hermitian_hint=True),
        external=OperatorMatrix(_stack(external_blocks), hermitian_hint=True),
        external_potential=external_potential,
        pair_potential=pair_potential if max_particles == 2 else None,
    )
    logger.info(
        "Built grand %s system: N<=%d %s, dim=%d",
        spec.kind,
        max_particles,
        statistics,
        system.dim,
    )
    return system


def _external_matrix(
    single: SingleParticleOperators, potential: ExternalPotential | None
) -> np.ndarray:
    if potential is None:
        return np.zeros((single.dim, single.dim), dtype=np.complex128)
    return single.function_of_position(potential).entries


def with_asymmetry(sys: ManyBodySystem, amplitude: float, seed: int = 0) -> ManyBodySystem:
    """Return a copy whose external part carries a non-Hermitian perturbation.

    The perturbation is a seeded complex Gaussian matrix rescaled so that
    max|delta| = amplitude * max|H|.
    """
    if amplitude == 0.0:
        return sys
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((sys.dim, sys.dim)) + 1j * rng.standard_normal((sys.dim, sys.dim))
    scale = amplitude * max(max_abs(sys.hamiltonian), 1.0) / max_abs(raw)
    corrupted = OperatorMatrix(sys.external.entries + scale * raw)
    logger.warning(
        "Injected non-Hermitian perturbation of relative size %.3g (seed=%d)", amplitude, seed
    )
    return replace(sys, external=corrupted)


def low_subspace_projector(sys: ManyBodySystem, n_states: int | None = None) -> OperatorMatrix:
    """Projector onto the lowest eigenstates of H (ceil(dim/2) by default)."""
    count = int(np.ceil(sys.dim / 2)) if n_states is None else int(n_states)
    if not 0 < count <= sys.dim:
        raise SystemBuildError(f"cannot project onto {count} states of a {sys.dim}-dim space")
    spectrum = spectral_decompose(hermitian_part(sys.hamiltonian))
    low = spectrum.unitary[:, :count]
    return OperatorMatrix(low @ low.conj().T, hermitian_hint=True)


def exchange_projector(sector: Sector) -> OperatorMatrix:
    """Return P = Q Q† on the tensor space (identity without an isometry)."""
    if sector.isometry is None:
        return identity(sector.dim)
    return OperatorMatrix(sector.isometry @ sector.isometry.conj().T, hermitian_hint=True)


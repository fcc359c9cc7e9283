from __future__ import annotations

# Purpose: Canonical and grand-canonical thermal states from dense spectra.
# Date: 2026-10-08
# Related tests: tests/test_thermal.py

"""Thermal states, averages and thermodynamic potentials."""

import logging
from dataclasses import dataclass
from functools import cached_property
from math import lgamma
from typing import Literal, Sequence

import numpy as np
import scipy.linalg
from scipy.special import logsumexp

from operators import (
    DimensionMismatchError,
    OperatorMatrix,
    SpectralDecomposition,
    as_array,
    hermitian_part,
    spectral_decompose,
)
from systems import ManyBodySystem

__all__ = [
    "EnsembleError",
    "ThermalSector",
    "SpectralThermalState",
    "make_thermal_state",
    "make_grand_state",
    "thermal_state_for",
    "thermal_average",
    "free_energy",
    "grand_potential",
]

logger = logging.getLogger(__name__)

Ensemble = Literal["canonical", "grand"]


class EnsembleError(ValueError):
    """Raised for invalid temperatures, chemical potentials or sector lists."""


@dataclass(frozen=True, eq=False)
class ThermalSector:
    """One particle-number block of a thermal state.

    ``log_weight`` is beta*mu*N minus ln N! where the factorial applies.
    """

    particles: int
    decomposition: SpectralDecomposition
    log_weight: float = 0.0

    @property
    def dim(self) -> int:
        return self.decomposition.dim


@dataclass(frozen=True, eq=False)
class SpectralThermalState:
    """Thermal state exp(-beta K)/Z with K = H - mu N (+ ln N!/beta) per sector."""

    sectors: tuple[ThermalSector, ...]
    beta: float
    mu: float | None = None
    ensemble: Ensemble = "canonical"

    def __post_init__(self) -> None:
        if not np.isfinite(self.beta) or self.beta <= 0.0:
            raise EnsembleError(f"beta must be positive and finite, got {self.beta}")
        if not self.sectors:
            raise EnsembleError("a thermal state needs at least one sector")
        if self.ensemble == "canonical" and (len(self.sectors) != 1 or self.mu is not None):
            raise EnsembleError("canonical states carry exactly one sector and no chemical potential")
        if self.ensemble == "grand" and self.mu is None:
            raise EnsembleError("grand states need a chemical potential")

    @property
    def dim(self) -> int:
        return sum(sector.dim for sector in self.sectors)

    @cached_property
    def energies(self) -> np.ndarray:
        """Effective eigenvalues of K, concatenated sector by sector."""
        blocks = [
            sector.decomposition.eigenvalues - sector.log_weight / self.beta
            for sector in self.sectors
        ]
        return np.concatenate(blocks).astype(float)

    @cached_property
    def unitary(self) -> np.ndarray:
        blocks = [sector.decomposition.unitary for sector in self.sectors]
        if len(blocks) == 1:
            return blocks[0]
        return scipy.linalg.block_diag(*blocks)

    @cached_property
    def shift(self) -> float:
        return float(np.min(self.energies))

    @cached_property
    def shifted_energies(self) -> np.ndarray:
        return self.energies - self.shift

    @cached_property
    def log_partition(self) -> float:
        """ln Z (ln Xi for grand states)."""
        return float(logsumexp(-self.beta * self.shifted_energies) - self.beta * self.shift)

    @property
    def partition_sum(self) -> float:
        return float(np.exp(self.log_partition))

    @cached_property
    def populations(self) -> np.ndarray:
        """Normalized Boltzmann weights of the eigenstates of K."""
        boltzmann = np.exp(-self.beta * self.shifted_energies)
        return boltzmann / np.sum(boltzmann)

    @cached_property
    def shifted_partition(self) -> float:
        return float(np.sum(np.exp(-self.beta * self.shifted_energies)))

    def to_eigenbasis(self, operator: OperatorMatrix | np.ndarray) -> np.ndarray:
        matrix = self.require_shape(operator)
        return self.unitary.conj().T @ matrix @ self.unitary

    def from_eigenbasis(self, matrix: np.ndarray) -> np.ndarray:
        return self.unitary @ matrix @ self.unitary.conj().T

    def require_shape(self, operator: OperatorMatrix | np.ndarray) -> np.ndarray:
        matrix = as_array(operator)
        if matrix.shape != (self.dim, self.dim):
            raise DimensionMismatchError(
                f"operator shape {matrix.shape} does not match thermal state dimension {self.dim}"
            )
        return matrix

    def density_matrix(self) -> OperatorMatrix:
        return OperatorMatrix(
            (self.unitary * self.populations[np.newaxis, :]) @ self.unitary.conj().T,
            hermitian_hint=True,
        )

    def shifted_boltzmann(self) -> OperatorMatrix:
        """exp(-beta (K - K_min)); proportional to the density matrix."""
        boltzmann = np.exp(-self.beta * self.shifted_energies)
        return OperatorMatrix(
            (self.unitary * boltzmann[np.newaxis, :]) @ self.unitary.conj().T,
            hermitian_hint=True,
        )

    def free_energy(self) -> float:
        """-ln(Z)/beta; the grand potential for grand states."""
        return -self.log_partition / self.beta

    def grand_potential(self) -> float:
        if self.ensemble != "grand":
            raise EnsembleError("the grand potential needs a grand-canonical state")
        return -self.log_partition / self.beta


def make_thermal_state(
    hamiltonian: OperatorMatrix | np.ndarray, beta: float, *, particles: int = 0
) -> SpectralThermalState:
    """Build the canonical state of a Hermitian Hamiltonian.

    Args:
        hamiltonian: Hermitian H.
        beta: Inverse temperature, strictly positive.
        particles: Particle number recorded on the single sector.

    Returns:
        SpectralThermalState: One-sector canonical state.

    Raises:
        EnsembleError: If beta is not positive.
        HermiticityError: If H is not Hermitian.
    """
    if not np.isfinite(beta) or beta <= 0.0:
        raise EnsembleError(f"beta must be positive and finite, got {beta}")
    decomposition = spectral_decompose(hamiltonian)
    state = SpectralThermalState(
        sectors=(ThermalSector(particles=int(particles), decomposition=decomposition),),
        beta=float(beta),
    )
    logger.debug("Canonical state: dim=%d beta=%.4g lnZ=%.6g", state.dim, beta, state.log_partition)
    return state


def make_grand_state(
    sector_hamiltonians: Sequence[tuple[int, OperatorMatrix | np.ndarray]],
    beta: float,
    mu: float,
    *,
    factorial_weights: bool = False,
) -> SpectralThermalState:
    """Build a grand-canonical state from fixed-N blocks.

    Args:
        sector_hamiltonians: (N, H_N) pairs covering N = 0..N_max without gaps.
        beta: Inverse temperature.
        mu: Chemical potential.
        factorial_weights: Divide each sector by N! (distinguishable product bases).

    Raises:
        EnsembleError: For missing sectors or invalid beta/mu.
    """
    if not np.isfinite(beta) or beta <= 0.0:
        raise EnsembleError(f"beta must be positive and finite, got {beta}")
    if not np.isfinite(mu):
        raise EnsembleError(f"chemical potential must be finite, got {mu}")
    counts = [int(n) for n, _ in sector_hamiltonians]
    if counts != list(range(len(counts))):
        raise EnsembleError(f"grand state needs sectors N=0..N_max in order, got {counts}")
    sectors = []
    for particles, hamiltonian in sector_hamiltonians:
        log_weight = beta * mu * particles
        if factorial_weights:
            log_weight -= lgamma(particles + 1)
        sectors.append(
            ThermalSector(
                particles=int(particles),
                decomposition=spectral_decompose(hamiltonian),
                log_weight=log_weight,
            )
        )
    state = SpectralThermalState(sectors=tuple(sectors), beta=float(beta), mu=float(mu), ensemble="grand")
    logger.debug(
        "Grand state: sectors=%s beta=%.4g mu=%.4g lnXi=%.6g",
        counts,
        beta,
        mu,
        state.log_partition,
    )
    return state


def thermal_state_for(
    sys: ManyBodySystem, beta: float, mu: float | None = None
) -> SpectralThermalState:
    """Thermal state of the Hermitian part of a system's Hamiltonian.

    Grand systems need ``mu``; distinguishable grand systems carry 1/N! weights.
    """
    if sys.is_grand:
        if mu is None:
            raise EnsembleError("a grand system needs a chemical potential")
        blocks = hermitian_part(sys.hamiltonian).entries
        sector_hamiltonians = [
            (sector.particles, OperatorMatrix(blocks[block, block], hermitian_hint=True))
            for sector, block in zip(sys.sectors, sys.sector_slices)
        ]
        return make_grand_state(
            sector_hamiltonians,
            beta,
            mu,
            factorial_weights=sys.statistics == "distinguishable",
        )
    return make_thermal_state(hermitian_part(sys.hamiltonian), beta, particles=sys.particles)


def thermal_average(state: SpectralThermalState, operator: OperatorMatrix | np.ndarray) -> complex:
    """Return Tr(A exp(-beta K))/Z.

    Raises:
        DimensionMismatchError: If A does not match the state.
    """
    diagonal = np.einsum("ji,jk,ki->i", state.unitary.conj(), state.require_shape(operator), state.unitary)
    return complex(np.sum(state.populations * diagonal))


def free_energy(state: SpectralThermalState) -> float:
    return state.free_energy()


def grand_potential(state: SpectralThermalState) -> float:
    return state.grand_potential()

from __future__ import annotations

# Purpose: Mori (Kubo-Bogoliubov) product, covariance and Boltzmann-factor identities.
# Date: 2026-10-09
# Related tests: tests/test_thermal.py

"""Imaginary-time averaged scalar products in a thermal state."""

import logging

import numpy as np
from scipy.special import roots_legendre

from gauge import ShiftField, force_density, shift_generator, shift_with, sigma_integrated_apply
from operators import OperatorMatrix, as_array, max_abs
from systems import ManyBodySystem

from .ensemble import SpectralThermalState, thermal_average

__all__ = [
    "GAP_RTOL",
    "QUADRATURE_NODES",
    "gap_tolerance",
    "mori_kernel",
    "mori_product",
    "mori_product_quadrature",
    "mori_covariance",
    "check_boltzmann_identity",
    "check_gauge_invariance",
]

logger = logging.getLogger(__name__)

GAP_RTOL = 1e-8
QUADRATURE_NODES = 64


def gap_tolerance(state: SpectralThermalState) -> float:
    """1e-8 * max(1, spectral range) of the effective energies."""
    energies = state.shifted_energies
    spread = float(np.max(energies) - np.min(energies)) if energies.size else 0.0
    return GAP_RTOL * max(1.0, spread)


def mori_kernel(state: SpectralThermalState) -> np.ndarray:
    """Return w(E_m, E_n) / (beta Z) on shifted energies.

    w = (exp(-beta E_n) - exp(-beta E_m)) / (E_m - E_n) with the degenerate
    limit beta exp(-beta E) below the gap tolerance.
    """
    beta = state.beta
    energies = state.shifted_energies
    gap = energies[:, np.newaxis] - energies[np.newaxis, :]
    lower = np.minimum(energies[:, np.newaxis], energies[np.newaxis, :])
    distance = np.abs(gap)
    degenerate = distance <= gap_tolerance(state)
    safe = np.where(degenerate, 1.0, distance)
    split = np.exp(-beta * lower) * (-np.expm1(-beta * safe)) / safe
    midpoint = 0.5 * (energies[:, np.newaxis] + energies[np.newaxis, :])
    kernel = np.where(degenerate, beta * np.exp(-beta * midpoint), split)
    return kernel / (beta * state.shifted_partition)


def mori_product(
    state: SpectralThermalState,
    left: OperatorMatrix | np.ndarray,
    right: OperatorMatrix | np.ndarray,
) -> complex:
    """Closed-form (A|B) in the eigenbasis of the state.

    Raises:
        DimensionMismatchError: If A or B do not match the state.
    """
    a = state.to_eigenbasis(left)
    b = state.to_eigenbasis(right)
    return complex(np.sum(np.conj(a) * b * mori_kernel(state)))


def mori_product_quadrature(
    state: SpectralThermalState,
    left: OperatorMatrix | np.ndarray,
    right: OperatorMatrix | np.ndarray,
    nodes: int = QUADRATURE_NODES,
) -> complex:
    """(A|B) from Gauss-Legendre quadrature of the imaginary-time integral."""
    a = state.to_eigenbasis(left)
    b = state.to_eigenbasis(right)
    beta = state.beta
    energies = state.shifted_energies
    abscissae, weights = roots_legendre(nodes)
    times = 0.5 * beta * (abscissae + 1.0)
    overlap = np.conj(a) * b
    total = 0.0 + 0.0j
    for tau, weight in zip(times, weights):
        # exp(-tau E_n) exp(-(beta - tau) E_m), both exponents non-positive
        factor = np.exp(-tau * energies[:, np.newaxis] - (beta - tau) * energies[np.newaxis, :])
        total += 0.5 * beta * weight * np.sum(overlap * factor)
    return complex(total / (beta * state.shifted_partition))


def mori_covariance(
    state: SpectralThermalState,
    left: OperatorMatrix | np.ndarray,
    right: OperatorMatrix | np.ndarray,
) -> complex:
    """cov(A|B) = (A|B) - <A^dagger><B>."""
    mean_left_adjoint = np.conj(thermal_average(state, left))
    return mori_product(state, left, right) - mean_left_adjoint * thermal_average(state, right)


def check_boltzmann_identity(
    state: SpectralThermalState, sys: ManyBodySystem, r: float
) -> float:
    """Relative residual of sigma(r) exp(-beta K) against the imaginary-time force integral.

    Both sides use the shifted Boltzmann factor; the integral is evaluated in
    the eigenbasis with the same kernel as the Mori product.
    """
    current = sys.current_at(r)
    boltzmann = state.shifted_boltzmann()
    lhs = shift_with(current, boltzmann, sys.hbar).entries

    force = state.to_eigenbasis(force_density(sys, r).total)
    kernel = mori_kernel(state) * state.beta * state.shifted_partition
    rhs = state.from_eigenbasis(force * kernel)

    scale = max(
        max_abs(lhs),
        max_abs(rhs),
        2.0 * max_abs(current) * max_abs(boltzmann) / sys.hbar,
        np.finfo(float).tiny,
    )
    residual = float(np.max(np.abs(lhs - rhs), initial=0.0)) / scale
    logger.debug("Boltzmann identity at r=%.4g: %.3e", r, residual)
    return residual


def check_gauge_invariance(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    field: ShiftField,
    operator: OperatorMatrix | np.ndarray,
) -> float:
    """Relative residual of <Sigma[eps]A> + (A^dagger | beta F[eps]) with F[eps] = -Sigma[eps]H.

    This is the integrated hyperforce identity: averages do not change to
    first order under the shifting transformation generated by eps.
    """
    generator = shift_generator(sys, field)
    shifted = sigma_integrated_apply(sys, field, operator)
    force = -shift_with(generator, sys.hamiltonian, sys.hbar)
    mean_shift = thermal_average(state, shifted)
    adjoint = as_array(operator).conj().T
    mori_term = state.beta * mori_product(state, adjoint, force)
    scale = max(abs(mean_shift), abs(mori_term), max_abs(shifted), np.finfo(float).tiny)
    return abs(mean_shift + mori_term) / scale

from __future__ import annotations

# Purpose: Local and integrated shifting superoperators, force and hyperforce densities.
# Date: 2026-10-07
# Related tests: tests/test_gauge.py

"""Shifting superoperator actions on operator matrices."""

import logging
from dataclasses import dataclass

import numpy as np

from operators import DimensionMismatchError, OperatorMatrix, as_array, max_abs
from systems import ManyBodySystem

from .fields import ShiftField

__all__ = [
    "ForceDensity",
    "shift_with",
    "sigma_apply",
    "hyperforce_density",
    "force_density",
    "shift_generator",
    "sigma_integrated_apply",
]

logger = logging.getLogger(__name__)


def _require_dim(sys: ManyBodySystem, operator: OperatorMatrix | np.ndarray) -> np.ndarray:
    matrix = as_array(operator)
    if matrix.shape != (sys.dim, sys.dim):
        raise DimensionMismatchError(
            f"operator shape {matrix.shape} does not match system dimension {sys.dim}"
        )
    return matrix


def shift_with(
    generator: OperatorMatrix | np.ndarray, operator: OperatorMatrix | np.ndarray, hbar: float
) -> OperatorMatrix:
    """Return (-i/hbar) [A, G] for a given current or generator G."""
    a = as_array(operator)
    g = as_array(generator)
    if a.shape != g.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {g.shape}")
    result = (-1j / hbar) * (a @ g - g @ a)
    hermitian = bool(getattr(operator, "hermitian_hint", False))
    return OperatorMatrix(result, hermitian_hint=hermitian)


def sigma_apply(
    sys: ManyBodySystem, r: float, operator: OperatorMatrix | np.ndarray
) -> OperatorMatrix:
    """Apply sigma(r): A -> (-i/hbar) [A, m J(r)].

    Raises:
        DimensionMismatchError: If A does not act on the system's space.
        EvaluationPointError: If r is not an evaluation point.
    """
    _require_dim(sys, operator)
    return shift_with(sys.current_at(r), operator, sys.hbar)


def hyperforce_density(
    sys: ManyBodySystem, r: float, operator: OperatorMatrix | np.ndarray
) -> OperatorMatrix:
    """S_A(r) = sigma(r) A."""
    return sigma_apply(sys, r, operator)


@dataclass(frozen=True, eq=False)
class ForceDensity:
    """Force density operator at one point, split by Hamiltonian part."""

    total: OperatorMatrix
    kinetic: OperatorMatrix
    interparticle: OperatorMatrix
    external: OperatorMatrix

    def additivity_residual(self) -> float:
        parts = self.kinetic.entries + self.interparticle.entries + self.external.entries
        return float(np.max(np.abs(self.total.entries - parts), initial=0.0))

    def parts(self) -> dict[str, OperatorMatrix]:
        return {
            "kinetic": self.kinetic,
            "interparticle": self.interparticle,
            "external": self.external,
        }


def force_density(sys: ManyBodySystem, r: float) -> ForceDensity:
    """Return F(r) = -sigma(r) H together with its kinetic, pair and external parts."""
    current = sys.current_at(r)
    kinetic = -shift_with(current, sys.kinetic, sys.hbar)
    interparticle = -shift_with(current, sys.interparticle, sys.hbar)
    external = -shift_with(current, sys.external, sys.hbar)
    total = -shift_with(current, sys.hamiltonian, sys.hbar)
    logger.debug(
        "Force density at r=%.4g: max|F|=%.3e", r, max_abs(total)
    )
    return ForceDensity(total=total, kinetic=kinetic, interparticle=interparticle, external=external)


def shift_generator(sys: ManyBodySystem, field: ShiftField) -> OperatorMatrix:
    """Return G = (1/2) sum_i [eps(x_i) p_i + p_i eps(x_i)]."""
    single = sys.single
    eps = single.function_of_position(field).entries
    p = single.momentum.entries
    one_body = 0.5 * (eps @ p + p @ eps)
    lifted = sys.lift(one_body).entries
    return OperatorMatrix(0.5 * (lifted + lifted.conj().T), hermitian_hint=True)


def sigma_integrated_apply(
    sys: ManyBodySystem, field: ShiftField, operator: OperatorMatrix | np.ndarray
) -> OperatorMatrix:
    """Apply Sigma[eps]: A -> (-i/hbar) [A, G_eps].

    On grids this equals the Riemann sum of eps(x_k) sigma(x_k) A with weight h.
    """
    _require_dim(sys, operator)
    return shift_with(shift_generator(sys, field), operator, sys.hbar)

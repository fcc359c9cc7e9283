from __future__ import annotations

# Purpose: Algebraic identities of the shifting superoperators (trace, adjoint, commutator, Lie algebra).
# Date: 2026-10-08
# Related tests: tests/test_gauge.py

"""Structure checks for sigma(r) and Sigma[eps]."""

import logging
from typing import Sequence

import numpy as np

from operators import OperatorMatrix, adjoint, as_array, hermitian_part, max_abs, spectral_decompose
from systems import ManyBodySystem

from .fields import ShiftField, gaussian_field, lie_bracket_field
from .shifting import sigma_apply, sigma_integrated_apply

__all__ = [
    "RepresentationError",
    "DEFAULT_DECAY",
    "DEFAULT_FLOOR",
    "trace_product",
    "projected_residual",
    "decays_under_doubling",
    "check_anti_self_adjoint",
    "check_adjoint_covariance",
    "check_sigma_commutator",
    "check_lie_algebra",
]

logger = logging.getLogger(__name__)

DEFAULT_DECAY = 0.5
DEFAULT_FLOOR = 1e-10


class RepresentationError(ValueError):
    """Raised when a check needs a basis kind the system does not use."""


def trace_product(left: OperatorMatrix | np.ndarray, right: OperatorMatrix | np.ndarray) -> tuple[complex, float]:
    """Return Tr(AB) and the sum of |A_ij B_ji| bounding its round-off."""
    terms = as_array(left) * as_array(right).T
    return complex(np.sum(terms)), float(np.sum(np.abs(terms)))


def projected_residual(
    sys: ManyBodySystem,
    difference: OperatorMatrix | np.ndarray,
    n_states: int | None = None,
) -> float:
    """Max-abs of <n|X|m> over the lowest eigenstates of H.

    Uses ceil(dim/2) states unless ``n_states`` is given.
    """
    count = int(np.ceil(sys.dim / 2)) if n_states is None else min(int(n_states), sys.dim)
    spectrum = spectral_decompose(hermitian_part(sys.hamiltonian))
    low = spectrum.unitary[:, :count]
    block = low.conj().T @ as_array(difference) @ low
    return float(np.max(np.abs(block), initial=0.0))


def decays_under_doubling(
    residuals: Sequence[float],
    factor: float = DEFAULT_DECAY,
    floor: float = DEFAULT_FLOOR,
) -> bool:
    """True when each doubling shrinks the residual by ``factor`` or it is already at ``floor``."""
    values = [float(value) for value in residuals]
    if len(values) < 2:
        return False
    for previous, current in zip(values, values[1:]):
        if current <= floor:
            continue
        if current > factor * previous:
            return False
    return True


def check_anti_self_adjoint(
    sys: ManyBodySystem,
    r: float,
    first: OperatorMatrix | np.ndarray,
    second: OperatorMatrix | np.ndarray,
) -> float:
    """Relative residual of Tr A[sigma(r)B] + Tr[sigma(r)A]B."""
    shifted_second = sigma_apply(sys, r, second)
    shifted_first = sigma_apply(sys, r, first)
    lhs, lhs_scale = trace_product(first, shifted_second)
    rhs, rhs_scale = trace_product(shifted_first, second)
    scale = max(1.0, lhs_scale, rhs_scale)
    residual = abs(lhs + rhs) / scale
    logger.debug("Anti-self-adjointness at r=%.4g: %.3e", r, residual)
    return residual


def check_adjoint_covariance(
    sys: ManyBodySystem, r: float, operator: OperatorMatrix | np.ndarray
) -> float:
    """Relative residual of [sigma(r)A]^dagger = sigma(r)A^dagger."""
    shifted = sigma_apply(sys, r, operator)
    shifted_adjoint = sigma_apply(sys, r, adjoint(operator))
    difference = adjoint(shifted).entries - shifted_adjoint.entries
    scale = max(1.0, max_abs(shifted))
    return float(np.max(np.abs(difference), initial=0.0)) / scale


def _grid_derivative_delta(sys: ManyBodySystem, r: float, r_prime: float) -> float:
    """Central-difference d/dr delta(r - r') on the grid."""
    k = sys.point_index(r)
    l = sys.point_index(r_prime)
    h = sys.spec.spacing
    return ((1.0 if k + 1 == l else 0.0) - (1.0 if k - 1 == l else 0.0)) / (2.0 * h * h)


def check_sigma_commutator(
    sys: ManyBodySystem,
    r: float,
    r_prime: float,
    operator: OperatorMatrix | np.ndarray,
    *,
    smearing: float | None = None,
    n_states: int | None = None,
) -> float:
    """Projected residual of [sigma(r), sigma(r')]A = delta'(r-r') (sigma(r)A + sigma(r')A).

    Without ``smearing`` r and r' must be grid points and delta' is the
    central difference of the normalized Kronecker delta.  With a smearing
    width both local currents are replaced by normalized Gaussians centred on
    r and r', and the right-hand side becomes the integrated shift along their
    Lie bracket.

    Raises:
        RepresentationError: For non-grid systems.
    """
    if sys.spec.kind != "grid":
        raise RepresentationError("the superoperator commutator check needs a grid representation")
    a = as_array(operator)
    if smearing is None:
        first = sigma_apply(sys, r, operator)
        second = sigma_apply(sys, r_prime, operator)
        lhs = sigma_apply(sys, r, second).entries - sigma_apply(sys, r_prime, first).entries
        rhs = _grid_derivative_delta(sys, r, r_prime) * (first.entries + second.entries)
    else:
        bump = gaussian_field(r, smearing)
        bump_prime = gaussian_field(r_prime, smearing)
        first = sigma_integrated_apply(sys, bump, operator)
        second = sigma_integrated_apply(sys, bump_prime, operator)
        lhs = (
            sigma_integrated_apply(sys, bump, second).entries
            - sigma_integrated_apply(sys, bump_prime, first).entries
        )
        bracket = lie_bracket_field(bump, bump_prime, length=sys.spec.spacing)
        rhs = sigma_integrated_apply(sys, bracket, a).entries
    residual = projected_residual(sys, lhs - rhs, n_states)
    logger.debug(
        "Superoperator commutator r=%.4g r'=%.4g (M=%d): %.3e",
        r,
        r_prime,
        sys.spec.grid_points,
        residual,
    )
    return residual


def check_lie_algebra(
    sys: ManyBodySystem,
    first: ShiftField,
    second: ShiftField,
    operator: OperatorMatrix | np.ndarray,
    *,
    n_states: int | None = None,
) -> float:
    """Projected residual of [Sigma[eps1], Sigma[eps2]]A - Sigma[eps_D]A."""
    shifted_first = sigma_integrated_apply(sys, first, operator)
    shifted_second = sigma_integrated_apply(sys, second, operator)
    lhs = (
        sigma_integrated_apply(sys, first, shifted_second).entries
        - sigma_integrated_apply(sys, second, shifted_first).entries
    )
    length = sys.spec.spacing if sys.spec.kind == "grid" else sys.spec.oscillator_length
    bracket = lie_bracket_field(first, second, length=length)
    rhs = sigma_integrated_apply(sys, bracket, operator).entries
    return projected_residual(sys, lhs - rhs, n_states)


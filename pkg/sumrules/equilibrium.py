from __future__ import annotations

# Purpose: Equilibrium force, hyperforce, product and 3g sum rules as residual reports.
# Date: 2026-10-10
# Related tests: tests/test_sumrules.py

"""Equilibrium sum-rule verification."""

import logging
from typing import Sequence

import numpy as np

from gauge import force_density, shift_with, sigma_apply
from operators import HermiticityError, OperatorMatrix, as_array, max_abs
from systems import ManyBodySystem
from thermal import EnsembleError, SpectralThermalState, mori_kernel, mori_product, thermal_average

from .report import SumRuleReport, build_report, relative_residual

__all__ = [
    "FORCE_BALANCE_TOL",
    "SUM_RULE_TOL",
    "THREE_G_STRIDE",
    "evaluation_points",
    "require_hermitian",
    "check_force_balance",
    "check_hyperforce",
    "check_product_rule",
    "check_3g",
]

logger = logging.getLogger(__name__)

FORCE_BALANCE_TOL = 1e-10
SUM_RULE_TOL = 1e-9
THREE_G_STRIDE = 4
HERMITIAN_INPUT_RTOL = 1e-10


def evaluation_points(sys: ManyBodySystem, points: Sequence[float] | None = None) -> np.ndarray:
    if points is None:
        return np.asarray(sys.evaluation_points, dtype=float)
    return np.asarray(points, dtype=float)


def _require_match(state: SpectralThermalState, sys: ManyBodySystem) -> None:
    if state.dim != sys.dim:
        raise EnsembleError(
            f"thermal state dimension {state.dim} does not match system dimension {sys.dim}"
        )


def require_hermitian(operator: OperatorMatrix | np.ndarray, name: str = "A") -> OperatorMatrix:
    """Return A as a Hermitian OperatorMatrix or raise HermiticityError."""
    candidate = OperatorMatrix(as_array(operator), hermitian_hint=True)
    if not candidate.is_hermitian(HERMITIAN_INPUT_RTOL):
        raise HermiticityError(
            f"observable {name} must be Hermitian; asymmetry {candidate.asymmetry():.3e}"
        )
    return candidate


def check_force_balance(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    *,
    points: Sequence[float] | None = None,
    tolerance: float = FORCE_BALANCE_TOL,
) -> SumRuleReport:
    """Verify <F(r)> = 0 and report the kinetic, pair and external means.

    Raises:
        EnsembleError: If the state does not belong to the system.
    """
    _require_match(state, sys)
    rows = []
    for r in evaluation_points(sys, points):
        density = force_density(sys, r)
        total = thermal_average(state, density.total)
        parts = {name: thermal_average(state, op) for name, op in density.parts().items()}
        scale = max(
            abs(total),
            *(abs(value) for value in parts.values()),
            *(max_abs(op) for op in density.parts().values()),
        )
        rows.append(
            {
                "r": float(r),
                "residual": relative_residual(abs(total), scale),
                "absolute": abs(total),
                "scale": scale,
                "total": total.real,
                "kinetic": parts["kinetic"].real,
                "interparticle": parts["interparticle"].real,
                "external": parts["external"].real,
                "imag": abs(total.imag),
            }
        )
    report = build_report("force_balance", rows, tolerance)
    logger.info("force_balance: max residual %.3e (tol %.1e)", report.max_residual, tolerance)
    return report


def check_hyperforce(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    observable: OperatorMatrix | np.ndarray,
    *,
    points: Sequence[float] | None = None,
    tolerance: float = SUM_RULE_TOL,
    rule_id: str = "hyperforce",
) -> SumRuleReport:
    """Verify <S_A(r)> + (A|beta F(r)) = 0 for a Hermitian observable.

    The covariance form cov(A|beta F) and the Mori terms of the kinetic,
    pair and external force parts are reported alongside.

    Raises:
        HermiticityError: If A is not Hermitian.
    """
    _require_match(state, sys)
    a = require_hermitian(observable)
    beta = state.beta
    rows = []
    for r in evaluation_points(sys, points):
        shifted = sigma_apply(sys, r, a)
        density = force_density(sys, r)
        mean_shift = thermal_average(state, shifted)
        mori = beta * mori_product(state, a, density.total)
        covariance = mori - beta * np.conj(thermal_average(state, a)) * thermal_average(state, density.total)
        split = {
            name: beta * mori_product(state, a, op) for name, op in density.parts().items()
        }
        absolute = abs(mean_shift + mori)
        scale = max(
            abs(mean_shift),
            abs(mori),
            max_abs(shifted),
            beta * max_abs(a) * max_abs(density.total),
        )
        rows.append(
            {
                "r": float(r),
                "residual": relative_residual(absolute, scale),
                "absolute": absolute,
                "scale": scale,
                "mean_hyperforce": mean_shift.real,
                "mori": mori.real,
                "covariance": covariance.real,
                "mori_kinetic": split["kinetic"].real,
                "mori_interparticle": split["interparticle"].real,
                "mori_external": split["external"].real,
                "imag": max(abs(mean_shift.imag), abs(mori.imag)),
            }
        )
    report = build_report(rule_id, rows, tolerance)
    logger.info("%s: max residual %.3e (tol %.1e)", rule_id, report.max_residual, tolerance)
    return report


def check_product_rule(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    first: OperatorMatrix | np.ndarray,
    second: OperatorMatrix | np.ndarray,
    *,
    points: Sequence[float] | None = None,
    tolerance: float = SUM_RULE_TOL,
) -> SumRuleReport:
    """Verify <S_A B> + <A S_B> + ((AB)^dagger | beta F) = 0.

    The ``leibniz`` column holds the relative operator residual of
    S_AB = S_A B + A S_B.
    """
    _require_match(state, sys)
    a = as_array(first)
    b = as_array(second)
    product = a @ b
    product_adjoint = product.conj().T
    beta = state.beta
    rows = []
    for r in evaluation_points(sys, points):
        shifted_a = sigma_apply(sys, r, a).entries
        shifted_b = sigma_apply(sys, r, b).entries
        shifted_product = sigma_apply(sys, r, product).entries
        leibniz_terms = shifted_a @ b + a @ shifted_b
        leibniz = float(np.max(np.abs(shifted_product - leibniz_terms), initial=0.0)) / max(
            1.0, max_abs(shifted_product)
        )
        force = force_density(sys, r).total
        left = thermal_average(state, shifted_a @ b)
        right = thermal_average(state, a @ shifted_b)
        mori = beta * mori_product(state, product_adjoint, force)
        absolute = abs(left + right + mori)
        scale = max(
            abs(left),
            abs(right),
            abs(mori),
            max_abs(shifted_product),
            beta * max_abs(product) * max_abs(force),
        )
        rows.append(
            {
                "r": float(r),
                "residual": relative_residual(absolute, scale),
                "absolute": absolute,
                "scale": scale,
                "shift_first": left.real,
                "shift_second": right.real,
                "mori": mori.real,
                "leibniz": leibniz,
            }
        )
    report = build_report("product_rule", rows, tolerance)
    logger.info("product_rule: max residual %.3e (tol %.1e)", report.max_residual, tolerance)
    return report


def check_3g(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    *,
    points: Sequence[float] | None = None,
    stride: int = THREE_G_STRIDE,
    tolerance: float = SUM_RULE_TOL,
) -> SumRuleReport:
    """Verify (beta F(r)|beta F(r')) + <K(r, r')> = 0 on all point pairs.

    K(r, r') = sigma(r) beta F(r') = -sigma(r) sigma(r') beta H.  Without
    explicit points every ``stride``-th evaluation point is used.  The
    ``construction`` column compares the two forms of K.
    """
    _require_match(state, sys)
    if points is None:
        selected = np.asarray(sys.evaluation_points, dtype=float)[::stride]
    else:
        selected = np.asarray(points, dtype=float)
        for r in selected:
            sys.point_index(r)
    beta = state.beta
    hamiltonian = sys.hamiltonian
    kernel = mori_kernel(state)
    populations = state.populations

    scaled_forces = {}
    eigen_forces = {}
    eigen_currents = {}
    for r in selected:
        scaled = beta * force_density(sys, r).total
        scaled_forces[r] = scaled
        eigen_forces[r] = state.to_eigenbasis(scaled)
        eigen_currents[r] = state.to_eigenbasis(sys.current_at(r))

    rows = []
    for r in selected:
        for r_prime in selected:
            force_r = eigen_forces[r]
            force_rp = eigen_forces[r_prime]
            mori = complex(np.sum(np.conj(force_r) * force_rp * kernel))
            current = eigen_currents[r]
            curvature = (-1j / sys.hbar) * (force_rp @ current - current @ force_rp)
            mean_curvature = complex(np.sum(populations * np.diag(curvature)))

            direct = shift_with(sys.current_at(r), scaled_forces[r_prime], sys.hbar).entries
            chained = -shift_with(
                sys.current_at(r),
                shift_with(sys.current_at(r_prime), beta * hamiltonian, sys.hbar),
                sys.hbar,
            ).entries
            construction = float(np.max(np.abs(direct - chained), initial=0.0)) / max(
                1.0, max_abs(direct)
            )

            absolute = abs(mori + mean_curvature)
            scale = max(
                abs(mori),
                abs(mean_curvature),
                max_abs(direct),
                max_abs(force_r) * max_abs(force_rp),
            )
            rows.append(
                {
                    "r": float(r),
                    "r_prime": float(r_prime),
                    "residual": relative_residual(absolute, scale),
                    "absolute": absolute,
                    "scale": scale,
                    "mori": mori.real,
                    "mean_curvature": mean_curvature.real,
                    "construction": construction,
                }
            )
    report = build_report("3g", rows, tolerance)
    logger.info(
        "3g: %d pairs, max residual %.3e (tol %.1e)", len(rows), report.max_residual, tolerance
    )
    return report

from __future__ import annotations

# Purpose: Shift current operator and the dynamical shift-current / hypercurrent sum rules.
# Date: 2026-10-12
# Related tests: tests/test_dynamics.py

"""Time-dependent shifting: shift current and hypercurrent checks."""

import logging
from typing import Sequence

import numpy as np

from gauge import shift_with, trace_product
from operators import OperatorMatrix, as_array, max_abs
from sumrules import (
    SUM_RULE_TOL,
    SumRuleReport,
    build_report,
    evaluation_points,
    relative_residual,
    require_hermitian,
)
from systems import ManyBodySystem
from thermal import SpectralThermalState, mori_product, thermal_average

from .propagation import Protocol, heisenberg, propagate

__all__ = [
    "heisenberg_current",
    "shift_current",
    "check_shift_current_zero",
    "check_hypercurrent",
    "check_dynamic_anti_self_adjoint",
]

logger = logging.getLogger(__name__)


def heisenberg_current(sys: ManyBodySystem, r: float, unitary: OperatorMatrix) -> OperatorMatrix:
    """m J(r, t) = U^dagger m J(r) U."""
    return heisenberg(sys.current_at(r), unitary)


def _bracket_current(
    hamiltonian: OperatorMatrix | np.ndarray, current: OperatorMatrix, beta: float, hbar: float
) -> OperatorMatrix:
    """(i/hbar) [beta X, J_t], i.e. -sigma(r, t) applied to beta X."""
    return -shift_with(current, beta * as_array(hamiltonian), hbar)


def shift_current(
    sys: ManyBodySystem,
    protocol: Protocol,
    r: float,
    t: float,
    *,
    beta: float,
    unitary: OperatorMatrix | None = None,
) -> OperatorMatrix:
    """C(r, t) = (i/hbar) [beta H_0, U^dagger m J(r) U].

    Raises:
        ProtocolError: If t lies outside the protocol.
        EvaluationPointError: If r is not an evaluation point.
    """
    u = unitary if unitary is not None else propagate(protocol, t)
    current = heisenberg_current(sys, r, u)
    result = _bracket_current(protocol.initial, current, beta, sys.hbar)
    return OperatorMatrix(result.entries, hermitian_hint=True)


def check_shift_current_zero(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    protocol: Protocol,
    times: Sequence[float],
    *,
    points: Sequence[float] | None = None,
    tolerance: float = SUM_RULE_TOL,
) -> SumRuleReport:
    """Verify <C(r, t)> = 0 over the equilibrium initial state.

    The kinetic, pair and external contributions of beta H_0 are reported
    per row.
    """
    beta = state.beta
    parts = {
        "kinetic": sys.kinetic,
        "interparticle": sys.interparticle,
        "external": sys.external,
    }
    rows = []
    for t in times:
        unitary = propagate(protocol, t)
        for r in evaluation_points(sys, points):
            current = heisenberg_current(sys, r, unitary)
            pieces = {
                name: _bracket_current(op, current, beta, sys.hbar) for name, op in parts.items()
            }
            means = {name: thermal_average(state, op) for name, op in pieces.items()}
            total = sum(means.values())
            scale = max(
                abs(total),
                *(abs(value) for value in means.values()),
                *(max_abs(op) for op in pieces.values()),
            )
            rows.append(
                {
                    "t": float(t),
                    "r": float(r),
                    "residual": relative_residual(abs(total), scale),
                    "absolute": abs(total),
                    "scale": scale,
                    "total": total.real,
                    "kinetic": means["kinetic"].real,
                    "interparticle": means["interparticle"].real,
                    "external": means["external"].real,
                }
            )
    report = build_report("shift_current", rows, tolerance)
    logger.info(
        "shift_current: %d times, max residual %.3e (tol %.1e)",
        len(times),
        report.max_residual,
        tolerance,
    )
    return report


def check_hypercurrent(
    state: SpectralThermalState,
    sys: ManyBodySystem,
    protocol: Protocol,
    observable: OperatorMatrix | np.ndarray,
    times: Sequence[float],
    *,
    points: Sequence[float] | None = None,
    tolerance: float = SUM_RULE_TOL,
    rule_id: str = "hypercurrent",
) -> SumRuleReport:
    """Verify <S_A(r, t)> + (A(t) | C(r, t)) = 0 in the initial thermal state.

    Raises:
        HermiticityError: If A is not Hermitian.
    """
    a = require_hermitian(observable)
    beta = state.beta
    rows = []
    for t in times:
        unitary = propagate(protocol, t)
        evolved = heisenberg(a, unitary)
        for r in evaluation_points(sys, points):
            current = heisenberg_current(sys, r, unitary)
            hyper = shift_with(current, evolved, sys.hbar)
            shift = _bracket_current(protocol.initial, current, beta, sys.hbar)
            mean_hyper = thermal_average(state, hyper)
            mori = mori_product(state, evolved, shift)
            absolute = abs(mean_hyper + mori)
            scale = max(
                abs(mean_hyper),
                abs(mori),
                max_abs(hyper),
                max_abs(a) * max_abs(shift),
            )
            rows.append(
                {
                    "t": float(t),
                    "r": float(r),
                    "residual": relative_residual(absolute, scale),
                    "absolute": absolute,
                    "scale": scale,
                    "mean_hypercurrent": mean_hyper.real,
                    "mori": mori.real,
                }
            )
    report = build_report(rule_id, rows, tolerance)
    logger.info(
        "%s: %d times, max residual %.3e (tol %.1e)",
        rule_id,
        len(times),
        report.max_residual,
        tolerance,
    )
    return report


def check_dynamic_anti_self_adjoint(
    sys: ManyBodySystem,
    protocol: Protocol,
    r: float,
    t: float,
    first: OperatorMatrix | np.ndarray,
    second: OperatorMatrix | np.ndarray,
) -> float:
    """Relative residual of Tr A[sigma(r,t)B] + Tr[sigma(r,t)A]B with the Heisenberg current."""
    current = heisenberg_current(sys, r, propagate(protocol, t))
    lhs, lhs_scale = trace_product(first, shift_with(current, second, sys.hbar))
    rhs, rhs_scale = trace_product(shift_with(current, first, sys.hbar), second)
    return abs(lhs + rhs) / max(1.0, lhs_scale, rhs_scale)

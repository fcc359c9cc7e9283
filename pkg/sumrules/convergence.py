from __future__ import annotations

# Purpose: Basis-doubling studies for identities that only hold in the continuum limit.
# Date: 2026-10-13
# Related tests: tests/test_sumrules.py

"""Convergence-class identities as residual-versus-resolution reports."""

import logging
from typing import Callable

import numpy as np

from gauge import (
    DEFAULT_DECAY,
    DEFAULT_FLOOR,
    constant_field,
    force_density,
    hyperforce_density,
    power_field,
    projected_residual,
    sigma_integrated_apply,
)
from systems import BasisSpec, ManyBodySystem

from .report import RuleClass, SumRuleReport, build_report

__all__ = [
    "nearest_point",
    "density_hyperforce_residual",
    "canonical_shift_residual",
    "external_force_residual",
    "doubling_study",
]

logger = logging.getLogger(__name__)

POTENTIAL_FD_STEP = 1e-5


def nearest_point(sys: ManyBodySystem, r: float) -> float:
    """Snap r onto the closest evaluation point of ``sys``."""
    points = np.asarray(sys.evaluation_points, dtype=float)
    return float(points[int(np.argmin(np.abs(points - r)))])


def _length(sys: ManyBodySystem) -> float:
    spec = sys.spec
    return spec.oscillator_length if spec.kind == "oscillator" else spec.box_length


def density_hyperforce_residual(sys: ManyBodySystem, r: float, n_states: int | None = None) -> float:
    """Projected residual of S_{sum x}(r) = rho(r) at the evaluation point nearest r."""
    point = nearest_point(sys, r)
    difference = hyperforce_density(sys, point, sys.position_sum).entries - sys.density_at(point).entries
    return projected_residual(sys, difference, n_states)


def canonical_shift_residual(
    sys: ManyBodySystem, shift: float = 1.0, n_states: int | None = None
) -> float:
    """Worst projected residual of Sigma[c] sum x = c N and Sigma[x] P = -P."""
    uniform = sigma_integrated_apply(sys, constant_field(shift), sys.position_sum).entries
    uniform = uniform - shift * sys.number_operator.entries
    momentum = sys.lift(sys.single.momentum.entries).entries
    dilation = sigma_integrated_apply(sys, power_field(1), momentum).entries + momentum
    return max(
        projected_residual(sys, uniform, n_states),
        projected_residual(sys, dilation, n_states),
    )


def external_force_residual(sys: ManyBodySystem, r: float, n_states: int | None = None) -> float:
    """Projected residual of F_ext(r) = -rho(r) V_ext'(r) at the evaluation point nearest r.

    V_ext' is a central difference with step 1e-5 in units of the system length.
    """
    point = nearest_point(sys, r)
    external = force_density(sys, point).external.entries
    if sys.external_potential is None:
        slope = 0.0
    else:
        step = POTENTIAL_FD_STEP * _length(sys)
        stencil = np.array([point + step, point - step])
        values = np.asarray(sys.external_potential(stencil), dtype=float)
        slope = float((values[0] - values[1]) / (2.0 * step))
    difference = external + slope * sys.density_at(point).entries
    return projected_residual(sys, difference, n_states)


def doubling_study(
    rule_id: str,
    spec: BasisSpec,
    build: Callable[[BasisSpec], ManyBodySystem],
    measure: Callable[[ManyBodySystem], float],
    *,
    levels: int = 3,
    factor: float = DEFAULT_DECAY,
    floor: float = DEFAULT_FLOOR,
    details: dict | None = None,
) -> SumRuleReport:
    """Measure a residual on ``levels`` successively doubled bases.

    The report passes when each doubling shrinks the residual by ``factor``
    or the residual has reached ``floor``.
    """
    rows = []
    current = spec
    for level in range(levels):
        sys = build(current)
        residual = float(measure(sys))
        rows.append(
            {
                "level": level,
                "size": current.dim,
                "dim": sys.dim,
                "residual": residual,
                "absolute": residual,
                "scale": 1.0,
            }
        )
        logger.debug("%s level %d (basis %d): %.3e", rule_id, level, current.dim, residual)
        current = current.doubled()
    report = build_report(
        rule_id,
        rows,
        factor,
        rule_class=RuleClass.CONVERGENCE,
        details={"floor": floor, "levels": levels, **(details or {})},
    )
    logger.info(
        "%s: residuals %s (decay %.2f) -> %s",
        rule_id,
        ", ".join(f"{row['residual']:.2e}" for row in rows),
        factor,
        "pass" if report.passed else "fail",
    )
    return report

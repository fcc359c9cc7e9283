from __future__ import annotations

# Purpose: Harmonic-oscillator density and force-covariance profiles (kinetic vs external).
# Date: 2026-10-14
# Related tests: tests/test_runner.py

"""Oscillator profile dataset: density and the cancelling Mori covariances."""

import logging
from typing import Sequence

import numpy as np
import pandas as pd

from gauge import RepresentationError, force_density
from operators import hermitian_part
from sumrules import SumRuleReport, build_report, relative_residual
from systems import BasisSpec, ManyBodySystem, build_many_body, harmonic_potential
from thermal import mori_covariance, thermal_average, thermal_state_for

__all__ = [
    "PROFILE_COLUMNS",
    "BETA_SCALING",
    "NORMALIZATION_TOL",
    "profile_frame",
    "profile_report",
    "profile_system",
    "profile_dataset",
]

logger = logging.getLogger(__name__)

PROFILE_COLUMNS = ("beta_hbar_omega", "x_over_a", "rho_times_a", "cov_kin", "cov_ext", "sum")
NORMALIZATION_TOL = 1e-6
BETA_SCALING = "symmetric: cov_kin = cov(beta H0|beta F_kin) a, cov_ext = cov(beta H0|beta F_ext) a"


def profile_system(
    n_max: int = 80,
    *,
    eval_points: int = 161,
    x_span: float = 8.0,
    hbar: float = 1.0,
    mass: float = 1.0,
    omega: float = 1.0,
) -> ManyBodySystem:
    spec = BasisSpec(
        kind="oscillator",
        n_max=n_max,
        omega=omega,
        hbar=hbar,
        mass=mass,
        eval_points=eval_points,
        x_span=x_span,
    )
    return build_many_body(spec, particles=1, external_potential=harmonic_potential(omega, mass))


def profile_frame(sys: ManyBodySystem, beta: float) -> pd.DataFrame:
    """Profiles for one temperature with A = beta H0.

    Lengths are in units of the oscillator length a.

    Raises:
        RepresentationError: Unless ``sys`` is a single particle in an oscillator basis.
    """
    if sys.spec.kind != "oscillator" or sys.is_grand or sys.particles != 1:
        raise RepresentationError("the oscillator profile needs one particle in an oscillator basis")
    spec = sys.spec
    a = spec.oscillator_length
    state = thermal_state_for(sys, beta)
    observable = hermitian_part(sys.hamiltonian) * beta
    rows = []
    for x in sys.evaluation_points:
        density = force_density(sys, x)
        rho = thermal_average(state, sys.density_at(x)).real
        cov_kin = mori_covariance(state, observable, beta * density.kinetic).real * a
        cov_ext = mori_covariance(state, observable, beta * density.external).real * a
        rows.append(
            {
                "beta_hbar_omega": beta * spec.hbar * spec.omega,
                "x_over_a": float(x) / a,
                "rho_times_a": rho * a,
                "cov_kin": cov_kin,
                "cov_ext": cov_ext,
                "sum": cov_kin + cov_ext,
            }
        )
    return pd.DataFrame(rows, columns=list(PROFILE_COLUMNS))


def profile_report(sys: ManyBodySystem, beta: float, tolerance: float) -> SumRuleReport:
    """Cancellation of the kinetic and external covariances relative to max|cov_kin|.

    The report also requires the density to integrate to one within
    ``NORMALIZATION_TOL`` over the evaluation grid.
    """
    frame = profile_frame(sys, beta)
    scale = max(float(frame["cov_kin"].abs().max()), np.finfo(float).tiny)
    frame["r"] = frame["x_over_a"] * sys.spec.oscillator_length
    frame["absolute"] = frame["sum"].abs()
    frame["scale"] = scale
    frame["residual"] = [relative_residual(value, scale) for value in frame["absolute"]]
    normalization = float(frame["rho_times_a"].sum() * np.diff(frame["x_over_a"]).mean())
    report = build_report(
        "fig1",
        frame.to_dict("records"),
        tolerance,
        details={
            "beta_scaling": BETA_SCALING,
            "normalization": normalization,
            "max_cov_kin": scale,
        },
        requirements={"normalization": abs(normalization - 1.0) <= NORMALIZATION_TOL},
    )
    logger.info(
        "oscillator profile at beta hbar omega=%.3g: cancellation %.3e, normalization %.8f",
        beta * sys.spec.hbar * sys.spec.omega,
        report.max_residual,
        normalization,
    )
    return report


def profile_dataset(
    n_max: int = 80,
    betas: Sequence[float] = (0.5, 1.0, 2.0, 3.0, 4.0, 6.0),
    *,
    eval_points: int = 161,
    x_span: float = 8.0,
) -> pd.DataFrame:
    """Concatenate the profile blocks of every beta in the listed order."""
    sys = profile_system(n_max, eval_points=eval_points, x_span=x_span)
    frames = [profile_frame(sys, beta) for beta in betas]
    return pd.concat(frames, ignore_index=True)

from __future__ import annotations

# Purpose: Extended ensembles H_A = H - lambda A / beta and their parametric-derivative identities.
# Date: 2026-10-11
# Related tests: tests/test_hyperdft.py

"""Extended-ensemble machinery: force balance, hyperfluctuations and lambda derivatives."""

import logging
from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from gauge import force_density, sigma_apply
from operators import OperatorMatrix, hermitian_part, max_abs
from sumrules import (
    FORCE_BALANCE_TOL,
    SumRuleReport,
    build_report,
    evaluation_points,
    relative_residual,
    require_hermitian,
)
from systems import ManyBodySystem, Profile
from thermal import (
    EnsembleError,
    SpectralThermalState,
    make_grand_state,
    make_thermal_state,
    mori_covariance,
    thermal_average,
)

__all__ = [
    "RESPONSE_RATIO",
    "FD_FLOOR_RTOL",
    "ExtendedEnsemble",
    "FiniteDifferenceCheck",
    "build_extended",
    "check_extended_force_balance",
    "extended_force_derivative",
    "hyperfluctuation_profile",
    "density_profile",
    "check_chi_is_density_response",
    "check_mean_A_is_omega_derivative",
    "richardson",
]

logger = logging.getLogger(__name__)

RESPONSE_RATIO = 0.3
FD_FLOOR_RTOL = 1e-10
SECTOR_LEAK_RTOL = 1e-12

EnsembleKind = Literal["canonical", "grand"]


@dataclass(frozen=True, eq=False)
class ExtendedEnsemble:
    """Thermal state of H_A = H - lambda A / beta for a fixed observable A."""

    system: ManyBodySystem
    observable: OperatorMatrix
    coupling: float
    beta: float
    state: SpectralThermalState
    ensemble: EnsembleKind = "canonical"
    mu: float | None = None

    @property
    def hamiltonian(self) -> OperatorMatrix:
        return _extended_hamiltonian(self.system, self.observable, self.coupling, self.beta)

    def at(self, coupling: float) -> "ExtendedEnsemble":
        """Same observable and temperature at another coupling."""
        return build_extended(
            self.system,
            self.observable,
            coupling,
            self.beta,
            ensemble=self.ensemble,
            mu=self.mu,
        )

    def grand_potential_scaled(self) -> float:
        """beta * Omega_0 = -ln Tr' exp(-beta (H_A - mu N))."""
        return -self.state.log_partition


def _extended_hamiltonian(
    sys: ManyBodySystem, observable: OperatorMatrix, coupling: float, beta: float
) -> OperatorMatrix:
    entries = hermitian_part(sys.hamiltonian).entries - (coupling / beta) * observable.entries
    return hermitian_part(entries)


def build_extended(
    sys: ManyBodySystem,
    observable: OperatorMatrix | np.ndarray,
    coupling: float,
    beta: float,
    *,
    ensemble: EnsembleKind | None = None,
    mu: float | None = None,
) -> ExtendedEnsemble:
    """Build the extended ensemble at coupling lambda.

    Args:
        sys: Base system with Hamiltonian H_0.
        observable: Hermitian A.
        coupling: Dimensionless lambda.
        beta: Inverse temperature.
        ensemble: ``canonical`` or ``grand``; follows the system when omitted.
        mu: Chemical potential for grand ensembles.

    Raises:
        HermiticityError: If A is not Hermitian.
        EnsembleError: For a grand ensemble without mu, a canonical ensemble
            on a grand system, or an A that mixes particle-number sectors.
    """
    a = require_hermitian(observable)
    kind: EnsembleKind = ensemble or ("grand" if sys.is_grand else "canonical")
    if kind == "canonical" and sys.is_grand:
        raise EnsembleError("a grand system needs the grand ensemble")
    hamiltonian = _extended_hamiltonian(sys, a, coupling, beta)
    if kind == "grand":
        if mu is None:
            raise EnsembleError("the grand ensemble needs a chemical potential")
        blocks = []
        leak = hamiltonian.entries.copy()
        for sector, block in zip(sys.sectors, sys.sector_slices):
            blocks.append(
                (sector.particles, OperatorMatrix(hamiltonian.entries[block, block], hermitian_hint=True))
            )
            leak[block, block] = 0.0
        if max_abs(leak) > SECTOR_LEAK_RTOL * max(1.0, max_abs(hamiltonian)):
            raise EnsembleError("observable couples particle-number sectors")
        state = make_grand_state(
            blocks, beta, mu, factorial_weights=sys.statistics == "distinguishable"
        )
    else:
        state = make_thermal_state(hamiltonian, beta, particles=sys.particles)
    logger.debug("Extended %s ensemble at lambda=%.4g (beta=%.4g)", kind, coupling, beta)
    return ExtendedEnsemble(
        system=sys,
        observable=a,
        coupling=float(coupling),
        beta=float(beta),
        state=state,
        ensemble=kind,
        mu=mu,
    )


def check_extended_force_balance(
    ext: ExtendedEnsemble,
    *,
    points: Sequence[float] | None = None,
    tolerance: float = FORCE_BALANCE_TOL,
) -> SumRuleReport:
    """Verify <F_0(r) + lambda S_A(r) / beta>_A = 0 at finite lambda."""
    sys = ext.system
    rows = []
    for r in evaluation_points(sys, points):
        base = force_density(sys, r).total
        shifted = sigma_apply(sys, r, ext.observable)
        base_mean = thermal_average(ext.state, base)
        hyper_mean = ext.coupling / ext.beta * thermal_average(ext.state, shifted)
        absolute = abs(base_mean + hyper_mean)
        scale = max(
            abs(base_mean),
            abs(hyper_mean),
            max_abs(base),
            abs(ext.coupling) / ext.beta * max_abs(shifted),
        )
        rows.append(
            {
                "r": float(r),
                "residual": relative_residual(absolute, scale),
                "absolute": absolute,
                "scale": scale,
                "base_force": base_mean.real,
                "hyperforce_term": hyper_mean.real,
            }
        )
    report = build_report(
        "extended_force_balance", rows, tolerance, details={"lambda": ext.coupling}
    )
    logger.info(
        "extended_force_balance (lambda=%.3g): max residual %.3e",
        ext.coupling,
        report.max_residual,
    )
    return report


def richardson(coarse: np.ndarray | float, fine: np.ndarray | float) -> np.ndarray:
    """Second-order Richardson extrapolation of central differences at steps d and d/2."""
    return (4.0 * np.asarray(fine) - np.asarray(coarse)) / 3.0


@dataclass(frozen=True)
class FiniteDifferenceCheck:
    """Central-difference estimates at steps d and d/2 against an exact target."""

    name: str
    steps: tuple[float, float]
    errors: tuple[float, float]
    richardson_error: float
    scale: float
    reference: dict[str, float] = field(default_factory=dict)

    @property
    def floor(self) -> float:
        return FD_FLOOR_RTOL * max(self.scale, np.finfo(float).tiny)

    @property
    def ratio(self) -> float:
        coarse, fine = self.errors
        return fine / coarse if coarse > 0.0 else 0.0

    @property
    def order(self) -> float:
        """Measured convergence order log2(err(d) / err(d/2))."""
        coarse, fine = self.errors
        if fine <= self.floor or coarse <= 0.0:
            return float("inf")
        return float(np.log2(coarse / fine))

    @property
    def agreement(self) -> float:
        return self.errors[1]

    def converged(self, max_ratio: float = RESPONSE_RATIO) -> bool:
        return self.errors[1] <= self.floor or self.ratio <= max_ratio

    def summary(self) -> dict[str, float | str]:
        return {
            "check": self.name,
            "step": self.steps[0],
            "error_coarse": self.errors[0],
            "error_fine": self.errors[1],
            "richardson_error": self.richardson_error,
            "order": self.order,
            **self.reference,
        }


def _central(values_plus: np.ndarray, values_minus: np.ndarray, step: float) -> np.ndarray:
    return (np.asarray(values_plus) - np.asarray(values_minus)) / (2.0 * step)


def density_profile(ext: ExtendedEnsemble, points: Sequence[float] | None = None) -> Profile:
    sys = ext.system
    xs = evaluation_points(sys, points)
    values = np.array([thermal_average(ext.state, sys.density_at(r)).real for r in xs])
    return Profile(xs, values, label="rho")


def hyperfluctuation_profile(
    ext: ExtendedEnsemble, points: Sequence[float] | None = None
) -> Profile:
    """chi_A(r) = cov(A | rho(r)) in the extended state."""
    sys = ext.system
    xs = evaluation_points(sys, points)
    values = np.array(
        [mori_covariance(ext.state, ext.observable, sys.density_at(r)) for r in xs]
    )
    imaginary = float(np.max(np.abs(values.imag), initial=0.0))
    if imaginary > 1e-12 * max(1.0, float(np.max(np.abs(values), initial=0.0))):
        logger.warning("hyperfluctuation profile has imaginary part %.3e", imaginary)
    return Profile(xs, values.real, label="chi")


def extended_force_derivative(
    ext: ExtendedEnsemble, r: float, step: float = 1e-4
) -> FiniteDifferenceCheck:
    """d<F_0(r)>_A / d lambda by central differences against cov(A|beta F_0)/beta.

    At lambda = 0 the target also equals -<S_A(r)>/beta, recorded as
    ``hyperforce_form``.
    """
    sys = ext.system
    base = force_density(sys, r).total

    def mean_force(coupling: float) -> float:
        return thermal_average(ext.at(coupling).state, base).real

    target = (mori_covariance(ext.state, ext.observable, base)).real
    hyperforce_form = -thermal_average(ext.state, sigma_apply(sys, r, ext.observable)).real / ext.beta
    estimates = []
    for h in (step, 0.5 * step):
        estimates.append(
            float(_central(mean_force(ext.coupling + h), mean_force(ext.coupling - h), h))
        )
    extrapolated = float(richardson(estimates[0], estimates[1]))
    scale = max(abs(target), abs(estimates[0]), max_abs(base) / ext.beta)
    return FiniteDifferenceCheck(
        name="extended_force_derivative",
        steps=(step, 0.5 * step),
        errors=(abs(estimates[0] - target), abs(estimates[1] - target)),
        richardson_error=abs(extrapolated - target),
        scale=scale,
        reference={
            "derivative": estimates[1],
            "covariance_form": target,
            "hyperforce_form": hyperforce_form,
        },
    )


def check_chi_is_density_response(
    ext: ExtendedEnsemble,
    step: float = 1e-2,
    *,
    points: Sequence[float] | None = None,
) -> FiniteDifferenceCheck:
    """Compare chi_A(r) with d rho(r) / d lambda at steps d and d/2."""
    chi = hyperfluctuation_profile(ext, points).values
    estimates = []
    for h in (step, 0.5 * step):
        plus = density_profile(ext.at(ext.coupling + h), points).values
        minus = density_profile(ext.at(ext.coupling - h), points).values
        estimates.append(_central(plus, minus, h))
    extrapolated = richardson(estimates[0], estimates[1])
    rho = density_profile(ext, points).values
    scale = max(float(np.max(np.abs(rho), initial=0.0)), float(np.max(np.abs(chi), initial=0.0)))
    check = FiniteDifferenceCheck(
        name="chi_density_response",
        steps=(step, 0.5 * step),
        errors=tuple(float(np.max(np.abs(est - chi), initial=0.0)) for est in estimates),
        richardson_error=float(np.max(np.abs(extrapolated - chi), initial=0.0)),
        scale=scale,
    )
    logger.info(
        "chi vs d rho/d lambda: errors %.3e -> %.3e (order %.2f)",
        check.errors[0],
        check.errors[1],
        check.order,
    )
    return check


def check_mean_A_is_omega_derivative(
    ext: ExtendedEnsemble, step: float = 1e-2
) -> FiniteDifferenceCheck:
    """Compare <A>_A with -d(beta Omega_0)/d lambda at steps d and d/2.

    Raises:
        EnsembleError: For canonical ensembles.
    """
    if ext.ensemble != "grand":
        raise EnsembleError("the grand-potential derivative identity needs the grand ensemble")
    mean = thermal_average(ext.state, ext.observable).real
    estimates = []
    for h in (step, 0.5 * step):
        plus = ext.at(ext.coupling + h).grand_potential_scaled()
        minus = ext.at(ext.coupling - h).grand_potential_scaled()
        estimates.append(-float(_central(plus, minus, h)))
    extrapolated = float(richardson(estimates[0], estimates[1]))
    check = FiniteDifferenceCheck(
        name="mean_A_omega_derivative",
        steps=(step, 0.5 * step),
        errors=(abs(estimates[0] - mean), abs(estimates[1] - mean)),
        richardson_error=abs(extrapolated - mean),
        scale=max(abs(mean), max_abs(ext.observable)),
        reference={"mean": mean},
    )
    logger.info(
        "<A> vs -d(beta Omega)/d lambda: errors %.3e -> %.3e (order %.2f)",
        check.errors[0],
        check.errors[1],
        check.order,
    )
    return check


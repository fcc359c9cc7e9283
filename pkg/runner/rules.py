from __future__ import annotations

# Purpose: Registry of verifiable rules and the glue that runs each one for a scenario item.
# Date: 2026-10-14
# Related tests: tests/test_runner.py

"""Rule registry: ids, classes, tolerances and execution functions."""

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable

import numpy as np

from dynamics import (
    Protocol,
    check_dynamic_anti_self_adjoint,
    check_hypercurrent,
    check_shift_current_zero,
    quench_protocol,
    static_protocol,
    tilt_quench_hamiltonian,
    trap_quench_hamiltonian,
)
from gauge import (
    ShiftField,
    check_adjoint_covariance,
    check_anti_self_adjoint,
    check_lie_algebra,
    check_sigma_commutator,
    constant_field,
    cosine_field,
    gaussian_field,
    power_field,
    sine_field,
)
from hyperdft import (
    FiniteDifferenceCheck,
    build_extended,
    check_chi_is_density_response,
    check_extended_force_balance,
    check_mean_A_is_omega_derivative,
    extended_force_derivative,
)
from operators import OperatorMatrix
from sumrules import (
    THREE_G_STRIDE,
    RuleClass,
    SumRuleReport,
    build_report,
    canonical_shift_residual,
    check_3g,
    check_force_balance,
    check_hyperforce,
    check_product_rule,
    density_hyperforce_residual,
    doubling_study,
    external_force_residual,
    nearest_point,
)
from systems import BasisSpec, ManyBodySystem, harmonic_potential
from thermal import (
    SpectralThermalState,
    check_boltzmann_identity,
    check_gauge_invariance,
    thermal_state_for,
)

from .config import CheckConfig, load_defaults
from .oscillator import profile_report
from .observables import resolve_observable

__all__ = ["RuleSpec", "RuleContext", "RULES", "rule_table"]

logger = logging.getLogger(__name__)


@dataclass
class RuleContext:
    """Everything one scenario item needs: the system, the check options and beta."""

    system: ManyBodySystem
    check: CheckConfig
    beta: float | None
    mu: float | None
    tolerance: float
    rebuild: Callable[[BasisSpec], ManyBodySystem]
    defaults: dict = field(default_factory=load_defaults)

    @cached_property
    def state(self) -> SpectralThermalState:
        return thermal_state_for(self.system, self.beta, self.mu)

    def observable(self, name: str | None, fallback: str) -> OperatorMatrix:
        return resolve_observable(name or fallback, self.system, self.beta)

    @property
    def points(self) -> list[float] | None:
        """Requested positions snapped onto evaluation points."""
        if self.check.points is None:
            return None
        return [nearest_point(self.system, r) for r in self.check.points]

    def option(self, name: str, value):
        return value if value is not None else self.defaults["checks"][name]

    def convergence(self, name: str, value):
        return value if value is not None else self.defaults["convergence"][name]


@dataclass(frozen=True)
class RuleSpec:
    rule_id: str
    rule_class: RuleClass
    tolerance: float
    thermal: bool
    run: Callable[[RuleContext], SumRuleReport]
    description: str = ""


def _length(sys: ManyBodySystem) -> float:
    spec = sys.spec
    return spec.oscillator_length if spec.kind == "oscillator" else 0.1 * spec.box_length


def _field(name: str, length: float) -> ShiftField:
    if name == "constant":
        return constant_field(1.0)
    if name == "linear":
        return power_field(1)
    if name == "quadratic":
        return power_field(2, scale=1.0 / length)
    if name == "sine":
        return sine_field(1.0 / length)
    if name == "cosine":
        return cosine_field(1.0 / length)
    if name == "gaussian_offset":
        return gaussian_field(0.5 * length, length, normalized=False)
    return gaussian_field(0.0, length, normalized=False)


def _fields(ctx: RuleContext) -> list[ShiftField]:
    names = ctx.option("fields", ctx.check.fields)
    return [_field(name, _length(ctx.system)) for name in names]


def _center(ctx: RuleContext) -> float:
    return ctx.points[0] if ctx.points else nearest_point(ctx.system, 0.0)


def _scalar_rows(values: list[tuple[float, float, dict]]) -> list[dict]:
    return [
        {"r": r, "residual": residual, "absolute": residual, "scale": 1.0, **extra}
        for r, residual, extra in values
    ]


def _protocol(ctx: RuleContext) -> tuple[Protocol, tuple[float, ...]]:
    sys = ctx.system
    times = tuple(float(t) for t in ctx.option("times", ctx.check.times))
    settings = ctx.check.protocol
    kind = settings.kind if settings else "static"
    duration = settings.duration if settings and settings.duration else max(max(times), 1e-12)
    segments = settings.segments if settings else 1
    if kind == "trap_quench":
        omega = settings.omega if settings.omega is not None else 2.0 * sys.spec.omega
        after = trap_quench_hamiltonian(sys, harmonic_potential(omega, sys.mass))
        return quench_protocol(sys, after, duration, segments=segments), times
    if kind == "tilt_quench":
        after = tilt_quench_hamiltonian(sys, settings.force)
        return quench_protocol(sys, after, duration, segments=segments), times
    return static_protocol(sys, duration), times


def _finite_difference_report(rule_id: str, check: FiniteDifferenceCheck, factor: float) -> SumRuleReport:
    rows = [
        {"level": level, "step": step, "residual": error, "absolute": error, "scale": check.scale}
        for level, (step, error) in enumerate(zip(check.steps, check.errors))
    ]
    return build_report(
        rule_id,
        rows,
        factor,
        rule_class=RuleClass.CONVERGENCE,
        details={**check.summary(), "floor": check.floor},
    )


def _force_balance(ctx: RuleContext) -> SumRuleReport:
    return check_force_balance(ctx.state, ctx.system, points=ctx.points, tolerance=ctx.tolerance)


def _hyperforce(ctx: RuleContext) -> SumRuleReport:
    observable = ctx.observable(ctx.check.observable, "sum_x")
    return check_hyperforce(
        ctx.state, ctx.system, observable, points=ctx.points, tolerance=ctx.tolerance
    )


def _product_rule(ctx: RuleContext) -> SumRuleReport:
    first = ctx.observable(ctx.check.observable, "sum_x")
    second = ctx.observable(ctx.check.second_observable, "H0")
    return check_product_rule(
        ctx.state, ctx.system, first, second, points=ctx.points, tolerance=ctx.tolerance
    )


def _three_g(ctx: RuleContext) -> SumRuleReport:
    return check_3g(
        ctx.state,
        ctx.system,
        points=ctx.points,
        stride=ctx.check.stride or THREE_G_STRIDE,
        tolerance=ctx.tolerance,
    )


def _boltzmann(ctx: RuleContext) -> SumRuleReport:
    points = ctx.points if ctx.points is not None else list(ctx.system.evaluation_points)
    values = [(float(r), check_boltzmann_identity(ctx.state, ctx.system, r), {}) for r in points]
    return build_report("boltzmann", _scalar_rows(values), ctx.tolerance)


def _gauge_invariance(ctx: RuleContext) -> SumRuleReport:
    observable = ctx.observable(ctx.check.observable, "sum_x")
    rows = []
    for shift in _fields(ctx):
        residual = check_gauge_invariance(ctx.state, ctx.system, shift, observable)
        rows.append({"field": shift.label, "residual": residual, "absolute": residual, "scale": 1.0})
    return build_report("gauge_invariance", rows, ctx.tolerance)


def _anti_self_adjoint(ctx: RuleContext) -> SumRuleReport:
    first = ctx.observable(ctx.check.observable, "random_hermitian(1)")
    second = ctx.observable(ctx.check.second_observable, "random_hermitian(2)")
    general = first.entries + 1j * second.entries
    points = ctx.points if ctx.points is not None else list(ctx.system.evaluation_points)
    values = []
    for r in points:
        trace = check_anti_self_adjoint(ctx.system, r, first, second)
        covariance = check_adjoint_covariance(ctx.system, r, general)
        values.append((float(r), max(trace, covariance), {"trace": trace, "adjoint": covariance}))
    return build_report("anti_self_adjoint", _scalar_rows(values), ctx.tolerance)


def _extended(ctx: RuleContext, coupling: float):
    observable = ctx.observable(ctx.check.observable, "sum_x")
    return build_extended(ctx.system, observable, coupling, ctx.beta, mu=ctx.mu)


def _extended_force_balance(ctx: RuleContext) -> SumRuleReport:
    ext = _extended(ctx, ctx.option("lambda", ctx.check.coupling))
    return check_extended_force_balance(ext, points=ctx.points, tolerance=ctx.tolerance)


def _chi_density_response(ctx: RuleContext) -> SumRuleReport:
    coupling = ctx.check.coupling if ctx.check.coupling is not None else 0.0
    ext = _extended(ctx, coupling)
    check = check_chi_is_density_response(ext, ctx.option("step", ctx.check.step), points=ctx.points)
    return _finite_difference_report("chi_density_response", check, ctx.tolerance)


def _mean_A_omega_derivative(ctx: RuleContext) -> SumRuleReport:
    coupling = ctx.check.coupling if ctx.check.coupling is not None else 0.0
    ext = _extended(ctx, coupling)
    check = check_mean_A_is_omega_derivative(ext, ctx.option("step", ctx.check.step))
    return _finite_difference_report("mean_A_omega_derivative", check, ctx.tolerance)


def _extended_force_derivative(ctx: RuleContext) -> SumRuleReport:
    coupling = ctx.check.coupling if ctx.check.coupling is not None else 0.0
    ext = _extended(ctx, coupling)
    step = ctx.check.step if ctx.check.step is not None else ctx.defaults["checks"]["force_step"]
    check = extended_force_derivative(ext, _center(ctx), step)
    return _finite_difference_report("extended_force_derivative", check, ctx.tolerance)


def _shift_current(ctx: RuleContext) -> SumRuleReport:
    protocol, times = _protocol(ctx)
    return check_shift_current_zero(
        ctx.state, ctx.system, protocol, times, points=ctx.points, tolerance=ctx.tolerance
    )


def _hypercurrent(ctx: RuleContext) -> SumRuleReport:
    protocol, times = _protocol(ctx)
    observable = ctx.observable(ctx.check.observable, "sum_x")
    report = check_hypercurrent(
        ctx.state,
        ctx.system,
        protocol,
        observable,
        times,
        points=ctx.points,
        tolerance=ctx.tolerance,
    )
    trace = check_dynamic_anti_self_adjoint(
        ctx.system, protocol, _center(ctx), times[-1], observable, ctx.system.position_sum
    )
    return build_report(
        report.rule_id,
        report.frame.to_dict("records"),
        report.tolerance,
        details={**report.details, "dynamic_trace_residual": trace},
    )


def _fig1(ctx: RuleContext) -> SumRuleReport:
    return profile_report(ctx.system, ctx.beta, ctx.tolerance)


def _study(ctx: RuleContext, rule_id: str, measure: Callable[[ManyBodySystem], float]) -> SumRuleReport:
    return doubling_study(
        rule_id,
        ctx.system.spec,
        ctx.rebuild,
        measure,
        levels=ctx.convergence("levels", ctx.check.levels),
        factor=ctx.tolerance,
        floor=float(ctx.defaults["convergence"]["floor"]),
    )


def _sigma_commutator(ctx: RuleContext) -> SumRuleReport:
    n_states = ctx.convergence("n_states", ctx.check.n_states)
    smearing = ctx.convergence("smearing", ctx.check.smearing)
    requested = list(ctx.check.points) if ctx.check.points else [0.0, 0.5]
    r, r_prime = requested[0], requested[-1]
    name = ctx.check.observable or "gaussian_x"

    def measure(sys: ManyBodySystem) -> float:
        operator = resolve_observable(name, sys, ctx.beta)
        return check_sigma_commutator(
            sys, r, r_prime, operator, smearing=smearing, n_states=n_states
        )

    return _study(ctx, "sigma_commutator", measure)


def _lie_algebra(ctx: RuleContext) -> SumRuleReport:
    n_states = ctx.convergence("n_states", ctx.check.n_states)
    # unbounded fields only converge where the basis has no walls
    names = list(ctx.check.fields or ctx.defaults["convergence"]["lie_fields"][ctx.system.spec.kind])
    if len(names) == 1:
        names.append(names[0])
    name = ctx.check.observable or "gaussian_x"

    def measure(sys: ManyBodySystem) -> float:
        length = _length(sys)
        operator = resolve_observable(name, sys, ctx.beta)
        return check_lie_algebra(
            sys, _field(names[0], length), _field(names[1], length), operator, n_states=n_states
        )

    return _study(ctx, "lie_algebra", measure)


def _density_hyperforce(ctx: RuleContext) -> SumRuleReport:
    n_states = ctx.convergence("n_states", ctx.check.n_states)
    requested = list(ctx.check.points) if ctx.check.points else [0.0]

    def measure(sys: ManyBodySystem) -> float:
        return max(density_hyperforce_residual(sys, r, n_states) for r in requested)

    return _study(ctx, "density_hyperforce", measure)


def _canonical_shift(ctx: RuleContext) -> SumRuleReport:
    n_states = ctx.convergence("n_states", ctx.check.n_states)
    return _study(ctx, "canonical_shift", lambda sys: canonical_shift_residual(sys, 1.0, n_states))


def _external_force_split(ctx: RuleContext) -> SumRuleReport:
    n_states = ctx.convergence("n_states", ctx.check.n_states)
    requested = list(ctx.check.points) if ctx.check.points else [0.0]

    def measure(sys: ManyBodySystem) -> float:
        return max(external_force_residual(sys, r, n_states) for r in requested)

    return _study(ctx, "external_force_split", measure)


_RUNNERS: dict[str, tuple[bool, Callable[[RuleContext], SumRuleReport], str]] = {
    "force_balance": (True, _force_balance, "<F(r)> = 0"),
    "hyperforce": (True, _hyperforce, "<S_A(r)> + (A|beta F(r)) = 0"),
    "product_rule": (True, _product_rule, "<S_A B> + <A S_B> + ((AB)^dagger|beta F) = 0"),
    "3g": (True, _three_g, "(beta F(r)|beta F(r')) + <sigma(r) beta F(r')> = 0"),
    "boltzmann": (True, _boltzmann, "sigma(r) exp(-beta H) as an imaginary-time force integral"),
    "gauge_invariance": (True, _gauge_invariance, "<Sigma[eps]A> + (A|beta F[eps]) = 0"),
    "anti_self_adjoint": (False, _anti_self_adjoint, "Tr A sigma B = -Tr (sigma A) B"),
    "extended_force_balance": (True, _extended_force_balance, "<F_0 + lambda S_A/beta>_A = 0"),
    "shift_current": (True, _shift_current, "<C(r, t)> = 0"),
    "hypercurrent": (True, _hypercurrent, "<S_A(r, t)> + (A(t)|C(r, t)) = 0"),
    "fig1": (True, _fig1, "oscillator covariance cancellation, density normalized"),
    "sigma_commutator": (False, _sigma_commutator, "[sigma(r), sigma(r')] algebra"),
    "lie_algebra": (False, _lie_algebra, "[Sigma[e1], Sigma[e2]] = Sigma[e1 e2' - e2 e1']"),
    "density_hyperforce": (False, _density_hyperforce, "S_{sum x}(r) = rho(r)"),
    "canonical_shift": (False, _canonical_shift, "Sigma[c] x = c, Sigma[x] p = -p"),
    "external_force_split": (False, _external_force_split, "F_ext(r) = -rho(r) V'(r)"),
    "chi_density_response": (True, _chi_density_response, "chi_A = d rho / d lambda"),
    "mean_A_omega_derivative": (True, _mean_A_omega_derivative, "<A> = -d beta Omega / d lambda"),
    "extended_force_derivative": (
        True,
        _extended_force_derivative,
        "d<F_0>_A/d lambda = cov(A|beta F_0)/beta",
    ),
}


def _registry() -> dict[str, RuleSpec]:
    table = load_defaults()["rules"]
    registry = {}
    for rule_id, (thermal, run, description) in _RUNNERS.items():
        entry = table[rule_id]
        registry[rule_id] = RuleSpec(
            rule_id=rule_id,
            rule_class=RuleClass(entry["class"]),
            tolerance=float(entry["tolerance"]),
            thermal=thermal,
            run=run,
            description=description,
        )
    return registry


RULES: dict[str, RuleSpec] = _registry()


def rule_table() -> list[dict[str, object]]:
    """Rows for ``list-rules``: id, class, tolerance, description."""
    return [
        {
            "rule": spec.rule_id,
            "class": spec.rule_class.value,
            "tolerance": spec.tolerance,
            "description": spec.description,
        }
        for spec in RULES.values()
    ]

from __future__ import annotations

# Purpose: Expose shifting superoperators and their structure checks.
# Date: 2026-10-07
# Related tests: tests/test_gauge.py

"""Gauge package exports."""

from .checks import (
    DEFAULT_DECAY,
    DEFAULT_FLOOR,
    RepresentationError,
    check_adjoint_covariance,
    check_anti_self_adjoint,
    check_lie_algebra,
    check_sigma_commutator,
    decays_under_doubling,
    projected_residual,
    trace_product,
)
from .fields import (
    ShiftField,
    ShiftFieldError,
    constant_field,
    cosine_field,
    gaussian_field,
    lie_bracket_field,
    power_field,
    sine_field,
)
from .shifting import (
    ForceDensity,
    force_density,
    hyperforce_density,
    shift_generator,
    shift_with,
    sigma_apply,
    sigma_integrated_apply,
)

__all__ = [
    "DEFAULT_DECAY",
    "DEFAULT_FLOOR",
    "RepresentationError",
    "check_adjoint_covariance",
    "check_anti_self_adjoint",
    "check_lie_algebra",
    "check_sigma_commutator",
    "decays_under_doubling",
    "projected_residual",
    "trace_product",
    "ShiftField",
    "ShiftFieldError",
    "constant_field",
    "cosine_field",
    "gaussian_field",
    "lie_bracket_field",
    "power_field",
    "sine_field",
    "ForceDensity",
    "force_density",
    "hyperforce_density",
    "shift_generator",
    "shift_with",
    "sigma_apply",
    "sigma_integrated_apply",
]

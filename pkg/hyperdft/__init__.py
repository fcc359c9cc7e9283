from __future__ import annotations

# Purpose: Expose extended-ensemble checks for convenient imports.
# Date: 2026-10-11
# Related tests: tests/test_hyperdft.py

"""Extended-ensemble package exports."""

from .extended import (
    FD_FLOOR_RTOL,
    RESPONSE_RATIO,
    ExtendedEnsemble,
    FiniteDifferenceCheck,
    build_extended,
    check_chi_is_density_response,
    check_extended_force_balance,
    check_mean_A_is_omega_derivative,
    density_profile,
    extended_force_derivative,
    hyperfluctuation_profile,
    richardson,
)

__all__ = [
    "FD_FLOOR_RTOL",
    "RESPONSE_RATIO",
    "ExtendedEnsemble",
    "FiniteDifferenceCheck",
    "build_extended",
    "check_chi_is_density_response",
    "check_extended_force_balance",
    "check_mean_A_is_omega_derivative",
    "density_profile",
    "extended_force_derivative",
    "hyperfluctuation_profile",
    "richardson",
]

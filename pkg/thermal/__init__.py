from __future__ import annotations

# Purpose: Expose thermal states and Mori products for convenient imports.
# Date: 2026-10-08
# Related tests: tests/test_thermal.py

"""Thermal package exports."""

from .ensemble import (
    EnsembleError,
    SpectralThermalState,
    ThermalSector,
    free_energy,
    grand_potential,
    make_grand_state,
    make_thermal_state,
    thermal_average,
    thermal_state_for,
)
from .mori import (
    GAP_RTOL,
    QUADRATURE_NODES,
    check_boltzmann_identity,
    check_gauge_invariance,
    gap_tolerance,
    mori_covariance,
    mori_kernel,
    mori_product,
    mori_product_quadrature,
)

__all__ = [
    "EnsembleError",
    "SpectralThermalState",
    "ThermalSector",
    "free_energy",
    "grand_potential",
    "make_grand_state",
    "make_thermal_state",
    "thermal_average",
    "thermal_state_for",
    "GAP_RTOL",
    "QUADRATURE_NODES",
    "check_boltzmann_identity",
    "check_gauge_invariance",
    "gap_tolerance",
    "mori_covariance",
    "mori_kernel",
    "mori_product",
    "mori_product_quadrature",
]

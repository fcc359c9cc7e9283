from __future__ import annotations

# Purpose: Expose basis and many-body builders for convenient imports.
# Date: 2026-10-06
# Related tests: tests/test_systems.py

"""System-builder package exports."""

from .basis import (
    BasisSpec,
    BasisSpecError,
    EvaluationPointError,
    SingleParticleOperators,
    build_single_particle,
    hermite_functions,
    locate_point,
)
from .many_body import (
    ManyBodySystem,
    Sector,
    SystemBuildError,
    build_grand_system,
    build_many_body,
    current_operator,
    density_operator,
    exchange_projector,
    gaussian_pair_potential,
    harmonic_potential,
    low_subspace_projector,
    tabulated_potential,
    tilted_potential,
    with_asymmetry,
)
from .profile import Profile

__all__ = [
    "BasisSpec",
    "BasisSpecError",
    "EvaluationPointError",
    "SingleParticleOperators",
    "build_single_particle",
    "hermite_functions",
    "locate_point",
    "ManyBodySystem",
    "Sector",
    "SystemBuildError",
    "build_grand_system",
    "build_many_body",
    "current_operator",
    "density_operator",
    "exchange_projector",
    "gaussian_pair_potential",
    "harmonic_potential",
    "low_subspace_projector",
    "tabulated_potential",
    "tilted_potential",
    "with_asymmetry",
    "Profile",
]

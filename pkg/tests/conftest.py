from __future__ import annotations

import numpy as np
import pytest

from systems import (
    BasisSpec,
    ManyBodySystem,
    build_grand_system,
    build_many_body,
    harmonic_potential,
)
from thermal import SpectralThermalState, thermal_state_for


@pytest.fixture
def rng() -> np.random.Generator:
    """Seeded generator so random operators are reproducible across runs."""
    return np.random.default_rng(20251012)


@pytest.fixture(scope="session")
def osc_spec() -> BasisSpec:
    return BasisSpec(kind="oscillator", n_max=40, eval_points=41, x_span=4.0)


@pytest.fixture(scope="session")
def osc_system(osc_spec: BasisSpec) -> ManyBodySystem:
    """One particle in a harmonic trap, oscillator basis."""
    return build_many_body(osc_spec, particles=1, external_potential=harmonic_potential())


@pytest.fixture(scope="session")
def grid_spec() -> BasisSpec:
    return BasisSpec(kind="grid", grid_points=32, box_length=10.0)


@pytest.fixture(scope="session")
def grid_system(grid_spec: BasisSpec) -> ManyBodySystem:
    """One particle in a harmonic trap on a hard-wall central-difference grid."""
    return build_many_body(grid_spec, particles=1, external_potential=harmonic_potential())


@pytest.fixture(scope="session", params=["boson", "fermion"])
def pair_system(request: pytest.FixtureRequest) -> ManyBodySystem:
    """Two interacting identical particles on a 16-site grid."""
    spec = BasisSpec(kind="grid", grid_points=16, box_length=8.0)
    return build_many_body(
        spec,
        particles=2,
        statistics=request.param,
        external_potential=harmonic_potential(),
    )


@pytest.fixture(scope="session")
def grand_system() -> ManyBodySystem:
    """Bosonic sectors N = 0, 1, 2 on a 10-site grid."""
    spec = BasisSpec(kind="grid", grid_points=10, box_length=6.0)
    return build_grand_system(
        spec, max_particles=2, statistics="boson", external_potential=harmonic_potential()
    )


@pytest.fixture(scope="session")
def osc_state(osc_system: ManyBodySystem) -> SpectralThermalState:
    return thermal_state_for(osc_system, 1.0)


@pytest.fixture(scope="session")
def grid_state(grid_system: ManyBodySystem) -> SpectralThermalState:
    return thermal_state_for(grid_system, 1.0)


@pytest.fixture(scope="session")
def pair_state(pair_system: ManyBodySystem) -> SpectralThermalState:
    return thermal_state_for(pair_system, 2.0)


@pytest.fixture(scope="session")
def grand_state(grand_system: ManyBodySystem) -> SpectralThermalState:
    return thermal_state_for(grand_system, 1.0, mu=0.5)

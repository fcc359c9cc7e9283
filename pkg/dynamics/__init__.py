from __future__ import annotations

# Purpose: Expose time-dependent protocols and the hypercurrent checks.
# Date: 2026-10-12
# Related tests: tests/test_dynamics.py

"""Dynamics package exports."""

from .hypercurrent import (
    check_dynamic_anti_self_adjoint,
    check_hypercurrent,
    check_shift_current_zero,
    heisenberg_current,
    shift_current,
)
from .propagation import (
    Propagator,
    Protocol,
    ProtocolError,
    Segment,
    heisenberg,
    propagate,
    propagator_table,
    quench_protocol,
    static_protocol,
    tilt_quench_hamiltonian,
    trap_quench_hamiltonian,
)

__all__ = [
    "check_dynamic_anti_self_adjoint",
    "check_hypercurrent",
    "check_shift_current_zero",
    "heisenberg_current",
    "shift_current",
    "Propagator",
    "Protocol",
    "ProtocolError",
    "Segment",
    "heisenberg",
    "propagate",
    "propagator_table",
    "quench_protocol",
    "static_protocol",
    "tilt_quench_hamiltonian",
    "trap_quench_hamiltonian",
]

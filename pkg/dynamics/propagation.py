from __future__ import annotations

# Purpose: Piecewise-constant protocols, spectral propagators and Heisenberg conjugation.
# Date: 2026-10-12
# Related tests: tests/test_dynamics.py

"""Unitary time evolution under staircase Hamiltonians."""

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from operators import (
    DimensionMismatchError,
    OperatorMatrix,
    SpectralDecomposition,
    as_array,
    hermitian_part,
    spectral_decompose,
)
from systems import ManyBodySystem

__all__ = [
    "ProtocolError",
    "Segment",
    "Protocol",
    "Propagator",
    "propagate",
    "propagator_table",
    "heisenberg",
    "static_protocol",
    "quench_protocol",
    "trap_quench_hamiltonian",
    "tilt_quench_hamiltonian",
]

logger = logging.getLogger(__name__)

TIME_MATCH_RTOL = 1e-12


class ProtocolError(ValueError):
    """Raised for invalid protocols or evaluation times."""


@dataclass(frozen=True, eq=False)
class Segment:
    duration: float
    hamiltonian: OperatorMatrix


@dataclass(frozen=True, eq=False)
class Protocol:
    """Ordered constant-Hamiltonian segments following an equilibrium H_0."""

    segments: tuple[Segment, ...]
    initial: OperatorMatrix
    hbar: float = 1.0

    def __post_init__(self) -> None:
        if not self.segments:
            raise ProtocolError("a protocol needs at least one segment")
        for index, segment in enumerate(self.segments):
            if not segment.duration > 0.0:
                raise ProtocolError(f"segment {index} has non-positive duration {segment.duration}")
            if segment.hamiltonian.dim != self.initial.dim:
                raise ProtocolError(
                    f"segment {index} acts on dimension {segment.hamiltonian.dim}, "
                    f"expected {self.initial.dim}"
                )
            if not segment.hamiltonian.is_hermitian(1e-10):
                raise ProtocolError(
                    f"segment {index} Hamiltonian is not Hermitian "
                    f"(asymmetry {segment.hamiltonian.asymmetry():.3e})"
                )

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def total_duration(self) -> float:
        return float(sum(segment.duration for segment in self.segments))

    @cached_property
    def spectra(self) -> tuple[SpectralDecomposition, ...]:
        return tuple(spectral_decompose(segment.hamiltonian) for segment in self.segments)

    def step(self, index: int, duration: float) -> np.ndarray:
        """exp(-i H_k duration / hbar) of segment ``index``."""
        spectrum = self.spectra[index]
        phases = np.exp(-1j * spectrum.eigenvalues * duration / self.hbar)
        return (spectrum.unitary * phases[np.newaxis, :]) @ spectrum.unitary.conj().T


@dataclass(frozen=True, eq=False)
class Propagator:
    """Table of U(t) at requested times."""

    times: tuple[float, ...]
    unitaries: tuple[OperatorMatrix, ...]

    def at(self, t: float) -> OperatorMatrix:
        for time, unitary in zip(self.times, self.unitaries):
            if np.isclose(time, t, rtol=TIME_MATCH_RTOL, atol=TIME_MATCH_RTOL):
                return unitary
        raise ProtocolError(f"time {t!r} is not in the propagator table")

    def unitarity_defect(self) -> float:
        worst = 0.0
        for unitary in self.unitaries:
            u = unitary.entries
            worst = max(worst, float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))))
        return worst


def propagate(protocol: Protocol, t: float) -> OperatorMatrix:
    """Return U(t) for 0 <= t <= total duration.

    Raises:
        ProtocolError: If t lies outside the protocol.
    """
    total = protocol.total_duration
    slack = TIME_MATCH_RTOL * max(1.0, total)
    if t < -slack or t > total + slack:
        raise ProtocolError(f"time {t} outside protocol range [0, {total}]")
    unitary = np.eye(protocol.dim, dtype=np.complex128)
    elapsed = 0.0
    for index, segment in enumerate(protocol.segments):
        remaining = t - elapsed
        if remaining <= 0.0:
            break
        span = min(segment.duration, remaining)
        unitary = protocol.step(index, span) @ unitary
        elapsed += segment.duration
    return OperatorMatrix(unitary)


def propagator_table(protocol: Protocol, times: Sequence[float]) -> Propagator:
    ordered = tuple(float(t) for t in times)
    unitaries = tuple(propagate(protocol, t) for t in ordered)
    table = Propagator(times=ordered, unitaries=unitaries)
    logger.debug(
        "Propagated %d times, unitarity defect %.3e", len(ordered), table.unitarity_defect()
    )
    return table


def heisenberg(operator: OperatorMatrix | np.ndarray, unitary: OperatorMatrix | np.ndarray) -> OperatorMatrix:
    """Return U^dagger A U.

    Raises:
        DimensionMismatchError: If A and U differ in shape.
    """
    a = as_array(operator)
    u = as_array(unitary)
    if a.shape != u.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {u.shape}")
    hint = bool(getattr(operator, "hermitian_hint", False))
    return OperatorMatrix(u.conj().T @ a @ u, hermitian_hint=hint)


def static_protocol(sys: ManyBodySystem, duration: float) -> Protocol:
    """No drive: the equilibrium Hamiltonian for the whole duration."""
    return quench_protocol(sys, hermitian_part(sys.hamiltonian), duration)


def quench_protocol(
    sys: ManyBodySystem,
    hamiltonian_after: OperatorMatrix,
    duration: float,
    *,
    segments: int = 1,
) -> Protocol:
    """Switch from H_0 to ``hamiltonian_after`` at t = 0 and hold it."""
    if segments < 1:
        raise ProtocolError(f"segment count must be positive, got {segments}")
    piece = duration / segments
    return Protocol(
        segments=tuple(Segment(piece, hamiltonian_after) for _ in range(segments)),
        initial=sys.hamiltonian,
        hbar=sys.hbar,
    )


def trap_quench_hamiltonian(
    sys: ManyBodySystem, potential: Callable[[np.ndarray], np.ndarray]
) -> OperatorMatrix:
    """H with the external potential replaced by ``potential``."""
    external = sys.lift(sys.single.function_of_position(potential).entries).entries
    entries = sys.kinetic.entries + sys.interparticle.entries + external
    return OperatorMatrix(0.5 * (entries + entries.conj().T), hermitian_hint=True)


def tilt_quench_hamiltonian(sys: ManyBodySystem, force: float) -> OperatorMatrix:
    """H plus a uniform tilt f * sum_i x_i."""
    entries = sys.hamiltonian.entries + force * sys.position_sum.entries
    return OperatorMatrix(0.5 * (entries + entries.conj().T), hermitian_hint=True)


from __future__ import annotations

# Purpose: Single-particle bases (uniform grid, truncated oscillator) and their operators.
# Date: 2026-10-06
# Related tests: tests/test_systems.py

"""Single-particle basis construction helpers."""

import logging
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Callable, Literal

import numpy as np

from operators import OperatorMatrix, SpectralDecomposition, spectral_decompose

__all__ = [
    "BasisSpecError",
    "EvaluationPointError",
    "BasisSpec",
    "SingleParticleOperators",
    "build_single_particle",
    "hermite_functions",
    "locate_point",
]

logger = logging.getLogger(__name__)

BasisKind = Literal["grid", "oscillator"]
Boundary = Literal["periodic", "hard-wall"]
MomentumScheme = Literal["spectral", "central-difference"]

MIN_GRID_POINTS = 8
MIN_OSCILLATOR_LEVELS = 8
POINT_MATCH_RTOL = 1e-9
OSCILLATOR_PADDING = 2


class BasisSpecError(ValueError):
    """Raised when a basis specification is invalid."""


class EvaluationPointError(ValueError):
    """Raised when a position is not part of the evaluation set."""


@dataclass(frozen=True)
class BasisSpec:
    """Description of a one-dimensional single-particle basis.

    Grid bases use ``grid_points`` sites of spacing ``box_length / grid_points``
    centred on the origin.  Oscillator bases keep the number states
    ``0..n_max`` of a trap with frequency ``omega``.
    """

    kind: BasisKind
    grid_points: int = 32
    box_length: float = 10.0
    boundary: Boundary = "hard-wall"
    momentum_scheme: MomentumScheme = "central-difference"
    n_max: int = 40
    omega: float = 1.0
    hbar: float = 1.0
    mass: float = 1.0
    eval_points: int = 161
    x_span: float = 8.0

    def __post_init__(self) -> None:
        if self.hbar <= 0.0 or self.mass <= 0.0:
            raise BasisSpecError(f"hbar and mass must be positive (hbar={self.hbar}, m={self.mass})")
        if self.kind == "grid":
            if int(self.grid_points) < MIN_GRID_POINTS:
                raise BasisSpecError(
                    f"grid needs at least {MIN_GRID_POINTS} points, got {self.grid_points}"
                )
            if not self.box_length > 0.0:
                raise BasisSpecError(f"box length must be positive, got {self.box_length}")
            if self.boundary not in ("periodic", "hard-wall"):
                raise BasisSpecError(f"unknown boundary {self.boundary!r}")
            if self.momentum_scheme not in ("spectral", "central-difference"):
                raise BasisSpecError(f"unknown momentum scheme {self.momentum_scheme!r}")
        elif self.kind == "oscillator":
            if int(self.n_max) < MIN_OSCILLATOR_LEVELS:
                raise BasisSpecError(
                    f"oscillator basis needs n_max >= {MIN_OSCILLATOR_LEVELS}, got {self.n_max}"
                )
            if not self.omega > 0.0:
                raise BasisSpecError(f"oscillator frequency must be positive, got {self.omega}")
            if self.eval_points < 2 or not self.x_span > 0.0:
                raise BasisSpecError("oscillator evaluation grid needs >= 2 points and a positive span")
        else:
            raise BasisSpecError(f"unknown basis kind {self.kind!r}")

    @property
    def spacing(self) -> float:
        """Grid spacing h = L/M (grid kind only)."""
        return self.box_length / self.grid_points

    @property
    def oscillator_length(self) -> float:
        """sqrt(hbar / (m omega)); the natural length of the trap."""
        return float(np.sqrt(self.hbar / (self.mass * self.omega)))

    @property
    def dim(self) -> int:
        return int(self.grid_points) if self.kind == "grid" else int(self.n_max) + 1

    def doubled(self) -> "BasisSpec":
        """Return the same basis at twice the resolution."""
        if self.kind == "grid":
            return replace(self, grid_points=2 * self.grid_points)
        return replace(self, n_max=2 * self.n_max)


def hermite_functions(
    n_max: int,
    x: np.ndarray | float,
    *,
    hbar: float = 1.0,
    mass: float = 1.0,
    omega: float = 1.0,
) -> np.ndarray:
    """Evaluate normalized oscillator eigenfunctions phi_0..phi_n_max at x.

    Uses the normalized three-term recurrence, which stays finite far beyond
    the range where factorial prefactors overflow.

    Returns:
        np.ndarray: shape (n_max + 1, len(x)).
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    xi = xs * np.sqrt(mass * omega / hbar)
    phi = np.zeros((n_max + 1, xs.size))
    phi[0] = (mass * omega / (np.pi * hbar)) ** 0.25 * np.exp(-0.5 * xi**2)
    if n_max >= 1:
        phi[1] = np.sqrt(2.0) * xi * phi[0]
    for n in range(1, n_max):
        phi[n + 1] = xi * np.sqrt(2.0 / (n + 1)) * phi[n] - np.sqrt(n / (n + 1)) * phi[n - 1]
    return phi


@dataclass(frozen=True, eq=False)
class SingleParticleOperators:
    """Position, momentum and kinetic operators of one particle in a basis."""

    spec: BasisSpec
    position: OperatorMatrix
    momentum: OperatorMatrix
    kinetic: OperatorMatrix
    coordinates: np.ndarray = field(default_factory=lambda: np.zeros(0))
    padded_position: OperatorMatrix | None = None

    @property
    def dim(self) -> int:
        return self.position.dim

    @cached_property
    def position_spectrum(self) -> SpectralDecomposition:
        if self.spec.kind == "grid":
            return SpectralDecomposition(
                eigenvalues=np.asarray(self.coordinates, dtype=float),
                unitary=np.eye(self.dim, dtype=np.complex128),
            )
        return spectral_decompose(self.position)

    @cached_property
    def evaluation_points(self) -> np.ndarray:
        if self.spec.kind == "grid":
            return np.asarray(self.coordinates, dtype=float)
        span = self.spec.x_span * self.spec.oscillator_length
        return np.linspace(-span, span, self.spec.eval_points)

    @cached_property
    def padded_position_spectrum(self) -> SpectralDecomposition:
        if self.padded_position is None:
            return self.position_spectrum
        return spectral_decompose(self.padded_position)

    def function_of_position(self, func: Callable[[np.ndarray], np.ndarray]) -> OperatorMatrix:
        """Return f(x) formed on the spectrum of the position operator.

        Oscillator bases evaluate f on the enlarged ladder basis and keep the
        leading block, so polynomial potentials carry their exact matrix
        elements up to the last retained level.
        """
        values = self.padded_position_spectrum.function(func)
        if self.padded_position is None:
            return values
        block = values.entries[: self.dim, : self.dim]
        if not values.hermitian_hint:
            return OperatorMatrix(block)
        return OperatorMatrix(0.5 * (block + block.conj().T), hermitian_hint=True)

    def density_factor(self, r: float) -> np.ndarray:
        """Single-particle matrix of delta(r - x).

        Grid: normalized site projector |k><k|/h.  Oscillator: phi_m(r) phi_n(r).
        """
        if self.spec.kind == "grid":
            index = locate_point(self.coordinates, r)
            factor = np.zeros((self.dim, self.dim), dtype=np.complex128)
            factor[index, index] = 1.0 / self.spec.spacing
            return factor
        phi = hermite_functions(
            self.spec.n_max,
            r,
            hbar=self.spec.hbar,
            mass=self.spec.mass,
            omega=self.spec.omega,
        )[:, 0]
        return np.outer(phi, phi).astype(np.complex128)

    def current_factor(self, r: float) -> np.ndarray:
        """Single-particle matrix of m J(r) = (p delta + delta p) / 2."""
        delta = self.density_factor(r)
        p = self.momentum.entries
        return 0.5 * (p @ delta + delta @ p)


def locate_point(points: np.ndarray, r: float) -> int:
    """Return the index of r in the evaluation points or raise."""
    points = np.asarray(points, dtype=float)
    if points.size == 0:
        raise EvaluationPointError("empty evaluation set")
    index = int(np.argmin(np.abs(points - r)))
    scale = max(1.0, float(np.max(np.abs(points))))
    if abs(points[index] - r) > POINT_MATCH_RTOL * scale:
        raise EvaluationPointError(
            f"position {r!r} is not an evaluation point (nearest {points[index]!r})"
        )
    return index


def build_single_particle(spec: BasisSpec) -> SingleParticleOperators:
    """Construct x, p and the kinetic energy for a single particle.

    Args:
        spec: Validated basis specification.

    Returns:
        SingleParticleOperators: Hermitian operator set on the basis.
    """
    if spec.kind == "oscillator":
        return _build_oscillator(spec)
    return _build_grid(spec)


def _ladder_operators(spec: BasisSpec, levels: int) -> tuple[np.ndarray, np.ndarray]:
    lowering = np.diag(np.sqrt(np.arange(1, levels, dtype=float)), k=1).astype(np.complex128)
    raising = lowering.conj().T
    x = np.sqrt(spec.hbar / (2.0 * spec.mass * spec.omega)) * (lowering + raising)
    p = 1j * np.sqrt(spec.hbar * spec.mass * spec.omega / 2.0) * (raising - lowering)
    return x, p


def _build_oscillator(spec: BasisSpec) -> SingleParticleOperators:
    levels = spec.n_max + 1
    x, p = _ladder_operators(spec, levels)
    # products of x and p need the levels above n_max to stay exact at the edge
    padded_x, padded_p = _ladder_operators(spec, OSCILLATOR_PADDING * levels)
    kinetic = (padded_p @ padded_p)[:levels, :levels] / (2.0 * spec.mass)
    logger.debug("Oscillator basis with %d levels (omega=%g)", levels, spec.omega)
    return SingleParticleOperators(
        spec=spec,
        position=OperatorMatrix(x, hermitian_hint=True),
        momentum=OperatorMatrix(p, hermitian_hint=True),
        kinetic=OperatorMatrix(0.5 * (kinetic + kinetic.conj().T), hermitian_hint=True),
        padded_position=OperatorMatrix(padded_x, hermitian_hint=True),
    )


def _build_grid(spec: BasisSpec) -> SingleParticleOperators:
    m_points = int(spec.grid_points)
    h = spec.spacing
    coords = -0.5 * spec.box_length + (np.arange(m_points) + 0.5) * h
    hbar, mass = spec.hbar, spec.mass

    if spec.momentum_scheme == "spectral" and spec.boundary == "periodic":
        p, kinetic = _fourier_momentum(m_points, h, hbar, mass)
    elif spec.momentum_scheme == "spectral":
        p, kinetic = _sinc_dvr_momentum(m_points, h, hbar, mass)
    else:
        p, kinetic = _central_difference_momentum(
            m_points, h, hbar, mass, periodic=spec.boundary == "periodic"
        )

    logger.debug(
        "Grid basis M=%d h=%.4g boundary=%s scheme=%s",
        m_points,
        h,
        spec.boundary,
        spec.momentum_scheme,
    )
    return SingleParticleOperators(
        spec=spec,
        position=OperatorMatrix(np.diag(coords), hermitian_hint=True),
        momentum=OperatorMatrix(0.5 * (p + p.conj().T), hermitian_hint=True),
        kinetic=OperatorMatrix(0.5 * (kinetic + kinetic.conj().T), hermitian_hint=True),
        coordinates=coords,
    )


def _fourier_momentum(
    m_points: int, h: float, hbar: float, mass: float
) -> tuple[np.ndarray, np.ndarray]:
    wavenumbers = 2.0 * np.pi * np.fft.fftfreq(m_points, d=h)
    kinetic_diag = (hbar * wavenumbers) ** 2 / (2.0 * mass)
    momentum_diag = hbar * wavenumbers.copy()
    if m_points % 2 == 0:
        # odd derivative drops the Nyquist component
        momentum_diag[m_points // 2] = 0.0
    index = np.arange(m_points)
    dft = np.exp(-2j * np.pi * np.outer(index, index) / m_points) / np.sqrt(m_points)
    p = dft.conj().T @ np.diag(momentum_diag) @ dft
    kinetic = dft.conj().T @ np.diag(kinetic_diag) @ dft
    return p, kinetic


def _sinc_dvr_momentum(
    m_points: int, h: float, hbar: float, mass: float
) -> tuple[np.ndarray, np.ndarray]:
    index = np.arange(m_points)
    diff = index[:, np.newaxis] - index[np.newaxis, :]
    sign = np.where(diff % 2 == 0, 1.0, -1.0)
    safe = np.where(diff == 0, 1, diff)
    derivative = np.where(diff == 0, 0.0, sign / (safe * h))
    kinetic = np.where(
        diff == 0,
        hbar**2 * np.pi**2 / (6.0 * mass * h**2),
        hbar**2 * sign / (mass * h**2 * safe**2),
    )
    return -1j * hbar * derivative, kinetic.astype(np.complex128)


def _central_difference_momentum(
    m_points: int, h: float, hbar: float, mass: float, *, periodic: bool
) -> tuple[np.ndarray, np.ndarray]:
    forward = np.eye(m_points, k=1)
    backward = np.eye(m_points, k=-1)
    if periodic:
        forward[-1, 0] = 1.0
        backward[0, -1] = 1.0
    derivative = (forward - backward) / (2.0 * h)
    laplacian = (forward + backward - 2.0 * np.eye(m_points)) / h**2
    return -1j * hbar * derivative, (-(hbar**2) / (2.0 * mass) * laplacian).astype(np.complex128)

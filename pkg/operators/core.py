from __future__ import annotations

# Purpose: Dense complex operator algebra shared by every other package.
# Date: 2026-10-05
# Related tests: tests/test_operators.py

"""Operator matrices, commutators, spectral decomposition and residual norms."""

import logging
from dataclasses import dataclass
from typing import Any, Union

import numpy as np
import scipy.linalg

__all__ = [
    "HERM_TOL",
    "DimensionMismatchError",
    "HermiticityError",
    "SpectralError",
    "OperatorMatrix",
    "SpectralDecomposition",
    "as_array",
    "identity",
    "adjoint",
    "commutator",
    "hermitian_part",
    "spectral_decompose",
    "residual_norm",
    "max_abs",
    "random_hermitian",
]

logger = logging.getLogger(__name__)

HERM_TOL = 1e-12
SPECTRAL_HERM_TOL = 1e-10
UNITARY_TOL = 1e-10
RECONSTRUCTION_TOL = 1e-9


class DimensionMismatchError(ValueError):
    """Raised when two operands do not share a shape."""


class HermiticityError(ValueError):
    """Raised when an operator that must be Hermitian is not."""


class SpectralError(RuntimeError):
    """Raised when the dense eigensolver fails or returns a bad basis."""


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """Immutable dense complex square matrix with an advisory Hermiticity flag."""

    entries: np.ndarray
    hermitian_hint: bool = False

    def __post_init__(self) -> None:
        data = np.array(self.entries, dtype=np.complex128, copy=True)
        if data.ndim != 2 or data.shape[0] != data.shape[1]:
            raise DimensionMismatchError(
                f"operator entries must be a square matrix, got shape {data.shape}"
            )
        data.setflags(write=False)
        object.__setattr__(self, "entries", data)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @property
    def H(self) -> "OperatorMatrix":
        return adjoint(self)

    def asymmetry(self) -> float:
        """Return max|A - A†|."""
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))

    def is_hermitian(self, rel_tol: float = HERM_TOL) -> bool:
        scale = max_abs(self)
        return self.asymmetry() <= rel_tol * max(scale, np.finfo(float).tiny)

    def validate_hermitian(self, rel_tol: float = HERM_TOL) -> "OperatorMatrix":
        """Raise when the Hermiticity hint is set but not honoured."""
        if self.hermitian_hint and not self.is_hermitian(rel_tol):
            raise HermiticityError(
                f"operator flagged Hermitian has asymmetry {self.asymmetry():.3e} "
                f"(scale {max_abs(self):.3e})"
            )
        return self

    def __add__(self, other: Any) -> "OperatorMatrix":
        other_arr = as_array(other)
        _require_same_shape(self.entries, other_arr)
        hint = self.hermitian_hint and getattr(other, "hermitian_hint", False)
        return OperatorMatrix(self.entries + other_arr, hint)

    def __sub__(self, other: Any) -> "OperatorMatrix":
        other_arr = as_array(other)
        _require_same_shape(self.entries, other_arr)
        hint = self.hermitian_hint and getattr(other, "hermitian_hint", False)
        return OperatorMatrix(self.entries - other_arr, hint)

    def __neg__(self) -> "OperatorMatrix":
        return OperatorMatrix(-self.entries, self.hermitian_hint)

    def __mul__(self, scalar: complex) -> "OperatorMatrix":
        if not np.isscalar(scalar):
            raise TypeError("use @ for operator products")
        hint = self.hermitian_hint and np.imag(scalar) == 0
        return OperatorMatrix(self.entries * scalar, hint)

    __rmul__ = __mul__

    def __truediv__(self, scalar: complex) -> "OperatorMatrix":
        return self * (1.0 / scalar)

    def __matmul__(self, other: Any) -> "OperatorMatrix":
        other_arr = as_array(other)
        _require_same_shape(self.entries, other_arr)
        return OperatorMatrix(self.entries @ other_arr)


OperatorLike = Union[OperatorMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Ascending eigenvalues and orthonormal eigenvector columns of a Hermitian matrix."""

    eigenvalues: np.ndarray
    unitary: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.shape[0])

    def to_eigenbasis(self, operator: OperatorLike) -> np.ndarray:
        """Return U† A U."""
        return self.unitary.conj().T @ as_array(operator) @ self.unitary

    def from_eigenbasis(self, matrix: np.ndarray) -> np.ndarray:
        """Return U M U†."""
        return self.unitary @ matrix @ self.unitary.conj().T

    def function(self, func: Any) -> OperatorMatrix:
        """Apply a scalar function to the spectrum, f(H) = U f(E) U†."""
        values = np.asarray(func(self.eigenvalues))
        matrix = (self.unitary * values[np.newaxis, :]) @ self.unitary.conj().T
        return OperatorMatrix(matrix, hermitian_hint=bool(np.isrealobj(values)))

    def reconstruct(self) -> OperatorMatrix:
        return self.function(lambda e: e)


def as_array(operator: Any) -> np.ndarray:
    """Return the complex matrix behind an operator or array-like."""
    if isinstance(operator, OperatorMatrix):
        return operator.entries
    return np.asarray(operator, dtype=np.complex128)


def _require_same_shape(left: np.ndarray, right: np.ndarray) -> None:
    if left.shape != right.shape:
        raise DimensionMismatchError(
            f"shape mismatch: {left.shape} vs {right.shape}"
        )


def max_abs(item: Any) -> float:
    """Return max|a_ij| of an operator, profile or array (0 when empty)."""
    arr = _residual_values(item)
    if arr.size == 0:
        return 0.0
    return float(np.max(np.abs(arr)))


def identity(dim: int) -> OperatorMatrix:
    return OperatorMatrix(np.eye(dim), hermitian_hint=True)


def adjoint(operator: OperatorLike) -> OperatorMatrix:
    """Return the conjugate transpose."""
    hint = getattr(operator, "hermitian_hint", False)
    return OperatorMatrix(as_array(operator).conj().T, hint)


def commutator(left: OperatorLike, right: OperatorLike) -> OperatorMatrix:
    """Return AB - BA."""
    a = as_array(left)
    b = as_array(right)
    _require_same_shape(a, b)
    return OperatorMatrix(a @ b - b @ a)


def hermitian_part(operator: OperatorLike) -> OperatorMatrix:
    a = as_array(operator)
    return OperatorMatrix(0.5 * (a + a.conj().T), hermitian_hint=True)


def spectral_decompose(operator: OperatorLike) -> SpectralDecomposition:
    """Diagonalize a Hermitian matrix with a dense solver.

    Args:
        operator: Hermitian matrix; asymmetry above 1e-10 x max|H| is rejected.

    Returns:
        SpectralDecomposition: eigenvalues ascending, eigenvectors as columns.

    Raises:
        HermiticityError: If the input is not Hermitian within tolerance.
        SpectralError: If the eigensolver fails or its output is inconsistent.
    """
    matrix = as_array(operator)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatchError(f"cannot diagonalize shape {matrix.shape}")
    scale = float(np.max(np.abs(matrix), initial=0.0))
    asymmetry = float(np.max(np.abs(matrix - matrix.conj().T), initial=0.0))
    if asymmetry > SPECTRAL_HERM_TOL * scale:
        raise HermiticityError(
            f"spectral decomposition needs a Hermitian matrix; measured asymmetry "
            f"{asymmetry:.3e} against scale {scale:.3e}"
        )
    try:
        eigenvalues, unitary = scipy.linalg.eigh(0.5 * (matrix + matrix.conj().T))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise SpectralError(f"eigensolver did not converge: {exc}") from exc

    dim = matrix.shape[0]
    orthonormality = float(
        np.max(np.abs(unitary.conj().T @ unitary - np.eye(dim)), initial=0.0)
    )
    if orthonormality > UNITARY_TOL:
        raise SpectralError(f"eigenvectors not orthonormal: {orthonormality:.3e}")
    reconstruction = float(
        np.max(
            np.abs((unitary * eigenvalues) @ unitary.conj().T - matrix), initial=0.0
        )
    )
    if reconstruction > RECONSTRUCTION_TOL * max(1.0, scale):
        raise SpectralError(f"reconstruction residual {reconstruction:.3e}")
    logger.debug(
        "Diagonalized dim=%d, range [%.6g, %.6g]",
        dim,
        eigenvalues[0] if dim else 0.0,
        eigenvalues[-1] if dim else 0.0,
    )
    return SpectralDecomposition(eigenvalues=np.asarray(eigenvalues), unitary=unitary)


def residual_norm(left: Any, right: Any) -> float:
    """Return the max-abs elementwise difference of two operators or profiles."""
    a = _residual_values(left)
    b = _residual_values(right)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shape mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def _residual_values(item: Any) -> np.ndarray:
    if isinstance(item, OperatorMatrix):
        return item.entries
    values = getattr(item, "values", None)
    if values is not None and not isinstance(item, np.ndarray):
        return np.asarray(values)
    return np.asarray(item)


def random_hermitian(dim: int, seed: int, scale: float = 1.0) -> OperatorMatrix:
    """Return a seeded Hermitian matrix with Gaussian entries."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return OperatorMatrix(0.5 * scale * (raw + raw.conj().T), hermitian_hint=True)

from __future__ import annotations

# Purpose: Expose operator algebra entry points for convenient imports.
# Date: 2026-10-05
# Related tests: tests/test_operators.py

"""Operator package exports."""

from .core import (
    HERM_TOL,
    DimensionMismatchError,
    HermiticityError,
    OperatorMatrix,
    SpectralDecomposition,
    SpectralError,
    adjoint,
    as_array,
    commutator,
    hermitian_part,
    identity,
    max_abs,
    random_hermitian,
    residual_norm,
    spectral_decompose,
)

__all__ = [
    "HERM_TOL",
    "DimensionMismatchError",
    "HermiticityError",
    "SpectralError",
    "OperatorMatrix",
    "SpectralDecomposition",
    "adjoint",
    "as_array",
    "commutator",
    "hermitian_part",
    "identity",
    "max_abs",
    "random_hermitian",
    "residual_norm",
    "spectral_decompose",
]

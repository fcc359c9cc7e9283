from __future__ import annotations

# Purpose: Resolve named observables used by scenario checks.
# Date: 2026-10-13
# Related tests: tests/test_runner.py

"""Named builtin observables."""

import logging
import re

import numpy as np

from operators import OperatorMatrix, hermitian_part, identity, random_hermitian
from systems import ManyBodySystem

__all__ = ["BUILTIN_OBSERVABLES", "is_known_observable", "resolve_observable"]

logger = logging.getLogger(__name__)

BUILTIN_OBSERVABLES = ("identity", "sum_x", "beta_H0", "N_hat", "H0", "gaussian_x")
RANDOM_PATTERN = re.compile(r"^random_hermitian\((\d+)\)$")


def is_known_observable(name: str) -> bool:
    return name in BUILTIN_OBSERVABLES or RANDOM_PATTERN.match(name) is not None


def resolve_observable(name: str, sys: ManyBodySystem, beta: float | None = None) -> OperatorMatrix:
    """Build a named observable on ``sys``.

    ``gaussian_x`` is sum_i exp(-x_i^2 / (2 l^2)) with l the oscillator
    length (or a tenth of the box for grids).  ``random_hermitian(seed)`` is
    scaled by 1/sqrt(dim).

    Raises:
        ValueError: For unknown names, or ``beta_H0`` without beta.
    """
    if name == "identity":
        return identity(sys.dim)
    if name == "sum_x":
        return sys.position_sum
    if name == "N_hat":
        return sys.number_operator
    if name == "H0":
        return hermitian_part(sys.hamiltonian)
    if name == "beta_H0":
        if beta is None:
            raise ValueError("beta_H0 needs an inverse temperature")
        return hermitian_part(sys.hamiltonian) * beta
    if name == "gaussian_x":
        spec = sys.spec
        length = spec.oscillator_length if spec.kind == "oscillator" else 0.1 * spec.box_length
        bump = sys.single.function_of_position(lambda x: np.exp(-0.5 * (x / length) ** 2))
        return OperatorMatrix(sys.lift(bump.entries).entries, hermitian_hint=True)
    match = RANDOM_PATTERN.match(name)
    if match is not None:
        seed = int(match.group(1))
        return random_hermitian(sys.dim, seed, scale=1.0 / np.sqrt(sys.dim))
    raise ValueError(f"unknown observable {name!r}")

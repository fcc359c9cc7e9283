from __future__ import annotations

# Purpose: Shift fields epsilon(x) with analytic gradients and their Lie bracket.
# Date: 2026-10-07
# Related tests: tests/test_gauge.py

"""Shift-field helpers."""

import logging
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "ShiftFieldError",
    "ShiftField",
    "constant_field",
    "power_field",
    "sine_field",
    "cosine_field",
    "gaussian_field",
    "lie_bracket_field",
]

logger = logging.getLogger(__name__)

GRAD_CHECK_RTOL = 1e-6
GRAD_CHECK_STEP = 1e-4
BRACKET_FD_STEP = 1e-5

FieldFunction = Callable[[np.ndarray], np.ndarray]


class ShiftFieldError(ValueError):
    """Raised when a shift field is non-finite or its gradient is inconsistent."""


@dataclass(frozen=True)
class ShiftField:
    """Scalar (one-dimensional vector) field epsilon with its derivative."""

    eval: FieldFunction
    grad: FieldFunction
    label: str = ""

    def __call__(self, x: np.ndarray | float) -> np.ndarray:
        return np.asarray(self.eval(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, x: np.ndarray | float) -> np.ndarray:
        return np.asarray(self.grad(np.asarray(x, dtype=float)), dtype=float)

    def validate(
        self,
        samples: Sequence[float] | None = None,
        *,
        length: float = 1.0,
        rel_tol: float = GRAD_CHECK_RTOL,
    ) -> "ShiftField":
        """Compare grad against a central finite difference of eval.

        Args:
            samples: Check positions; five points over [-2, 2] * length by default.
            length: Scale used for the default samples and the difference step.
            rel_tol: Allowed mismatch relative to max(1, |grad|).

        Raises:
            ShiftFieldError: If eval or grad are not finite or disagree.
        """
        xs = np.asarray(
            samples if samples is not None else np.linspace(-2.0, 2.0, 5) * length, dtype=float
        )
        values = self(xs)
        analytic = self.derivative(xs)
        if not (np.all(np.isfinite(values)) and np.all(np.isfinite(analytic))):
            raise ShiftFieldError(f"shift field {self.label!r} is not finite at the samples")
        step = GRAD_CHECK_STEP * length
        numeric = (self(xs + step) - self(xs - step)) / (2.0 * step)
        mismatch = np.abs(numeric - analytic) / np.maximum(1.0, np.abs(analytic))
        worst = float(np.max(mismatch))
        if worst > rel_tol:
            raise ShiftFieldError(
                f"gradient of shift field {self.label!r} disagrees with finite difference "
                f"(relative mismatch {worst:.3e} at x={xs[int(np.argmax(mismatch))]:.4g})"
            )
        return self


def constant_field(value: float) -> ShiftField:
    return ShiftField(
        eval=lambda x: np.full_like(np.asarray(x, dtype=float), value),
        grad=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        label=f"const({value:g})",
    )


def power_field(power: int, scale: float = 1.0) -> ShiftField:
    """epsilon(x) = scale * x**power."""
    if power == 0:
        return constant_field(scale)
    return ShiftField(
        eval=lambda x: scale * np.asarray(x, dtype=float) ** power,
        grad=lambda x: scale * power * np.asarray(x, dtype=float) ** (power - 1),
        label=f"{scale:g}*x^{power}",
    )


def sine_field(wavenumber: float = 1.0) -> ShiftField:
    return ShiftField(
        eval=lambda x: np.sin(wavenumber * np.asarray(x, dtype=float)),
        grad=lambda x: wavenumber * np.cos(wavenumber * np.asarray(x, dtype=float)),
        label=f"sin({wavenumber:g}x)",
    )


def cosine_field(wavenumber: float = 1.0) -> ShiftField:
    return ShiftField(
        eval=lambda x: np.cos(wavenumber * np.asarray(x, dtype=float)),
        grad=lambda x: -wavenumber * np.sin(wavenumber * np.asarray(x, dtype=float)),
        label=f"cos({wavenumber:g}x)",
    )


def gaussian_field(center: float, width: float, *, normalized: bool = True) -> ShiftField:
    """Gaussian bump; with ``normalized`` it integrates to one (a smeared delta)."""
    if width <= 0.0:
        raise ShiftFieldError(f"gaussian field width must be positive, got {width}")
    amplitude = 1.0 / (np.sqrt(2.0 * np.pi) * width) if normalized else 1.0

    def bump(x: np.ndarray) -> np.ndarray:
        return amplitude * np.exp(-((np.asarray(x, dtype=float) - center) ** 2) / (2.0 * width**2))

    def slope(x: np.ndarray) -> np.ndarray:
        offset = np.asarray(x, dtype=float) - center
        return -offset / width**2 * bump(x)

    return ShiftField(eval=bump, grad=slope, label=f"gauss({center:g},{width:g})")


def lie_bracket_field(
    first: ShiftField, second: ShiftField, *, length: float = 1.0
) -> ShiftField:
    """Return eps_D = eps1 * eps2' - eps2 * eps1'.

    The bracket's own gradient is a central difference of its values with
    step 1e-5 * length.
    """

    def bracket(x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        return first(xs) * second.derivative(xs) - second(xs) * first.derivative(xs)

    step = BRACKET_FD_STEP * length

    def bracket_grad(x: np.ndarray) -> np.ndarray:
        xs = np.asarray(x, dtype=float)
        return (bracket(xs + step) - bracket(xs - step)) / (2.0 * step)

    return ShiftField(eval=bracket, grad=bracket_grad, label=f"[{first.label},{second.label}]")

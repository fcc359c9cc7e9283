from __future__ import annotations

# Purpose: Position-resolved value containers shared by reports and figures.
# Date: 2026-10-05
# Related tests: tests/test_systems.py

"""Profile container for quantities sampled on the evaluation points."""

from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
import pandas as pd

__all__ = ["Profile"]


@dataclass(frozen=True, eq=False)
class Profile:
    """Ordered positions with one complex value (or fixed-length tuple) per point."""

    points: np.ndarray
    values: np.ndarray
    label: str = ""

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=float, copy=True)
        values = np.array(self.values, copy=True)
        if points.ndim != 1:
            raise ValueError(f"profile points must be one-dimensional, got {points.shape}")
        if values.shape[:1] != points.shape:
            raise ValueError(
                f"profile {self.label!r} has {values.shape[0] if values.ndim else 0} "
                f"values for {points.shape[0]} points"
            )
        if points.size > 1 and np.any(np.diff(points) <= 0.0):
            raise ValueError(f"profile {self.label!r} points must be strictly increasing")
        points.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)

    def __len__(self) -> int:
        return int(self.points.shape[0])

    @property
    def real(self) -> "Profile":
        return Profile(self.points, np.real(self.values), self.label)

    def integrate(self, weight: float | None = None) -> Any:
        """Riemann sum with uniform spacing (the spacing of the points by default)."""
        if len(self) == 0:
            return 0.0
        if weight is None:
            weight = float(self.points[1] - self.points[0]) if len(self) > 1 else 1.0
        return weight * np.sum(self.values, axis=0)

    def to_frame(self, value_columns: Sequence[str] | None = None) -> pd.DataFrame:
        values = self.values.reshape(len(self), -1)
        columns = list(value_columns or [f"value_{i}" for i in range(values.shape[1])])
        frame = pd.DataFrame(values, columns=columns)
        frame.insert(0, "r", self.points)
        return frame

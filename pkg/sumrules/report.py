from __future__ import annotations

# Purpose: Residual report shared by every sum-rule check.
# Date: 2026-10-09
# Related tests: tests/test_sumrules.py

"""Sum-rule report container."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Mapping

import numpy as np
import pandas as pd

from gauge import DEFAULT_FLOOR, decays_under_doubling
from systems import Profile

__all__ = ["RuleClass", "SumRuleReport", "build_report", "relative_residual"]


class RuleClass(str, Enum):
    EXACT = "exact"
    CONVERGENCE = "convergence"


@dataclass(frozen=True, eq=False)
class SumRuleReport:
    """Per-point residual table of one sum rule.

    ``frame`` holds one row per evaluation item with at least the columns
    ``r``, ``residual`` (relative), ``absolute`` and ``scale``; term values
    and diagnostics are extra columns.
    """

    rule_id: str
    rule_class: RuleClass
    frame: pd.DataFrame
    tolerance: float
    details: Mapping[str, Any] = field(default_factory=dict)
    requirements: Mapping[str, bool] = field(default_factory=dict)

    @property
    def max_residual(self) -> float:
        if self.frame.empty:
            return 0.0
        return float(self.frame["residual"].max())

    @property
    def passed(self) -> bool:
        """Exact rules: worst residual within tolerance.

        Convergence rules: rows are ordered coarse to fine and each must shrink
        by the tolerance factor unless it already sits below ``details["floor"]``.
        Any named ``requirements`` must hold as well.
        """
        if not all(self.requirements.values()):
            return False
        if self.rule_class is RuleClass.CONVERGENCE:
            floor = float(self.details.get("floor", DEFAULT_FLOOR))
            return decays_under_doubling(list(self.frame["residual"]), self.tolerance, floor)
        return bool(self.max_residual <= self.tolerance)

    @property
    def residuals(self) -> Profile:
        """Worst residual per position."""
        worst = self.frame.groupby("r", sort=True)["residual"].max()
        return Profile(worst.index.to_numpy(dtype=float), worst.to_numpy(), label=self.rule_id)

    def term(self, column: str) -> Profile:
        """Profile of one term column (single-position reports only)."""
        ordered = self.frame.sort_values("r")
        return Profile(ordered["r"].to_numpy(dtype=float), ordered[column].to_numpy(), label=column)

    def summary(self) -> dict[str, Any]:
        return {
            "rule": self.rule_id,
            "class": self.rule_class.value,
            "max_residual": self.max_residual,
            "tolerance": self.tolerance,
            "pass": self.passed,
            "rows": int(len(self.frame)),
            **{key: value for key, value in self.details.items()},
            **({"requirements": dict(self.requirements)} if self.requirements else {}),
        }


def relative_residual(absolute: float, scale: float) -> float:
    return float(absolute) / max(float(scale), np.finfo(float).tiny)


def build_report(
    rule_id: str,
    rows: Iterable[Mapping[str, Any]],
    tolerance: float,
    rule_class: RuleClass = RuleClass.EXACT,
    details: Mapping[str, Any] | None = None,
    requirements: Mapping[str, bool] | None = None,
) -> SumRuleReport:
    frame = pd.DataFrame(list(rows))
    if frame.empty:
        frame = pd.DataFrame(columns=["r", "residual", "absolute", "scale"])
    return SumRuleReport(
        rule_id=rule_id,
        rule_class=rule_class,
        frame=frame,
        tolerance=float(tolerance),
        details=dict(details or {}),
        requirements={name: bool(ok) for name, ok in (requirements or {}).items()},
    )

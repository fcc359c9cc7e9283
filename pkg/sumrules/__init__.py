from __future__ import annotations

# Purpose: Expose sum-rule checks and the report type.
# Date: 2026-10-09
# Related tests: tests/test_sumrules.py

"""Sum-rule package exports."""

from .convergence import (
    canonical_shift_residual,
    density_hyperforce_residual,
    doubling_study,
    external_force_residual,
    nearest_point,
)
from .equilibrium import (
    FORCE_BALANCE_TOL,
    SUM_RULE_TOL,
    THREE_G_STRIDE,
    check_3g,
    check_force_balance,
    check_hyperforce,
    check_product_rule,
    evaluation_points,
    require_hermitian,
)
from .report import RuleClass, SumRuleReport, build_report, relative_residual

__all__ = [
    "canonical_shift_residual",
    "density_hyperforce_residual",
    "doubling_study",
    "external_force_residual",
    "nearest_point",
    "FORCE_BALANCE_TOL",
    "SUM_RULE_TOL",
    "THREE_G_STRIDE",
    "check_3g",
    "check_force_balance",
    "check_hyperforce",
    "check_product_rule",
    "evaluation_points",
    "require_hermitian",
    "RuleClass",
    "SumRuleReport",
    "build_report",
    "relative_residual",
]

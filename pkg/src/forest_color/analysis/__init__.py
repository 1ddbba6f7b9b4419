"""Runtime analysis: work factors, per-vertex rates and the partition LP."""

from forest_color.analysis.lp import (
    AnalysisReport,
    LinearConstraint,
    LpModel,
    build_lp,
    reference_point,
    solve_lp,
)
from forest_color.analysis.simplex import LpInfeasibleError, LpUnboundedError
from forest_color.analysis.work_factor import (
    CHROMATIC_BASE,
    CSP_BASE,
    BranchVector,
    RateTerm,
    parse_rate_terms,
    per_root_base,
    rate,
    schedule_rate,
    work_factor,
)

__all__ = [
    "AnalysisReport",
    "BranchVector",
    "CHROMATIC_BASE",
    "CSP_BASE",
    "LinearConstraint",
    "LpInfeasibleError",
    "LpModel",
    "LpUnboundedError",
    "RateTerm",
    "build_lp",
    "parse_rate_terms",
    "per_root_base",
    "rate",
    "reference_point",
    "schedule_rate",
    "solve_lp",
    "work_factor",
]

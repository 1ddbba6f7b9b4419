"""Solver pipeline, reference oracle and search statistics."""

from forest_color.solver.oracle import (
    DEFAULT_ORACLE_CAP,
    ColoringViolation,
    OracleCapExceededError,
    brute_force,
    verify_coloring,
)
from forest_color.solver.pipeline import Colorable, NotColorable, SolveResult, solve_3coloring
from forest_color.solver.stats import (
    NullStatsSink,
    SearchStats,
    StatsCollector,
    StatsSink,
    TeeSink,
)

__all__ = [
    "Colorable",
    "ColoringViolation",
    "DEFAULT_ORACLE_CAP",
    "NotColorable",
    "NullStatsSink",
    "OracleCapExceededError",
    "SearchStats",
    "SolveResult",
    "StatsCollector",
    "StatsSink",
    "TeeSink",
    "brute_force",
    "solve_3coloring",
    "verify_coloring",
]

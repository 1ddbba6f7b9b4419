"""forest-color: exact graph 3-coloring by forest-guided branch and reduce."""

from forest_color.base import COLORS, Color, SolverConfig, VertexId
from forest_color.bushy import (
    BushyForest,
    BushyTree,
    Partition,
    PartitionConstraintError,
    PartitionCounts,
    build_maximal_bushy_forest,
    partition,
    to_low_magnitude,
)
from forest_color.chromatic import ChromaticForest, ChromaticTree, build_chromatic_forest
from forest_color.csp import CspInstance, CspSolution
from forest_color.graph import Contradiction, Graph, GraphInvariantError, MergeRecord
from forest_color.reduce import Instance, TraceReplayError, replay
from forest_color.solver import (
    Colorable,
    NotColorable,
    SearchStats,
    SolveResult,
    brute_force,
    solve_3coloring,
    verify_coloring,
)

__all__ = [
    # Core types
    "COLORS",
    "Color",
    "Contradiction",
    "Graph",
    "GraphInvariantError",
    "MergeRecord",
    "SolverConfig",
    "VertexId",
    # Reduction and CSP
    "CspInstance",
    "CspSolution",
    "Instance",
    "TraceReplayError",
    "replay",
    # Forests
    "BushyForest",
    "BushyTree",
    "ChromaticForest",
    "ChromaticTree",
    "Partition",
    "PartitionConstraintError",
    "PartitionCounts",
    "build_chromatic_forest",
    "build_maximal_bushy_forest",
    "partition",
    "to_low_magnitude",
    # Solving
    "Colorable",
    "NotColorable",
    "SearchStats",
    "SolveResult",
    "brute_force",
    "solve_3coloring",
    "verify_coloring",
]

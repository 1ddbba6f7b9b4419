"""Shared types and configuration for the 3-coloring solver.

The color type, the solver configuration object and a few aliases used
across the reduction, forest and CSP layers.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from typing import Mapping

VertexId = int
"""Opaque vertex identifier. Ids are never reused within one solve."""

# Vertex ids of an input graph are its 1-based file labels shifted down by one.
LABEL_BASE = 1


def vertex_of(label: int) -> VertexId:
    """Vertex id of a 1-based DIMACS or coloring-file label."""
    return label - LABEL_BASE


def label_of(v: VertexId) -> int:
    """1-based file label of an input vertex."""
    return v + LABEL_BASE


class Color(IntEnum):
    """One of the three colors. The integer value is what output files carry."""

    RED = 0
    GREEN = 1
    BLUE = 2


COLORS: tuple[Color, ...] = (Color.RED, Color.GREEN, Color.BLUE)

# Partial or total map from vertex to color.
Coloring = Mapping[VertexId, Color]


def free_colors(taken: set[Color] | frozenset[Color]) -> list[Color]:
    """Colors not in ``taken``, in ascending order."""
    return [c for c in COLORS if c not in taken]


@dataclass
class SolverConfig:
    """Configuration for solver runs."""

    # Largest vertex count the brute-force oracle accepts
    oracle_cap: int = 20

    # Keep enumerating after the first solution (node-count experiments)
    exhaustive: bool = False

    # Worker threads for the internal-assignment cross product (1 = fully deterministic)
    jobs: int = 1

    # Residual components at or below this size skip forest construction
    tiny_residual_cap: int = 2

    # Raise on partition constraint violations instead of logging a warning
    strict_partition: bool = False

    # Remove vertices whose neighborhood is covered by a non-adjacent vertex
    dominated_elimination: bool = False

    def __post_init__(self) -> None:
        if self.jobs < 1:
            raise ValueError(f"jobs must be at least 1, got {self.jobs}")
        if self.oracle_cap < 0:
            raise ValueError(f"oracle_cap must be non-negative, got {self.oracle_cap}")

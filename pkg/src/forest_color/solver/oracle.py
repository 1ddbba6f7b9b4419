"""Reference answers: exhaustive backtracking and a coloring checker."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import structlog

from forest_color.base import COLORS, Color, VertexId
from forest_color.graph import Graph

logger = structlog.get_logger(__name__)

DEFAULT_ORACLE_CAP = 20


class OracleCapExceededError(ValueError):
    """The graph is too large for exhaustive search."""


@dataclass(frozen=True)
class ColoringViolation:
    """Why a coloring is not proper. ``edge`` is set for a monochromatic edge."""

    reason: str
    edge: tuple[VertexId, VertexId] | None = None
    vertex: VertexId | None = None

    def __str__(self) -> str:
        return self.reason


def verify_coloring(
    g: Graph, coloring: Mapping[VertexId, Color | int]
) -> ColoringViolation | None:
    """Return ``None`` for a proper total coloring, otherwise the first violation."""
    for v in sorted(g.vertices):
        c = coloring.get(v)
        if c is None:
            return ColoringViolation(reason=f"vertex {v} is uncolored", vertex=v)
        if c not in COLORS:
            return ColoringViolation(reason=f"vertex {v} has invalid color {c!r}", vertex=v)
    for u, v in g.edges():
        if coloring[u] == coloring[v]:
            return ColoringViolation(reason=f"edge {u}-{v} is monochromatic", edge=(u, v))
    return None


def brute_force(g: Graph, *, cap: int = DEFAULT_ORACLE_CAP) -> dict[VertexId, Color] | None:
    """Exact 3-coloring by backtracking; ``None`` when the graph is not 3-colorable.

    Vertices are tried in decreasing degree order. The first vertex of each
    component is pinned to one color, since colors are interchangeable.

    Raises:
        OracleCapExceededError: if ``g`` has more than ``cap`` vertices.
    """
    if g.n > cap:
        raise OracleCapExceededError(f"graph has {g.n} vertices, oracle cap is {cap}")
    out: dict[VertexId, Color] = {}
    for comp in g.components():
        order = sorted(comp, key=lambda v: (-g.degree(v), v))
        found = _backtrack(g, order)
        if found is None:
            return None
        out.update(found)
    return out


def _backtrack(g: Graph, order: list[VertexId]) -> dict[VertexId, Color] | None:
    coloring: dict[VertexId, Color] = {}

    def place(i: int) -> bool:
        if i == len(order):
            return True
        v = order[i]
        choices = (COLORS[0],) if i == 0 else COLORS
        taken = {coloring[w] for w in g.neighbors(v) if w in coloring}
        for c in choices:
            if c in taken:
                continue
            coloring[v] = c
            if place(i + 1):
                return True
            del coloring[v]
        return False

    return dict(coloring) if place(0) else None

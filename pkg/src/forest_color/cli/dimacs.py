"""DIMACS ``.col`` reading and writing.

Labels in the file are 1-based; ``base.vertex_of`` and ``base.label_of`` map them
to vertex ids and back.
"""

from __future__ import annotations

from dataclasses import dataclass

import structlog

from forest_color.base import LABEL_BASE, label_of, vertex_of
from forest_color.graph import Graph

logger = structlog.get_logger(__name__)


class DimacsParseError(ValueError):
    """Malformed DIMACS input. ``line`` is 1-based."""

    def __init__(self, line: int, reason: str) -> None:
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


@dataclass(frozen=True)
class DimacsGraph:
    n: int
    m: int
    edges: tuple[tuple[int, int], ...]

    def to_graph(self) -> Graph:
        return Graph.from_edges(
            ((vertex_of(u), vertex_of(v)) for u, v in self.edges),
            vertices=(vertex_of(label) for label in range(LABEL_BASE, self.n + LABEL_BASE)),
        )


def _int(token: str, line: int, what: str) -> int:
    try:
        value = int(token)
    except ValueError:
        raise DimacsParseError(line, f"{what} {token!r} is not an integer") from None
    if value < 0:
        raise DimacsParseError(line, f"{what} must be non-negative, got {value}")
    return value


def read_dimacs(text: str) -> DimacsGraph:
    """Parse DIMACS text, keeping the declared header and the deduplicated edges."""
    n: int | None = None
    m = 0
    seen: set[tuple[int, int]] = set()
    edges: list[tuple[int, int]] = []
    lines = text.splitlines()
    for number, raw in enumerate(lines, start=1):
        tokens = raw.split()
        if not tokens or tokens[0] == "c":
            continue
        kind = tokens[0]
        if kind == "p":
            if n is not None:
                raise DimacsParseError(number, "duplicate problem line")
            if len(tokens) != 4 or tokens[1] not in ("edge", "col"):
                raise DimacsParseError(number, "expected 'p edge <n> <m>'")
            n = _int(tokens[2], number, "vertex count")
            m = _int(tokens[3], number, "edge count")
        elif kind == "e":
            if n is None:
                raise DimacsParseError(number, "edge before the problem line")
            if len(tokens) != 3:
                raise DimacsParseError(number, "expected 'e <u> <v>'")
            u = _int(tokens[1], number, "vertex label")
            v = _int(tokens[2], number, "vertex label")
            last = n + LABEL_BASE - 1
            for label in (u, v):
                if not LABEL_BASE <= label <= last:
                    raise DimacsParseError(
                        number, f"vertex label {label} outside {LABEL_BASE}..{last}"
                    )
            if u == v:
                raise DimacsParseError(number, f"self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                edges.append(key)
        else:
            raise DimacsParseError(number, f"unrecognized line type {kind!r}")
    if n is None:
        raise DimacsParseError(len(lines), "missing 'p edge <n> <m>' line")
    if m != len(edges):
        logger.warning("DIMACS edge count mismatch", declared=m, distinct=len(edges))
    return DimacsGraph(n=n, m=m, edges=tuple(edges))


def parse_dimacs(text: str) -> Graph:
    """DIMACS text to a graph over ids ``0..n-1``.

    Raises:
        DimacsParseError: with the offending line number.
    """
    return read_dimacs(text).to_graph()


def write_dimacs(g: Graph, *, comment: str | None = None) -> str:
    """Serialize ``g``; vertices are relabelled ``1..n`` in ascending id order."""
    label = {v: label_of(i) for i, v in enumerate(sorted(g.vertices))}
    lines = [f"c {part}" for part in (comment or "").splitlines()]
    lines.append(f"p edge {g.n} {g.m}")
    lines.extend(f"e {label[u]} {label[v]}" for u, v in g.edges())
    return "\n".join(lines) + "\n"

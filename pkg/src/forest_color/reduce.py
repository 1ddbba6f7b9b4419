"""Polynomial preprocessing and degree-three branching.

Every reduction appends a ``TraceStep`` to the instance so a coloring of the
residual graph can be pushed back through merges and removals to a coloring
of the input graph (see ``replay``).
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, Union

import structlog

from forest_color.base import Color, VertexId, free_colors
from forest_color.graph import Contradiction, Graph, MergeRecord

logger = structlog.get_logger(__name__)

LOW_DEGREE = 2
BRANCH_COMPONENT_SIZE = 9


class TraceReplayError(RuntimeError):
    """Replay found no legal color for a vertex. The trace is corrupt."""


@dataclass(frozen=True)
class RemovedLowDegree:
    vertex: VertexId
    neighbors: frozenset[VertexId]


@dataclass(frozen=True)
class Merged:
    record: MergeRecord


@dataclass(frozen=True)
class RemovedDominated:
    vertex: VertexId
    dominator: VertexId
    neighbors: frozenset[VertexId]
    reason: str


TraceStep = Union[RemovedLowDegree, Merged, RemovedDominated]


@dataclass(frozen=True)
class Instance:
    """A graph, the reductions that produced it, and any pre-colored vertices."""

    graph: Graph
    trace: tuple[TraceStep, ...] = ()
    fixed: Mapping[VertexId, Color] = field(default_factory=dict)

    @classmethod
    def from_graph(cls, graph: Graph) -> Instance:
        return cls(graph=graph)

    def with_fixed(self, colors: Mapping[VertexId, Color]) -> Instance:
        """Return a copy with ``colors`` added to the fixed map.

        Raises:
            ValueError: if a colored vertex is unknown or two adjacent vertices share a color.
        """
        fixed = {**self.fixed, **colors}
        for v, c in fixed.items():
            if v not in self.graph:
                raise ValueError(f"fixed vertex {v} is not in the graph")
            for w in self.graph.neighbors(v):
                if fixed.get(w) == c:
                    raise ValueError(f"fixed colors conflict on edge {v}-{w}")
        return Instance(graph=self.graph, trace=self.trace, fixed=fixed)


# ---------------------------------------------------------------------------
# Low-degree and dominated-vertex elimination
# ---------------------------------------------------------------------------


def eliminate_low_degree(inst: Instance) -> Instance:
    """Remove uncolored vertices of degree at most two until none remain.

    A removed vertex has at most two neighbors, so replay can always find a
    free color for it. Fixed vertices are never removed: their color still
    constrains the neighbors left behind.
    """
    g = inst.graph
    degree = {v: g.degree(v) for v in g.vertices}
    heap = [v for v, d in degree.items() if d <= LOW_DEGREE and v not in inst.fixed]
    heapq.heapify(heap)
    removed: set[VertexId] = set()
    steps: list[TraceStep] = []
    while heap:
        v = heapq.heappop(heap)
        if v in removed or degree[v] > LOW_DEGREE:
            continue
        live = g.neighbors(v) - removed
        steps.append(RemovedLowDegree(vertex=v, neighbors=frozenset(live)))
        removed.add(v)
        for w in live:
            degree[w] -= 1
            if degree[w] <= LOW_DEGREE and w not in inst.fixed:
                heapq.heappush(heap, w)
    if not steps:
        return inst
    logger.debug("Low-degree vertices removed", count=len(steps), remaining=g.n - len(removed))
    return Instance(
        graph=g.remove_vertices(removed), trace=inst.trace + tuple(steps), fixed=inst.fixed
    )


def eliminate_dominated(inst: Instance) -> Instance:
    """Remove vertices whose neighborhood lies inside a non-adjacent vertex's neighborhood.

    The dominated vertex can always copy its dominator's color afterwards.
    """
    g = inst.graph
    steps: list[TraceStep] = []
    changed = True
    while changed:
        changed = False
        for v in sorted(g.vertices):
            if v in inst.fixed:
                continue
            nbrs = g.neighbors(v)
            if not nbrs:
                continue
            candidates = set.intersection(*(set(g.neighbors(w)) for w in nbrs)) - {v}
            if not candidates:
                continue
            u = min(candidates)
            steps.append(
                RemovedDominated(
                    vertex=v,
                    dominator=u,
                    neighbors=nbrs,
                    reason=f"neighborhood covered by {u}",
                )
            )
            g = g.remove_vertex(v)
            changed = True
            break
    if not steps:
        return inst
    logger.debug("Dominated vertices removed", count=len(steps))
    return Instance(graph=g, trace=inst.trace + tuple(steps), fixed=inst.fixed)


def simplify(inst: Instance, *, dominated: bool = False) -> Instance:
    """Run the polynomial reductions to a joint fixpoint."""
    inst = eliminate_low_degree(inst)
    if not dominated:
        return inst
    while True:
        before = inst.graph.n
        inst = eliminate_low_degree(eliminate_dominated(inst))
        if inst.graph.n == before:
            return inst


# ---------------------------------------------------------------------------
# Degree-three components
# ---------------------------------------------------------------------------


def degree3_components(g: Graph) -> list[frozenset[VertexId]]:
    return g.components_where(lambda v: g.degree(v) == 3)


def _cycle_in(g: Graph, comp: frozenset[VertexId]) -> list[VertexId]:
    """Vertices of one cycle inside ``comp`` (empty if the component is a tree)."""
    parent: dict[VertexId, VertexId | None] = {}
    on_stack: set[VertexId] = set()
    for root in sorted(comp):
        if root in parent:
            continue
        parent[root] = None
        on_stack.add(root)
        stack = [(root, iter(sorted(g.neighbors(root) & comp)))]
        while stack:
            x, it = stack[-1]
            advanced = False
            for y in it:
                if y == parent[x]:
                    continue
                if y in on_stack:
                    cycle = [x]
                    while cycle[-1] != y:
                        up = parent[cycle[-1]]
                        assert up is not None
                        cycle.append(up)
                    return cycle
                if y not in parent:
                    parent[y] = x
                    on_stack.add(y)
                    stack.append((y, iter(sorted(g.neighbors(y) & comp))))
                    advanced = True
                    break
            if not advanced:
                stack.pop()
                on_stack.discard(x)
    return []


def _path_median(g: Graph, comp: frozenset[VertexId]) -> VertexId:
    ends = sorted(v for v in comp if len(g.neighbors(v) & comp) <= 1)
    order = [ends[0]]
    prev: VertexId | None = None
    while True:
        nxt = [w for w in g.neighbors(order[-1]) & comp if w != prev]
        if not nxt:
            break
        prev = order[-1]
        order.append(nxt[0])
    k = len(order)
    if k % 2:
        return order[k // 2]
    return min(order[k // 2 - 1], order[k // 2])


def find_branch_target(inst: Instance) -> VertexId | None:
    """Pick a vertex to branch on, or ``None`` when the residual is ready for forests.

    Targets lie on a cycle of degree-3 vertices, or in a degree-3 component of
    nine or more vertices. In the latter case a vertex with three neighbors
    inside the component is preferred, otherwise the middle of the path.
    """
    g = inst.graph
    for comp in degree3_components(g):
        cycle = _cycle_in(g, comp)
        if cycle:
            return min(cycle)
        if len(comp) >= BRANCH_COMPONENT_SIZE:
            hubs = [v for v in comp if len(g.neighbors(v) & comp) == 3]
            if hubs:
                return min(hubs)
            return _path_median(g, comp)
    return None


def degree3_component_violations(g: Graph) -> list[tuple[frozenset[VertexId], str]]:
    """Degree-3 components that still need branching (empty after the reduce fixpoint)."""
    out: list[tuple[frozenset[VertexId], str]] = []
    for comp in degree3_components(g):
        if _cycle_in(g, comp):
            out.append((comp, "cycle"))
        elif len(comp) >= BRANCH_COMPONENT_SIZE:
            out.append((comp, "oversized"))
    return out


# ---------------------------------------------------------------------------
# Branching
# ---------------------------------------------------------------------------


def branch_on(inst: Instance, v: VertexId, *, dominated: bool = False) -> list[Instance]:
    """Branch on which two neighbors of ``v`` share a color.

    Three neighbors and three colors: some pair must match. Each child merges
    one pair, drops ``v`` (now of degree two) and cascades the low-degree rule.
    Pairs that are adjacent produce no child.
    """
    g = inst.graph
    if g.degree(v) != 3:
        raise ValueError(f"branch vertex {v} has degree {g.degree(v)}, expected 3")
    if inst.fixed:
        raise ValueError("branching applies to instances without fixed colors")
    a, b, c = sorted(g.neighbors(v))
    children: list[Instance] = []
    for x, y in ((a, b), (a, c), (b, c)):
        merged = g.merge_vertices(x, y)
        if isinstance(merged, Contradiction):
            continue
        g2, record = merged
        drop = RemovedLowDegree(vertex=v, neighbors=g2.neighbors(v))
        child = Instance(graph=g2.remove_vertex(v), trace=inst.trace + (Merged(record), drop))
        children.append(simplify(child, dominated=dominated))
    return children


def reduce_exhaustively(
    inst: Instance,
    *,
    dominated: bool = False,
    on_branch: Callable[[VertexId, int], None] | None = None,
) -> Iterator[Instance]:
    """Yield, depth first, every residual instance left once no branch target remains.

    The parent graph is 3-colorable iff some yielded residual is. Consumers may
    stop iterating early; nothing past the current branch is computed.
    """
    stack = [simplify(inst, dominated=dominated)]
    while stack:
        current = stack.pop()
        target = find_branch_target(current)
        if target is None:
            yield current
            continue
        children = branch_on(current, target, dominated=dominated)
        if on_branch is not None:
            on_branch(target, len(children))
        stack.extend(reversed(children))


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def replay(
    trace: tuple[TraceStep, ...] | list[TraceStep], coloring: Mapping[VertexId, Color]
) -> dict[VertexId, Color]:
    """Extend a proper coloring of the residual graph to the original graph."""
    out: dict[VertexId, Color] = dict(coloring)
    for step in reversed(trace):
        try:
            if isinstance(step, Merged):
                out[step.record.absorbed] = out[step.record.survivor]
            elif isinstance(step, RemovedLowDegree):
                free = free_colors({out[w] for w in step.neighbors})
                if not free:
                    raise TraceReplayError(f"no free color for removed vertex {step.vertex}")
                out[step.vertex] = free[0]
            else:
                color = out[step.dominator]
                if any(out[w] == color for w in step.neighbors):
                    raise TraceReplayError(
                        f"dominator {step.dominator} color clashes around {step.vertex}"
                    )
                out[step.vertex] = color
        except KeyError as exc:
            raise TraceReplayError(f"trace step {step} needs uncolored vertex {exc}") from None
    return out

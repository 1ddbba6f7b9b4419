"""End-to-end 3-coloring: reduce, build forests, enumerate, solve the CSP, replay.

Each connected component is solved on its own. Within a component every
branch-free residual of the reduce phase gets a bushy forest and a chromatic
forest; the search then fixes colors on

1. bushy roots (three colors each),
2. the other internal bushy vertices in breadth-first order (the two colors
   their parent leaves free),
3. each chromatic tree according to its schedule,

and hands the rest to the CSP backend. The first satisfiable leaf wins unless
``SolverConfig.exhaustive`` asks for the whole search.
"""

from __future__ import annotations

import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Protocol, Union

import structlog

from forest_color import csp
from forest_color.base import COLORS, Color, SolverConfig, VertexId
from forest_color.bushy import (
    BushyForest,
    build_maximal_bushy_forest,
    partition,
    to_low_magnitude,
)
from forest_color.chromatic import TrivialConfiguration, build_chromatic_forest, schedule
from forest_color.graph import Graph
from forest_color.reduce import Instance, reduce_exhaustively, replay
from forest_color.solver.oracle import verify_coloring
from forest_color.solver.stats import SearchStats, StatsCollector, StatsSink, TeeSink

logger = structlog.get_logger(__name__)

# Prefixes handed out per worker thread when ``jobs > 1``
_PREFIXES_PER_JOB = 4


@dataclass(frozen=True)
class Colorable:
    coloring: Mapping[VertexId, Color]


@dataclass(frozen=True)
class NotColorable:
    pass


Status = Union[Colorable, NotColorable]


@dataclass(frozen=True)
class SolveResult:
    status: Status
    stats: SearchStats

    @property
    def colorable(self) -> bool:
        return isinstance(self.status, Colorable)

    @property
    def coloring(self) -> Mapping[VertexId, Color] | None:
        return self.status.coloring if isinstance(self.status, Colorable) else None


# ---------------------------------------------------------------------------
# Enumeration plan
# ---------------------------------------------------------------------------


class _Slot(Protocol):
    def options(self, fixed: Mapping[VertexId, Color]) -> list[dict[VertexId, Color]]: ...


@dataclass(frozen=True)
class _VertexSlot:
    """One bushy vertex; non-root vertices avoid their parent's color."""

    vertex: VertexId
    parent: VertexId | None = None

    def options(self, fixed: Mapping[VertexId, Color]) -> list[dict[VertexId, Color]]:
        banned = fixed.get(self.parent) if self.parent is not None else None
        return [{self.vertex: c} for c in COLORS if c != banned]


@dataclass(frozen=True)
class _CaseSlot:
    cases: tuple[dict[VertexId, Color], ...]

    def options(self, fixed: Mapping[VertexId, Color]) -> list[dict[VertexId, Color]]:
        return list(self.cases)


@dataclass(frozen=True)
class _Plan:
    residual: Instance
    slots: tuple[_Slot, ...] = ()
    trivial: tuple[TrivialConfiguration, ...] = ()
    bound: int = 1
    csp_graph: Graph = field(default_factory=Graph)


def _bushy_slots(forest: BushyForest) -> list[_Slot]:
    slots: list[_Slot] = [_VertexSlot(t.root) for t in forest.trees]
    for tree in forest.trees:
        for v in tree.bfs_internal():
            if v != tree.root:
                slots.append(_VertexSlot(v, tree.parent[v]))
    return slots


def _plan(residual: Instance, config: SolverConfig, sink: StatsSink) -> _Plan:
    g = residual.graph
    if g.n <= config.tiny_residual_cap:
        sink.on_residual(None, 1, 0, 0)
        return _Plan(residual=residual, csp_graph=g)
    forest = to_low_magnitude(g, build_maximal_bushy_forest(g))
    part = partition(g, forest, strict=config.strict_partition)
    chromatic = build_chromatic_forest(g, forest, part)
    slots = _bushy_slots(forest)
    bound = 3 ** len(part.R) * 2 ** len(part.I)
    for tree in chromatic.trees:
        cases = tuple(schedule(tree).cases())
        slots.append(_CaseSlot(cases))
        bound *= len(cases)
    counts = part.counts()
    sink.on_residual(counts, bound, len(chromatic.trees), len(chromatic.trivially_colored))
    logger.debug(
        "Residual planned",
        vertices=g.n,
        roots=counts.R,
        internal=counts.I,
        chromatic_trees=len(chromatic.trees),
        bound=bound,
    )
    trivial_vertices = chromatic.trivial_vertices
    csp_graph = g.remove_vertices(trivial_vertices) if trivial_vertices else g
    return _Plan(
        residual=residual,
        slots=tuple(slots),
        trivial=chromatic.trivially_colored,
        bound=bound,
        csp_graph=csp_graph,
    )


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------


class _Search:
    """Depth-first walk over a plan's slots, shared by all worker threads."""

    def __init__(
        self, plan: _Plan, sink: StatsSink, *, exhaustive: bool, stop: threading.Event
    ) -> None:
        self.plan = plan
        self.sink = sink
        self.exhaustive = exhaustive
        self.stop = stop

    def _clashes(self, option: Mapping[VertexId, Color], fixed: Mapping[VertexId, Color]) -> bool:
        g = self.plan.residual.graph
        for v, c in option.items():
            if any(fixed.get(w) == c or option.get(w) == c for w in g.neighbors(v)):
                return True
        return False

    def extend(
        self, depth: int, fixed: Mapping[VertexId, Color]
    ) -> list[dict[VertexId, Color]]:
        out = []
        for option in self.plan.slots[depth].options(fixed):
            if not self._clashes(option, fixed):
                out.append({**fixed, **option})
        return out

    def run(self, depth: int, fixed: dict[VertexId, Color]) -> dict[VertexId, Color] | None:
        if self.stop.is_set():
            return None
        if depth == len(self.plan.slots):
            found = self._leaf(fixed)
            if found is not None and not self.exhaustive:
                self.stop.set()
            return found
        first: dict[VertexId, Color] | None = None
        for child in self.extend(depth, fixed):
            found = self.run(depth + 1, child)
            if found is not None:
                if not self.exhaustive:
                    return found
                if first is None:
                    first = found
        return first

    def _leaf(self, fixed: dict[VertexId, Color]) -> dict[VertexId, Color] | None:
        self.sink.on_assignment()
        plan = self.plan
        inst = Instance.from_graph(plan.csp_graph).with_fixed(fixed)
        self.sink.on_csp_call()
        solution = csp.solve(csp.from_partial_coloring(inst), on_node=self.sink.on_csp_node)
        if solution is None:
            return None
        coloring = {**fixed, **solution.assignment}
        for config in plan.trivial:
            coloring.update(config.color(plan.residual.graph, coloring))
        return coloring


def _prefixes(search: _Search, want: int) -> list[tuple[int, dict[VertexId, Color]]]:
    """Expand the first slots breadth first until there are ``want`` subtrees."""
    depth = 0
    frontier: list[dict[VertexId, Color]] = [{}]
    while len(frontier) < want and depth < len(search.plan.slots):
        frontier = [child for fixed in frontier for child in search.extend(depth, fixed)]
        depth += 1
    return [(depth, fixed) for fixed in frontier]


def _solve_residual(
    plan: _Plan, config: SolverConfig, sink: StatsSink
) -> dict[VertexId, Color] | None:
    stop = threading.Event()
    search = _Search(plan, sink, exhaustive=config.exhaustive, stop=stop)
    if config.jobs == 1 or not plan.slots:
        return search.run(0, {})
    prefixes = _prefixes(search, config.jobs * _PREFIXES_PER_JOB)
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        results = list(pool.map(lambda p: search.run(*p), prefixes))
    return next((r for r in results if r is not None), None)


def _solve_component(
    g: Graph, config: SolverConfig, sink: StatsSink
) -> dict[VertexId, Color] | None:
    sink.on_component(g.n)
    found: dict[VertexId, Color] | None = None
    residuals = reduce_exhaustively(
        Instance.from_graph(g),
        dominated=config.dominated_elimination,
        on_branch=sink.on_branch,
    )
    for residual in residuals:
        plan = _plan(residual, config, sink)
        coloring = _solve_residual(plan, config, sink)
        if coloring is None:
            continue
        if found is None:
            found = replay(residual.trace, coloring)
        if not config.exhaustive:
            break
    return found


def solve_3coloring(
    g: Graph, config: SolverConfig | None = None, *, sink: StatsSink | None = None
) -> SolveResult:
    """Decide 3-colorability of ``g`` and return a verified coloring when one exists.

    ``sink`` receives the search events in addition to the collector behind
    ``SolveResult.stats``.
    """
    config = config or SolverConfig()
    collector = StatsCollector()
    events: StatsSink = collector if sink is None else TeeSink(collector, sink)
    coloring: dict[VertexId, Color] = {}
    colorable = True
    for comp in g.components():
        found = _solve_component(g.induced_subgraph(comp), config, events)
        if found is None:
            colorable = False
            logger.info("Component not colorable", vertices=len(comp))
            if not config.exhaustive:
                break
            continue
        coloring.update(found)
        logger.debug("Component solved", vertices=len(comp))

    stats = collector.snapshot()
    if not colorable:
        logger.info("Graph not colorable", vertices=g.n, branch_nodes=stats.branch_nodes)
        return SolveResult(status=NotColorable(), stats=stats)
    violation = verify_coloring(g, coloring)
    if violation is not None:
        raise RuntimeError(f"solver produced an improper coloring: {violation}")
    logger.info("Graph colored", vertices=g.n, branch_nodes=stats.branch_nodes)
    return SolveResult(status=Colorable(coloring=coloring), stats=stats)

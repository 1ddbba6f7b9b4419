"""High-magnitude chromatic forests over the vertices outside the bushy forest.

A chromatic tree is a claw (a root with three children) plus at most five
grandchildren, at most two per child. Enumerating a few colors on each tree
leaves its remaining vertices with small domains, which is what makes them
cheap for the CSP backend.

Construction follows three steps:

1. a maximal claw forest, improved while one claw can be traded for two;
2. every admissible vertex (unreached, or high-magnitude next to ``U'``) is
   attached to an adjacent claw, keeping each claw at five grandchildren;
3. a claw whose candidates weigh more than five and cannot be replaced is the
   closed ten-vertex configuration, which is set aside and colored last.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Union

import networkx as nx
import structlog

from forest_color import csp
from forest_color.base import COLORS, Color, VertexId
from forest_color.bushy import BushyForest, Partition
from forest_color.graph import Graph
from forest_color.reduce import Instance

logger = structlog.get_logger(__name__)

MAX_GRANDCHILDREN = 5
MAX_PER_CHILD = 2
TRIVIAL_CANDIDATES = 6

# Largest boundary (plus shared neighbors) enumerated when proving a configuration trivial
BOUNDARY_SCOPE_CAP = 8


class ChromaticForestError(RuntimeError):
    """A chromatic tree or forest broke its structural invariants."""


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChromaticTree:
    root: VertexId
    children: tuple[VertexId, VertexId, VertexId]
    grandchildren: Mapping[VertexId, tuple[VertexId, ...]] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if len(self.children) != 3 or len(set(self.children)) != 3:
            raise ChromaticForestError(f"tree at {self.root} needs three distinct children")
        if self.root in self.children:
            raise ChromaticForestError(f"root {self.root} listed as its own child")
        for child, below in self.grandchildren.items():
            if child not in self.children:
                raise ChromaticForestError(f"{child} is not a child of tree at {self.root}")
            if len(below) > MAX_PER_CHILD:
                raise ChromaticForestError(
                    f"child {child} of tree at {self.root} has {len(below)} grandchildren"
                )
        if self.grandchild_count > MAX_GRANDCHILDREN:
            raise ChromaticForestError(
                f"tree at {self.root} has {self.grandchild_count} grandchildren"
            )

    @property
    def grandchild_count(self) -> int:
        return sum(len(below) for below in self.grandchildren.values())

    @property
    def all_grandchildren(self) -> frozenset[VertexId]:
        return frozenset(itertools.chain.from_iterable(self.grandchildren.values()))

    @property
    def vertices(self) -> frozenset[VertexId]:
        return frozenset(self.children) | {self.root} | self.all_grandchildren

    def edges(self) -> list[tuple[VertexId, VertexId]]:
        out = [(self.root, c) for c in self.children]
        out.extend((c, gc) for c, below in self.grandchildren.items() for gc in below)
        return out

    def tree_neighbors(self, v: VertexId) -> set[VertexId]:
        return {b for a, b in self.edges() if a == v} | {a for a, b in self.edges() if b == v}


@dataclass(frozen=True)
class TrivialConfiguration:
    """A claw and its six candidates, joined to the rest of the graph only through ``boundary``.

    Every coloring of the boundary the rest of the graph can produce extends
    into the configuration, so it is colored after everything else.
    """

    root: VertexId
    children: tuple[VertexId, ...]
    candidates: frozenset[VertexId]
    boundary: frozenset[VertexId]

    @property
    def vertices(self) -> frozenset[VertexId]:
        return frozenset(self.children) | {self.root} | self.candidates

    def color(self, g: Graph, coloring: Mapping[VertexId, Color]) -> dict[VertexId, Color]:
        """Color the configuration given the colors already on its boundary."""
        found = _extend(g, self.vertices, {b: coloring[b] for b in self.boundary})
        if found is None:
            raise ChromaticForestError(
                f"configuration at {self.root} does not extend its boundary coloring"
            )
        return found


@dataclass(frozen=True)
class ChromaticForest:
    trees: tuple[ChromaticTree, ...] = ()
    trivially_colored: tuple[TrivialConfiguration, ...] = ()

    @property
    def covered(self) -> frozenset[VertexId]:
        return frozenset().union(*(t.vertices for t in self.trees))

    @property
    def trivial_vertices(self) -> frozenset[VertexId]:
        return frozenset().union(*(c.vertices for c in self.trivially_colored))


# ---------------------------------------------------------------------------
# Enumeration schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RootBranch:
    """Try each color on the root; children drop to two colors."""

    tree: ChromaticTree

    def cases(self) -> list[dict[VertexId, Color]]:
        return [{self.tree.root: c} for c in COLORS]


@dataclass(frozen=True)
class TwoChildBranch:
    """Try each color pair on the two children holding two grandchildren each.

    Different colors force the root to the third color.
    """

    tree: ChromaticTree
    first: VertexId
    second: VertexId

    def cases(self) -> list[dict[VertexId, Color]]:
        out: list[dict[VertexId, Color]] = []
        for a, b in itertools.product(COLORS, repeat=2):
            case = {self.first: a, self.second: b}
            if a != b:
                (third,) = set(COLORS) - {a, b}
                case[self.tree.root] = third
            out.append(case)
        return out


EnumerationSchedule = Union[RootBranch, TwoChildBranch]


def schedule(tree: ChromaticTree) -> EnumerationSchedule:
    if tree.grandchild_count <= 4:
        return RootBranch(tree)
    first, second = (c for c in tree.children if len(tree.grandchildren.get(c, ())) == 2)
    return TwoChildBranch(tree, first, second)


def full_domain_vertices(
    tree: ChromaticTree, case: Mapping[VertexId, Color]
) -> frozenset[VertexId]:
    """Tree vertices still holding all three colors once ``case`` is fixed."""
    return frozenset(
        v for v in tree.vertices if v not in case and not tree.tree_neighbors(v) & case.keys()
    )


# ---------------------------------------------------------------------------
# Claw forest
# ---------------------------------------------------------------------------


class _ClawForest:
    """Mutable set of vertex-disjoint claws in ``gs``."""

    def __init__(self, gs: Graph) -> None:
        self.gs = gs
        self.claws: dict[VertexId, tuple[VertexId, VertexId, VertexId]] = {}
        self.taken: set[VertexId] = set()

    def claw_at(
        self, v: VertexId, taken: set[VertexId] | frozenset[VertexId]
    ) -> tuple[VertexId, VertexId, VertexId] | None:
        nbrs = self.gs.neighbors(v)
        if v in taken or len(nbrs) != 3 or nbrs & taken:
            return None
        a, b, c = sorted(nbrs)
        return a, b, c

    def add(self, root: VertexId, children: tuple[VertexId, VertexId, VertexId]) -> None:
        self.claws[root] = children
        self.taken.add(root)
        self.taken.update(children)

    def remove(self, root: VertexId) -> None:
        children = self.claws.pop(root)
        self.taken.discard(root)
        self.taken.difference_update(children)

    def fill(self) -> None:
        for v in sorted(self.gs.vertices):
            claw = self.claw_at(v, self.taken)
            if claw is not None:
                self.add(v, claw)

    def _split(
        self, root: VertexId
    ) -> tuple[tuple[VertexId, tuple[VertexId, VertexId, VertexId]], ...] | None:
        body = {root, *self.claws[root]}
        freed = self.taken - body
        pool = sorted(body | {w for v in body for w in self.gs.neighbors(v)})
        claws = []
        for r in pool:
            claw = self.claw_at(r, freed)
            if claw is not None:
                claws.append((r, claw))
        for i, (r1, c1) in enumerate(claws):
            for r2, c2 in claws[i + 1 :]:
                if not ({r1, *c1} & {r2, *c2}):
                    return (r1, c1), (r2, c2)
        return None

    def improve(self) -> int:
        """Trade one claw for two until no trade exists; returns the number of trades."""
        trades = 0
        while True:
            for root in sorted(self.claws):
                split = self._split(root)
                if split is not None:
                    self.remove(root)
                    for r, c in split:
                        self.add(r, c)
                    self.fill()
                    trades += 1
                    break
            else:
                return trades

    def trees(self) -> list[ChromaticTree]:
        return [ChromaticTree(root=r, children=c) for r, c in sorted(self.claws.items())]


def build_k13_forest(gs: Graph) -> list[ChromaticTree]:
    """Maximal claw forest of ``gs`` where no claw can be traded for two disjoint claws."""
    forest = _ClawForest(gs)
    forest.fill()
    trades = forest.improve()
    logger.debug("Claw forest built", claws=len(forest.claws), trades=trades)
    return forest.trees()


# ---------------------------------------------------------------------------
# Grandchild assignment
# ---------------------------------------------------------------------------


def _adjacent_trees(
    gs: Graph, trees: list[ChromaticTree], candidates: Iterable[VertexId]
) -> dict[VertexId, list[int]]:
    child_of = {c: i for i, t in enumerate(trees) for c in t.children}
    return {
        v: sorted({child_of[w] for w in gs.neighbors(v) if w in child_of}) for v in candidates
    }


def _weights(adjacent: Mapping[VertexId, list[int]]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for owners in adjacent.values():
        for t in owners:
            out[t] = out.get(t, Fraction(0)) + Fraction(1, len(owners))
    return out


def _extend(
    g: Graph, body: frozenset[VertexId], boundary_colors: Mapping[VertexId, Color]
) -> dict[VertexId, Color] | None:
    scope = body | boundary_colors.keys()
    inst = Instance.from_graph(g.induced_subgraph(scope)).with_fixed(boundary_colors)
    found = csp.solve(csp.from_partial_coloring(inst))
    if found is None:
        return None
    return {v: found.assignment[v] for v in body}


def _boundary_patterns(
    g: Graph, body: frozenset[VertexId], boundary: frozenset[VertexId]
) -> set[tuple[Color, ...]] | None:
    """Boundary colorings that some proper coloring outside ``body`` can produce.

    Vertices adjacent to two or more boundary vertices are colored along with
    the boundary, which rules out patterns such a shared neighbor forbids.
    """
    hubs = {
        w
        for b in boundary
        for w in g.neighbors(b)
        if w not in body and w not in boundary and len(g.neighbors(w) & boundary) >= 2
    }
    scope = sorted(boundary) + sorted(hubs)
    if len(scope) > BOUNDARY_SCOPE_CAP:
        return None
    sub = g.induced_subgraph(scope)
    edges = sub.edges()
    index = {v: i for i, v in enumerate(scope)}
    patterns: set[tuple[Color, ...]] = set()
    for colors in itertools.product(COLORS, repeat=len(scope)):
        if all(colors[index[u]] != colors[index[v]] for u, v in edges):
            patterns.add(colors[: len(boundary)])
    return patterns


def _trivial_configuration(
    g: Graph,
    gs: Graph,
    tree: ChromaticTree,
    candidates: list[VertexId],
    adjacent: Mapping[VertexId, list[int]],
) -> TrivialConfiguration | None:
    if len(candidates) != TRIVIAL_CANDIDATES or any(len(adjacent[v]) != 1 for v in candidates):
        return None
    ring = frozenset(candidates)
    body = tree.vertices | ring
    for v in body:
        if not gs.neighbors(v) <= body:
            return None
    for v in ring:
        if len(gs.neighbors(v) & ring) != 2:
            return None
    if len(gs.induced_subgraph(ring).components()) != 1:
        return None
    boundary = frozenset(w for v in body for w in g.neighbors(v)) - body
    patterns = _boundary_patterns(g, body, boundary)
    if patterns is None:
        return None
    order = sorted(boundary)
    for pattern in sorted(patterns):
        if _extend(g, body, dict(zip(order, pattern))) is None:
            return None
    return TrivialConfiguration(
        root=tree.root, children=tree.children, candidates=ring, boundary=boundary
    )


def _attach(
    gs: Graph,
    trees: list[ChromaticTree],
    candidates: list[VertexId],
    adjacent: Mapping[VertexId, list[int]],
) -> dict[VertexId, tuple[int, VertexId]]:
    """Place candidates under tree children; returns candidate -> (tree index, child)."""
    per_tree = [0] * len(trees)
    per_child: dict[VertexId, int] = {}
    placed: dict[VertexId, tuple[int, VertexId]] = {}
    for v in sorted(candidates, key=lambda v: (len(adjacent[v]), v)):
        options = [
            (per_tree[t], t, c)
            for t in adjacent[v]
            for c in trees[t].children
            if gs.has_edge(v, c)
            and per_tree[t] < MAX_GRANDCHILDREN
            and per_child.get(c, 0) < MAX_PER_CHILD
        ]
        if not options:
            break
        _, t, c = min(options)
        per_tree[t] += 1
        per_child[c] = per_child.get(c, 0) + 1
        placed[v] = (t, c)
    else:
        return placed

    # Greedy got stuck: a max flow places as many candidates as the capacities allow.
    net = nx.DiGraph()
    for v in candidates:
        net.add_edge("source", ("v", v), capacity=1)
        for t in adjacent[v]:
            for c in trees[t].children:
                if gs.has_edge(v, c):
                    net.add_edge(("v", v), ("c", c), capacity=1)
                    net.add_edge(("c", c), ("t", t), capacity=MAX_PER_CHILD)
                    net.add_edge(("t", t), "sink", capacity=MAX_GRANDCHILDREN)
    if "sink" not in net:
        return {}
    _, flow = nx.maximum_flow(net, "source", "sink")
    placed = {}
    for v in candidates:
        for node, amount in flow.get(("v", v), {}).items():
            if amount > 0:
                _, c = node
                t = next(t for t in adjacent[v] if c in trees[t].children)
                placed[v] = (t, c)
    return placed


def assign_grandchildren(
    gs: Graph,
    forest: Iterable[ChromaticTree],
    admissible: Iterable[VertexId],
    *,
    g: Graph | None = None,
    u_prime: Iterable[VertexId] = (),
) -> ChromaticForest:
    """Attach every admissible vertex outside the claws as a grandchild.

    ``g`` is the full graph, used to find the boundary of a closed
    configuration (defaults to ``gs``). ``u_prime`` lists unreached vertices
    whose three neighbors are all high-magnitude; a claw rooted there may
    replace an overweight claw.

    Raises:
        ChromaticForestError: if some admissible vertex fits under no tree.
    """
    full = g if g is not None else gs
    claws = _ClawForest(gs)
    for tree in forest:
        claws.add(tree.root, tree.children)
    wanted = {v for v in admissible if v in gs}
    roots_u_prime = sorted(v for v in u_prime if v in gs)
    trivial: list[TrivialConfiguration] = []
    overweight: set[VertexId] = set()
    used_u_prime: set[VertexId] = set()

    for _ in range(4 * gs.n + 1):
        trees = claws.trees()
        candidates = sorted(wanted - claws.taken)
        adjacent = _adjacent_trees(gs, trees, candidates)
        weights = _weights(adjacent)
        heavy = next(
            (
                i
                for i, t in enumerate(trees)
                if weights.get(i, 0) > MAX_GRANDCHILDREN and t.root not in overweight
            ),
            None,
        )
        if heavy is None:
            break
        tree = trees[heavy]
        if _replace_with_u_prime(claws, tree, roots_u_prime, used_u_prime, wanted):
            continue
        mine = [v for v in candidates if heavy in adjacent[v]]
        config = _trivial_configuration(full, gs, tree, mine, adjacent)
        if config is not None:
            claws.remove(tree.root)
            wanted -= config.vertices
            trivial.append(config)
            logger.info("Closed configuration set aside", root=tree.root)
            continue
        # Neither fix applies; the caps in _attach decide whether it still fits
        overweight.add(tree.root)
        logger.debug(
            "Chromatic tree over capacity", root=tree.root, weight=float(weights[heavy])
        )

    trees = claws.trees()
    candidates = sorted(wanted - claws.taken)
    adjacent = _adjacent_trees(gs, trees, candidates)
    placed = _attach(gs, trees, candidates, adjacent)
    below: list[dict[VertexId, list[VertexId]]] = [{} for _ in trees]
    for v, (t, c) in sorted(placed.items()):
        below[t].setdefault(c, []).append(v)
    final = tuple(
        ChromaticTree(
            root=t.root,
            children=t.children,
            grandchildren={c: tuple(sorted(vs)) for c, vs in sorted(below[i].items())},
        )
        for i, t in enumerate(trees)
    )
    unplaced = sorted(set(candidates) - placed.keys())
    if unplaced:
        raise ChromaticForestError(
            f"no tree can take admissible vertices {unplaced}"
            + (f" (over capacity: {sorted(overweight)})" if overweight else "")
        )
    return ChromaticForest(trees=final, trivially_colored=tuple(trivial))


def _replace_with_u_prime(
    claws: _ClawForest,
    tree: ChromaticTree,
    roots: list[VertexId],
    used: set[VertexId],
    wanted: set[VertexId],
) -> bool:
    """Swap ``tree`` for a claw rooted at an unreached vertex if that lightens it."""
    freed = claws.taken - tree.vertices
    for u in roots:
        if u in used:
            continue
        claw = claws.claw_at(u, freed)
        if claw is None or not {u, *claw} & tree.vertices:
            continue
        trial = _ClawForest(claws.gs)
        for r, c in claws.claws.items():
            if r != tree.root:
                trial.add(r, c)
        trial.add(u, claw)
        trees = trial.trees()
        idx = next(i for i, t in enumerate(trees) if t.root == u)
        candidates = sorted(wanted - trial.taken)
        weight = _weights(_adjacent_trees(claws.gs, trees, candidates)).get(idx, Fraction(0))
        if weight > MAX_GRANDCHILDREN:
            continue
        claws.remove(tree.root)
        claws.add(u, claw)
        claws.fill()
        used.add(u)
        logger.debug("Claw rerooted at unreached vertex", old=tree.root, new=u)
        return True
    return False


def build_chromatic_forest(g: Graph, forest: BushyForest, part: Partition) -> ChromaticForest:
    """Chromatic forest over ``G[V - F]`` covering U and the HM vertices next to ``U'``."""
    gs = g.induced_subgraph(g.vertices - forest.vertices)
    hm_next_to_u_prime = {v for v in part.high_magnitude if g.neighbors(v) & part.U_prime}
    admissible = part.unreached | hm_next_to_u_prime
    result = assign_grandchildren(
        gs, build_k13_forest(gs), admissible, g=g, u_prime=part.U_prime
    )
    logger.debug(
        "Chromatic forest built",
        trees=len(result.trees),
        trivial=len(result.trivially_colored),
    )
    return result


def check_forest(
    gs: Graph, cf: ChromaticForest, required: Iterable[VertexId] = ()
) -> list[str]:
    """Per-tree caps, tree edges, disjointness and coverage of ``required``."""
    problems: list[str] = []
    seen: set[VertexId] = set()
    for tree in cf.trees:
        if tree.vertices & seen:
            problems.append(f"tree at {tree.root} overlaps another tree")
        seen |= tree.vertices
        for a, b in tree.edges():
            if not gs.has_edge(a, b):
                problems.append(f"tree edge {a}-{b} is not in the graph")
        if tree.grandchild_count > MAX_GRANDCHILDREN:
            problems.append(f"tree at {tree.root} has {tree.grandchild_count} grandchildren")
        for c, below in tree.grandchildren.items():
            if len(below) > MAX_PER_CHILD:
                problems.append(f"child {c} has {len(below)} grandchildren")
    for config in cf.trivially_colored:
        if config.vertices & seen:
            problems.append(f"configuration at {config.root} overlaps a tree")
        seen |= config.vertices
        if len(config.vertices) != 4 + TRIVIAL_CANDIDATES:
            problems.append(f"configuration at {config.root} has {len(config.vertices)} vertices")
    missing = sorted(set(required) - seen)
    if missing:
        problems.append(f"uncovered vertices: {missing}")
    return problems

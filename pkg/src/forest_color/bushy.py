"""Bushy forests, high-magnitude vertices and the vertex partition.

A bushy forest is a set of vertex-disjoint trees in which every internal
vertex has at least four tree neighbors. Once the forest is maximal and
low-magnitude, the vertices outside it split into the classes the runtime
accounting works with (R, I, L, N1, N2, N3_i, U_j, U').
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import structlog
from pydantic import BaseModel

from forest_color.analysis.work_factor import CHROMATIC_BASE, CSP_BASE
from forest_color.base import VertexId
from forest_color.graph import Graph

logger = structlog.get_logger(__name__)

MIN_TREE_NEIGHBORS = 4
MAX_HM_PER_TREE = 8
MAX_N1_PER_COMPONENT = 7

OUTSIDE_FOUR = "outside vertex with four outside neighbors"
LEAF_THREE = "leaf with three outside neighbors"
OUTSIDE_INTERNAL = "outside vertex adjacent to an internal vertex"


class PartitionConstraintError(RuntimeError):
    """A counting constraint failed on a partition built under the forest preconditions."""

    def __init__(self, violations: list[ConstraintViolation]) -> None:
        self.violations = violations
        super().__init__("; ".join(str(v) for v in violations))


# ---------------------------------------------------------------------------
# Forest types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BushyTree:
    """A rooted tree of the forest. ``parent`` maps every non-root vertex to its parent."""

    root: VertexId
    parent: Mapping[VertexId, VertexId]
    internal: frozenset[VertexId] = field(init=False)
    leaves: frozenset[VertexId] = field(init=False)

    def __post_init__(self) -> None:
        has_child = set(self.parent.values())
        internal = frozenset(has_child | {self.root})
        object.__setattr__(self, "internal", internal)
        object.__setattr__(self, "leaves", frozenset(self.parent) - internal)

    @classmethod
    def from_edges(cls, root: VertexId, edges: Iterable[tuple[VertexId, VertexId]]) -> BushyTree:
        adj: dict[VertexId, set[VertexId]] = {root: set()}
        for u, v in edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set()).add(u)
        parent: dict[VertexId, VertexId] = {}
        seen = {root}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in sorted(adj[x]):
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    queue.append(y)
        return cls(root=root, parent=parent)

    @property
    def vertices(self) -> frozenset[VertexId]:
        return frozenset(self.parent) | {self.root}

    def children(self, v: VertexId) -> list[VertexId]:
        return sorted(c for c, p in self.parent.items() if p == v)

    def tree_neighbors(self, v: VertexId) -> set[VertexId]:
        out = set(self.children(v))
        if v in self.parent:
            out.add(self.parent[v])
        return out

    def bfs_internal(self) -> list[VertexId]:
        """Internal vertices in breadth-first order from the root."""
        order: list[VertexId] = []
        queue = deque([self.root])
        while queue:
            x = queue.popleft()
            if x in self.internal:
                order.append(x)
                queue.extend(self.children(x))
        return order


@dataclass(frozen=True)
class BushyForest:
    trees: tuple[BushyTree, ...] = ()

    @property
    def vertices(self) -> frozenset[VertexId]:
        return frozenset().union(*(t.vertices for t in self.trees))

    @property
    def internal(self) -> frozenset[VertexId]:
        return frozenset().union(*(t.internal for t in self.trees))

    @property
    def leaves(self) -> frozenset[VertexId]:
        return frozenset().union(*(t.leaves for t in self.trees))

    @property
    def roots(self) -> frozenset[VertexId]:
        return frozenset(t.root for t in self.trees)

    def tree_of(self) -> dict[VertexId, int]:
        return {v: i for i, t in enumerate(self.trees) for v in t.vertices}


@dataclass(frozen=True)
class MaximalityViolation:
    clause: str
    vertex: VertexId

    def __str__(self) -> str:
        return f"{self.clause}: {self.vertex}"


@dataclass(frozen=True)
class HighMagnitudeVertex:
    vertex: VertexId
    outside_neighbors: frozenset[VertexId]


# ---------------------------------------------------------------------------
# Mutable builder
# ---------------------------------------------------------------------------


class _ForestBuilder:
    """Undirected tree adjacency plus ownership; internal means tree degree >= 2."""

    def __init__(self, g: Graph) -> None:
        self.g = g
        self.tadj: dict[VertexId, set[VertexId]] = {}
        self.owner: dict[VertexId, int] = {}
        self.members: dict[int, set[VertexId]] = {}
        self._next_id = 0

    @classmethod
    def from_forest(cls, g: Graph, f: BushyForest) -> _ForestBuilder:
        b = cls(g)
        for tree in f.trees:
            tid = b._new_id()
            b.members[tid] = set()
            for v in tree.vertices:
                b._enter(v, tid)
            for c, p in tree.parent.items():
                b.tadj[c].add(p)
                b.tadj[p].add(c)
        return b

    def _new_id(self) -> int:
        self._next_id += 1
        return self._next_id

    def _enter(self, v: VertexId, tid: int) -> None:
        self.owner[v] = tid
        self.members[tid].add(v)
        self.tadj[v] = set()

    def is_internal(self, v: VertexId) -> bool:
        return v in self.owner and len(self.tadj[v]) >= 2

    def is_leaf(self, v: VertexId) -> bool:
        return v in self.owner and len(self.tadj[v]) == 1

    def outside_neighbors(self, v: VertexId) -> set[VertexId]:
        return {w for w in self.g.neighbors(v) if w not in self.owner}

    def new_tree(self, center: VertexId, leaves: Iterable[VertexId]) -> int:
        tid = self._new_id()
        self.members[tid] = set()
        self._enter(center, tid)
        for leaf in leaves:
            self.add_leaf(center, leaf)
        return tid

    def add_leaf(self, at: VertexId, leaf: VertexId) -> None:
        self._enter(leaf, self.owner[at])
        self.tadj[at].add(leaf)
        self.tadj[leaf].add(at)

    def outside_vertices(self) -> list[VertexId]:
        return sorted(v for v in self.g.vertices if v not in self.owner)

    def remove_tree(self, tid: int) -> None:
        for v in self.members.pop(tid):
            del self.owner[v]
            del self.tadj[v]

    def detach_leaf(self, leaf: VertexId) -> None:
        (at,) = self.tadj.pop(leaf)
        self.tadj[at].discard(leaf)
        self.members[self.owner.pop(leaf)].discard(leaf)

    def tree_internal(self, tid: int) -> list[VertexId]:
        return sorted(v for v in self.members[tid] if len(self.tadj[v]) >= 2)

    def tree_leaves(self, tid: int) -> list[VertexId]:
        return sorted(v for v in self.members[tid] if len(self.tadj[v]) == 1)

    def maximalize(self) -> None:
        """Repair, grow and seed until all three maximality clauses hold."""
        g = self.g
        while True:
            changed = False
            for v in self.outside_vertices():
                if v in self.owner:
                    continue
                hosts = [w for w in g.neighbors(v) if self.is_internal(w)]
                if hosts:
                    self.add_leaf(min(hosts), v)
                    changed = True
            for leaf in sorted(v for v in self.owner if self.is_leaf(v)):
                if not self.is_leaf(leaf):
                    continue
                outside = self.outside_neighbors(leaf)
                if len(outside) >= 3:
                    for w in sorted(outside):
                        self.add_leaf(leaf, w)
                    changed = True
            for v in self.outside_vertices():
                if v in self.owner:
                    continue
                outside = self.outside_neighbors(v)
                if len(outside) >= MIN_TREE_NEIGHBORS:
                    self.new_tree(v, sorted(outside))
                    changed = True
            if not changed:
                return

    def freeze(self) -> BushyForest:
        trees = []
        for tid, members in self.members.items():
            root = min(v for v in members if len(self.tadj[v]) >= 2)
            edges = [(u, v) for u in members for v in self.tadj[u] if u < v]
            trees.append(BushyTree.from_edges(root, edges))
        return BushyForest(trees=tuple(sorted(trees, key=lambda t: t.root)))


# ---------------------------------------------------------------------------
# Construction and checks
# ---------------------------------------------------------------------------


def build_maximal_bushy_forest(g: Graph) -> BushyForest:
    """Greedily grow and seed trees until the forest is maximal."""
    b = _ForestBuilder(g)
    b.maximalize()
    forest = b.freeze()
    logger.debug("Bushy forest built", trees=len(forest.trees), covered=len(b.owner))
    return forest


def check_maximal(g: Graph, f: BushyForest) -> list[MaximalityViolation]:
    """Name every violated maximality clause with its witness vertex."""
    covered = f.vertices
    internal = f.internal
    out: list[MaximalityViolation] = []
    for v in sorted(g.vertices):
        outside = [w for w in g.neighbors(v) if w not in covered]
        if v not in covered:
            if len(outside) >= MIN_TREE_NEIGHBORS:
                out.append(MaximalityViolation(OUTSIDE_FOUR, v))
            if any(w in internal for w in g.neighbors(v)):
                out.append(MaximalityViolation(OUTSIDE_INTERNAL, v))
        elif v in f.leaves and len(outside) >= 3:
            out.append(MaximalityViolation(LEAF_THREE, v))
    return out


def check_structure(g: Graph, f: BushyForest) -> list[str]:
    """Structural bushy-forest invariants; empty when the forest is well formed."""
    problems: list[str] = []
    seen: set[VertexId] = set()
    for tree in f.trees:
        verts = tree.vertices
        if verts & seen:
            problems.append(f"tree at {tree.root} overlaps another tree")
        seen |= verts
        if tree.root not in g:
            problems.append(f"root {tree.root} not in graph")
            continue
        for child, par in tree.parent.items():
            if not g.has_edge(child, par):
                problems.append(f"tree edge {par}-{child} is not a graph edge")
        for v in verts:
            hops = 0
            x = v
            while x != tree.root:
                x = tree.parent[x]
                hops += 1
                if hops > len(verts):
                    problems.append(f"parent chain from {v} does not reach the root")
                    break
        for v in tree.internal:
            if len(tree.tree_neighbors(v)) < MIN_TREE_NEIGHBORS:
                problems.append(f"internal vertex {v} has fewer than four tree neighbors")
    return problems


def high_magnitude_vertices(g: Graph, f: BushyForest) -> list[HighMagnitudeVertex]:
    covered = f.vertices
    out: list[HighMagnitudeVertex] = []
    for v in sorted(g.vertices - covered):
        nbrs = g.neighbors(v)
        if not nbrs & covered:
            continue
        outside = frozenset(nbrs - covered)
        if len(outside) == 3:
            out.append(HighMagnitudeVertex(vertex=v, outside_neighbors=outside))
    return out


def _adjacent_trees(g: Graph, v: VertexId, tree_of: Mapping[VertexId, int]) -> list[int]:
    return sorted({tree_of[w] for w in g.neighbors(v) if w in tree_of})


def check_low_magnitude(g: Graph, f: BushyForest) -> list[tuple[VertexId, str]]:
    """HM vertices that break the low-magnitude definition."""
    tree_of = f.tree_of()
    hms = high_magnitude_vertices(g, f)
    out: list[tuple[VertexId, str]] = []
    by_tree: dict[int, list[HighMagnitudeVertex]] = {}
    for hm in hms:
        for t in _adjacent_trees(g, hm.vertex, tree_of):
            tree = f.trees[t]
            if len(tree.internal) != 1 or len(tree.leaves) != 4:
                shape = f"{len(tree.internal)} internal, {len(tree.leaves)} leaves"
                out.append((hm.vertex, f"adjacent to tree at {tree.root} with {shape}"))
            by_tree.setdefault(t, []).append(hm)
    for t, group in by_tree.items():
        leaves = f.trees[t].leaves
        for i, a in enumerate(group):
            for b in group[i + 1:]:
                shared_leaf = g.neighbors(a.vertex) & g.neighbors(b.vertex) & leaves
                shared_out = a.outside_neighbors & b.outside_neighbors
                if not shared_leaf and not shared_out:
                    out.append((a.vertex, f"shares no neighbor with {b.vertex}"))
    return out


# ---------------------------------------------------------------------------
# Low-magnitude rewrites
# ---------------------------------------------------------------------------


def _next_rewrite(b: _ForestBuilder) -> tuple[int, tuple[VertexId, ...], int] | None:
    g = b.g
    hms = []
    for v in b.outside_vertices():
        nbrs = g.neighbors(v)
        if any(w in b.owner for w in nbrs) and len(b.outside_neighbors(v)) == 3:
            hms.append(v)
    adjacent = {v: sorted({b.owner[w] for w in g.neighbors(v) if w in b.owner}) for v in hms}
    for v in hms:
        for tid in adjacent[v]:
            if len(b.tree_internal(tid)) >= 2:
                return 1, (v,), tid
    for v in hms:
        for tid in adjacent[v]:
            if len(b.tree_leaves(tid)) >= 5:
                return 2, (v,), tid
    for i, v in enumerate(hms):
        for w in hms[i + 1:]:
            for tid in sorted(set(adjacent[v]) & set(adjacent[w])):
                leaves = set(b.tree_leaves(tid))
                if g.neighbors(v) & g.neighbors(w) & leaves:
                    continue
                if b.outside_neighbors(v) & b.outside_neighbors(w):
                    continue
                return (4 if g.has_edge(v, w) else 3), (v, w), tid
    return None


def _leaf_toward(b: _ForestBuilder, tid: int, v: VertexId) -> VertexId:
    return min(x for x in b.g.neighbors(v) if b.owner.get(x) == tid and b.is_leaf(x))


def _apply_rewrite(b: _ForestBuilder, case: int, witness: tuple[VertexId, ...], tid: int) -> None:
    g = b.g
    if case == 1:
        (v,) = witness
        l = _leaf_toward(b, tid, v)
        (l_parent,) = b.tadj[l]
        r = min(x for x in b.tree_internal(tid) if x != l_parent)
        r_leaves = sorted(b.tadj[r])
        v_leaves = sorted(b.outside_neighbors(v) | {l})
        b.remove_tree(tid)
        b.new_tree(r, r_leaves)
        b.new_tree(v, v_leaves)
    elif case == 2:
        (v,) = witness
        l = _leaf_toward(b, tid, v)
        b.detach_leaf(l)
        b.new_tree(v, sorted(b.outside_neighbors(v) | {l}))
    elif case == 3:
        v, w = witness
        lv, lw = _leaf_toward(b, tid, v), _leaf_toward(b, tid, w)
        v_out, w_out = b.outside_neighbors(v), b.outside_neighbors(w)
        b.remove_tree(tid)
        b.new_tree(v, sorted(v_out | {lv}))
        b.new_tree(w, sorted(w_out | {lw}))
    else:
        v, w = witness
        lv, lw = _leaf_toward(b, tid, v), _leaf_toward(b, tid, w)
        v_out, w_out = b.outside_neighbors(v) - {w}, b.outside_neighbors(w) - {v}
        b.remove_tree(tid)
        b.new_tree(v, sorted(v_out | {lv}))
        b.add_leaf(v, w)
        for x in sorted(w_out | {lw}):
            b.add_leaf(w, x)
    logger.debug("Low-magnitude rewrite applied", case=case, witness=witness)


def to_low_magnitude(g: Graph, f: BushyForest) -> BushyForest:
    """Rewrite a maximal forest until every adjacent HM vertex is low magnitude.

    Each rewrite strictly increases (tree count, internal count), so at most
    n squared rewrites happen.
    """
    b = _ForestBuilder.from_forest(g, f)
    b.maximalize()
    limit = g.n * g.n + 1
    for step in range(limit):
        found = _next_rewrite(b)
        if found is None:
            if step:
                logger.debug("Low-magnitude fixpoint reached", rewrites=step)
            return b.freeze()
        _apply_rewrite(b, *found)
        b.maximalize()
    raise RuntimeError(f"low-magnitude rewriting did not settle after {limit} rewrites")


# ---------------------------------------------------------------------------
# Partition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintViolation:
    name: str
    lhs: Fraction
    rhs: Fraction

    def __str__(self) -> str:
        return f"constraint {self.name} fails: {float(self.lhs):g} vs {float(self.rhs):g}"


class PartitionCounts(BaseModel):
    """Cardinalities of a partition, the form they take in stats output."""

    R: int
    I: int
    L: int
    N: int
    U: int
    N1: int
    N2: int
    N3: int
    N_other: int
    N3_by_trees: dict[int, int]
    U_by_n1: dict[int, int]
    U_prime: int

    @property
    def n_star(self) -> float:
        n3 = self.N3_by_trees
        return self.N - 0.6 * n3.get(5, 0) - n3.get(6, 0) - n3.get(7, 0) - n3.get(8, 0)

    @property
    def u_star(self) -> float:
        n3 = self.N3_by_trees
        return self.U + 0.6 * n3.get(5, 0) + n3.get(6, 0)

    def log_bound(self) -> float:
        """Natural log of 3^R * 2^I * b_csp^N* * b_chromatic^U*."""
        return (
            self.R * math.log(3)
            + self.I * math.log(2)
            + self.n_star * math.log(CSP_BASE)
            + self.u_star * math.log(CHROMATIC_BASE)
        )

    def flat(self) -> dict[str, int]:
        out = {
            "R": self.R,
            "I": self.I,
            "L": self.L,
            "N": self.N,
            "U": self.U,
            "N1": self.N1,
            "N2": self.N2,
            "N3": self.N3,
            "N_other": self.N_other,
            "U_prime": self.U_prime,
        }
        for i in sorted(set(range(1, MAX_HM_PER_TREE + 1)) | self.N3_by_trees.keys()):
            out[f"N3_{i}"] = self.N3_by_trees.get(i, 0)
        for j in sorted(set(range(MAX_N1_PER_COMPONENT + 1)) | self.U_by_n1.keys()):
            out[f"U{j}"] = self.U_by_n1.get(j, 0)
        return out


@dataclass(frozen=True)
class Partition:
    """Disjoint cover of the vertex set by forest role and outside class."""

    R: frozenset[VertexId]
    I: frozenset[VertexId]
    L: frozenset[VertexId]
    N1: frozenset[VertexId]
    N2: frozenset[VertexId]
    N3: Mapping[int, frozenset[VertexId]]
    N_other: frozenset[VertexId]
    U: Mapping[int, frozenset[VertexId]]
    U_prime: frozenset[VertexId]

    @property
    def high_magnitude(self) -> frozenset[VertexId]:
        return frozenset().union(*self.N3.values())

    @property
    def neighbors(self) -> frozenset[VertexId]:
        return self.N1 | self.N2 | self.high_magnitude | self.N_other

    @property
    def unreached(self) -> frozenset[VertexId]:
        return frozenset().union(*self.U.values()) | self.U_prime

    def counts(self) -> PartitionCounts:
        return PartitionCounts(
            R=len(self.R),
            I=len(self.I),
            L=len(self.L),
            N=len(self.neighbors),
            U=len(self.unreached),
            N1=len(self.N1),
            N2=len(self.N2),
            N3=len(self.high_magnitude),
            N_other=len(self.N_other),
            N3_by_trees={i: len(s) for i, s in sorted(self.N3.items())},
            U_by_n1={j: len(s) for j, s in sorted(self.U.items())},
            U_prime=len(self.U_prime),
        )


def check_constraints(counts: PartitionCounts) -> list[ConstraintViolation]:
    """Evaluate the four counting constraints exactly."""
    c = counts
    n3 = c.N3_by_trees
    out: list[ConstraintViolation] = []

    def need(name: str, lhs: Fraction, rhs: Fraction) -> None:
        if lhs > rhs:
            out.append(ConstraintViolation(name, lhs, rhs))

    need("forest-leaves", Fraction(4 * c.R + 2 * c.I), Fraction(c.L))
    need("leaf-slots", Fraction(c.N1 + 2 * c.N2 + c.N3), Fraction(2 * c.L))
    need(
        "shared-neighbors",
        Fraction(n3.get(5, 0), 5)
        + Fraction(2 * n3.get(6, 0), 6)
        + Fraction(5 * n3.get(7, 0), 7)
        + Fraction(n3.get(8, 0)),
        Fraction(c.U_prime),
    )
    need(
        "unreached-edges",
        sum((Fraction(10 - j, 8 - j) * k for j, k in c.U_by_n1.items() if j < 8), Fraction(0)),
        Fraction(2 * c.N2 + 3 * c.N3 - 3 * c.U_prime),
    )
    overflow_n3 = sum(k for i, k in n3.items() if i > MAX_HM_PER_TREE)
    if overflow_n3:
        out.append(ConstraintViolation("hm-per-tree", Fraction(overflow_n3), Fraction(0)))
    overflow_u = sum(k for j, k in c.U_by_n1.items() if j > MAX_N1_PER_COMPONENT)
    if overflow_u:
        out.append(ConstraintViolation("n1-per-component", Fraction(overflow_u), Fraction(0)))
    return out


def partition(g: Graph, f: BushyForest, *, strict: bool = True) -> Partition:
    """Classify every vertex and check the counting constraints.

    Raises:
        PartitionConstraintError: when ``strict`` and a constraint fails.
    """
    covered = f.vertices
    leaves = f.leaves
    tree_of = f.tree_of()
    outside = g.vertices - covered
    near = frozenset(v for v in outside if g.neighbors(v) & covered)
    far = outside - near

    hm = {v for v in near if len(g.neighbors(v) - covered) == 3}
    hm_per_tree: dict[int, int] = {}
    for v in hm:
        for t in _adjacent_trees(g, v, tree_of):
            hm_per_tree[t] = hm_per_tree.get(t, 0) + 1
    n3: dict[int, set[VertexId]] = {i: set() for i in range(1, MAX_HM_PER_TREE + 1)}
    for v in hm:
        i = max(hm_per_tree[t] for t in _adjacent_trees(g, v, tree_of))
        n3.setdefault(i, set()).add(v)

    n1: set[VertexId] = set()
    n2: set[VertexId] = set()
    other: set[VertexId] = set()
    for v in near - hm:
        leaf_nbrs = len(g.neighbors(v) & leaves)
        if leaf_nbrs >= 2:
            n2.add(v)
        elif leaf_nbrs == 1 and g.degree(v) == 3:
            n1.add(v)
        else:
            other.add(v)

    u_prime = frozenset(
        v for v in far if g.degree(v) == 3 and all(w in hm for w in g.neighbors(v))
    )
    pool = (far - u_prime) | n1
    u_by_n1: dict[int, set[VertexId]] = {j: set() for j in range(MAX_N1_PER_COMPONENT + 1)}
    for comp in g.components_where(lambda v: v in pool):
        j = len(comp & n1)
        u_by_n1.setdefault(j, set()).update(comp - n1)

    result = Partition(
        R=f.roots,
        I=f.internal - f.roots,
        L=leaves,
        N1=frozenset(n1),
        N2=frozenset(n2),
        N3={i: frozenset(s) for i, s in sorted(n3.items())},
        N_other=frozenset(other),
        U={j: frozenset(s) for j, s in sorted(u_by_n1.items())},
        U_prime=u_prime,
    )
    violations = check_constraints(result.counts())
    if violations:
        if strict:
            raise PartitionConstraintError(violations)
        logger.warning(
            "Partition constraints violated", violations=[str(v) for v in violations]
        )
    return result


def partition_bound(counts: PartitionCounts) -> float:
    """Work estimate ``3^R * 2^I * b_csp^N* * b_chromatic^U*`` for one partition."""
    return math.exp(counts.log_bound())

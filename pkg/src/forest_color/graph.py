"""Undirected simple graph value type.

A ``Graph`` never changes after construction. Every mutation primitive
(``remove_vertex``, ``merge_vertices``, ``induced_subgraph``) returns a new
instance, so sibling branches of a search can share the parent graph freely,
including across threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Mapping

import networkx as nx

from forest_color.base import VertexId


class GraphInvariantError(ValueError):
    """Raised by ``Graph.validate`` when the adjacency structure is broken."""


@dataclass(frozen=True)
class MergeRecord:
    """Two non-adjacent vertices were identified; ``absorbed`` is gone."""

    survivor: VertexId
    absorbed: VertexId


@dataclass(frozen=True)
class Contradiction:
    """Merging ``u`` and ``v`` is impossible because they are adjacent."""

    u: VertexId
    v: VertexId


class Graph:
    """Immutable undirected simple graph over integer vertex ids."""

    __slots__ = ("_adj", "_m")

    def __init__(self, adjacency: Mapping[VertexId, Iterable[VertexId]] | None = None) -> None:
        adj: dict[VertexId, set[VertexId]] = {}
        for v, nbrs in (adjacency or {}).items():
            adj.setdefault(v, set())
            for w in nbrs:
                if w == v:
                    raise GraphInvariantError(f"self-loop on vertex {v}")
                adj[v].add(w)
                adj.setdefault(w, set()).add(v)
        self._adj: dict[VertexId, frozenset[VertexId]] = {v: frozenset(n) for v, n in adj.items()}
        self._m = sum(len(n) for n in self._adj.values()) // 2

    @classmethod
    def from_edges(
        cls, edges: Iterable[tuple[VertexId, VertexId]], vertices: Iterable[VertexId] = ()
    ) -> Graph:
        adj: dict[VertexId, set[VertexId]] = {v: set() for v in vertices}
        for u, v in edges:
            adj.setdefault(u, set()).add(v)
            adj.setdefault(v, set())
        return cls(adj)

    @classmethod
    def _trusted(cls, adj: dict[VertexId, frozenset[VertexId]]) -> Graph:
        g = cls.__new__(cls)
        g._adj = adj
        g._m = sum(len(n) for n in adj.values()) // 2
        return g

    # ------------------------------------------------------------------
    # Queries
    # ------------------------------------------------------------------

    @property
    def vertices(self) -> frozenset[VertexId]:
        return frozenset(self._adj)

    @property
    def n(self) -> int:
        return len(self._adj)

    @property
    def m(self) -> int:
        return self._m

    def __len__(self) -> int:
        return len(self._adj)

    def __contains__(self, v: object) -> bool:
        return v in self._adj

    def __iter__(self) -> Iterator[VertexId]:
        return iter(sorted(self._adj))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self._adj == other._adj

    def __hash__(self) -> int:
        return hash(frozenset(self._adj.items()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def neighbors(self, v: VertexId) -> frozenset[VertexId]:
        return self._adj[v]

    def degree(self, v: VertexId) -> int:
        return len(self._adj[v])

    def has_edge(self, u: VertexId, v: VertexId) -> bool:
        return v in self._adj.get(u, ())

    def edges(self) -> list[tuple[VertexId, VertexId]]:
        """All edges as ``(u, v)`` with ``u < v``, sorted."""
        return sorted((u, v) for u, nbrs in self._adj.items() for v in nbrs if u < v)

    def min_degree(self) -> int:
        return min((len(n) for n in self._adj.values()), default=0)

    def max_degree(self) -> int:
        return max((len(n) for n in self._adj.values()), default=0)

    # ------------------------------------------------------------------
    # Mutation primitives (all return new graphs)
    # ------------------------------------------------------------------

    def remove_vertex(self, v: VertexId) -> Graph:
        """Drop ``v`` and its incident edges."""
        return self.remove_vertices((v,))

    def remove_vertices(self, vs: Iterable[VertexId]) -> Graph:
        gone = set(vs)
        missing = gone - self._adj.keys()
        if missing:
            raise KeyError(f"vertices not in graph: {sorted(missing)}")
        adj = {
            u: (nbrs - gone if nbrs & gone else nbrs)
            for u, nbrs in self._adj.items()
            if u not in gone
        }
        return Graph._trusted(adj)

    def merge_vertices(
        self, u: VertexId, v: VertexId
    ) -> tuple[Graph, MergeRecord] | Contradiction:
        """Identify ``u`` and ``v``; the smaller id survives.

        Adjacent vertices cannot share a color, so merging them yields a
        ``Contradiction`` instead of a graph with a self-loop.
        """
        if u == v:
            raise ValueError(f"cannot merge vertex {u} with itself")
        if u not in self._adj or v not in self._adj:
            raise KeyError(f"merge endpoints must be in graph: {u}, {v}")
        if v in self._adj[u]:
            return Contradiction(min(u, v), max(u, v))
        survivor, absorbed = min(u, v), max(u, v)
        union = self._adj[survivor] | self._adj[absorbed]
        adj = dict(self._adj)
        del adj[absorbed]
        adj[survivor] = union
        for w in self._adj[absorbed]:
            adj[w] = (adj[w] - {absorbed}) | {survivor}
        return Graph._trusted(adj), MergeRecord(survivor=survivor, absorbed=absorbed)

    def induced_subgraph(self, s: Iterable[VertexId]) -> Graph:
        keep = frozenset(s)
        missing = keep - self._adj.keys()
        if missing:
            raise KeyError(f"vertices not in graph: {sorted(missing)}")
        return Graph._trusted({v: self._adj[v] & keep for v in keep})

    # ------------------------------------------------------------------
    # Components
    # ------------------------------------------------------------------

    def components_where(self, pred: Callable[[VertexId], bool]) -> list[frozenset[VertexId]]:
        """Connected components of the subgraph induced by vertices satisfying ``pred``.

        Components come out ordered by their smallest vertex id.
        """
        view = nx.subgraph_view(self.to_networkx(), filter_node=pred)
        return sorted((frozenset(c) for c in nx.connected_components(view)), key=min)

    def components(self) -> list[frozenset[VertexId]]:
        return self.components_where(lambda _: True)

    # ------------------------------------------------------------------
    # Checks and conversion
    # ------------------------------------------------------------------

    def validate(self) -> None:
        """Raise ``GraphInvariantError`` unless the adjacency is symmetric and loop-free."""
        for v, nbrs in self._adj.items():
            if v in nbrs:
                raise GraphInvariantError(f"self-loop on vertex {v}")
            for w in nbrs:
                if w not in self._adj:
                    raise GraphInvariantError(f"edge {v}-{w} leaves the vertex set")
                if v not in self._adj[w]:
                    raise GraphInvariantError(f"edge {v}-{w} is not symmetric")
        if sum(len(n) for n in self._adj.values()) != 2 * self._m:
            raise GraphInvariantError("cached edge count is stale")

    def to_networkx(self) -> nx.Graph:
        out = nx.Graph()
        out.add_nodes_from(sorted(self._adj))
        out.add_edges_from(self.edges())
        return out

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> Graph:
        """Build from a networkx graph, relabelling nodes to ``0..n-1`` in sorted order."""
        nodes = sorted(g.nodes())
        index = {node: i for i, node in enumerate(nodes)}
        return cls.from_edges(
            ((index[u], index[v]) for u, v in g.edges() if u != v), vertices=range(len(nodes))
        )

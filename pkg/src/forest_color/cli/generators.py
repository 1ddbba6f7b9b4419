"""Instance generators: random min-degree-3 graphs, the worst-case family and named fixtures.

Specs are written ``kind:key=value,...`` on the command line, for example
``random-min-degree-3:size=30,seed=7,density=0.1`` or
``figure-fixture:name=petersen``.
"""

from __future__ import annotations

import random
from typing import Callable, Iterable, Literal, Mapping

import networkx as nx
from pydantic import BaseModel, Field, ValidationError, model_validator

from forest_color.graph import Graph

GeneratorKind = Literal["random-min-degree-3", "worst-case-family", "figure-fixture"]


class GeneratorSpec(BaseModel):
    """What to generate. ``size`` is the vertex count, or the copy count for the worst case."""

    kind: GeneratorKind
    size: int | None = Field(default=None, ge=1)
    seed: int = 0
    density: float = Field(default=0.1, ge=0.0, le=1.0)
    name: str | None = None

    @model_validator(mode="after")
    def _check_kind(self) -> GeneratorSpec:
        if self.kind == "random-min-degree-3" and (self.size is None or self.size < 4):
            raise ValueError("random-min-degree-3 needs size >= 4")
        if self.kind == "figure-fixture":
            if self.name not in FIXTURES:
                raise ValueError(f"unknown fixture {self.name!r}; known: {sorted(FIXTURES)}")
        return self


def parse_spec(text: str) -> GeneratorSpec:
    """Parse ``kind:key=value,...``.

    Raises:
        ValueError: on malformed text or invalid parameters.
    """
    kind, _, rest = text.partition(":")
    params: dict[str, str] = {}
    for item in filter(None, (p.strip() for p in rest.split(","))):
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ValueError(f"expected key=value, got {item!r}")
        params[key.strip()] = value.strip()
    try:
        return GeneratorSpec.model_validate({"kind": kind.strip(), **params})
    except ValidationError as exc:
        first = exc.errors()[0]
        where = ".".join(str(p) for p in first["loc"]) or "spec"
        raise ValueError(f"invalid generator spec ({where}): {first['msg']}") from None


def generate(spec: GeneratorSpec) -> Graph:
    if spec.kind == "random-min-degree-3":
        assert spec.size is not None
        return random_min_degree_3(spec.size, seed=spec.seed, density=spec.density)
    if spec.kind == "worst-case-family":
        return worst_case_family(spec.size or 1)
    assert spec.name is not None
    return FIXTURES[spec.name]()


# ---------------------------------------------------------------------------
# Random graphs
# ---------------------------------------------------------------------------


def random_min_degree_3(n: int, *, seed: int = 0, density: float = 0.1) -> Graph:
    """G(n, p) padded with random edges until every vertex has degree three or more."""
    if n < 4:
        raise ValueError(f"min degree 3 needs at least 4 vertices, got {n}")
    g = nx.gnp_random_graph(n, density, seed=seed)
    rng = random.Random(seed)
    for v in range(n):
        while g.degree(v) < 3:
            options = [w for w in range(n) if w != v and not g.has_edge(v, w)]
            g.add_edge(v, rng.choice(options))
    return Graph.from_networkx(g)


# ---------------------------------------------------------------------------
# Worst-case family
# ---------------------------------------------------------------------------

# Per-copy vertices besides the root: four leaves, six high-magnitude vertices,
# six unreached vertices, two vertices seeing only high-magnitude vertices and
# one connector shared with the next copy.
_COPY_LOCAL = (
    "l2", "l3", "l4", "l5",
    "h6", "h7", "h8", "h9", "h10", "h11",
    "u14", "u15", "u16", "u17", "u18", "u19",
    "p24", "p25",
    "x",
)  # fmt: skip

_COPY_EDGES = (
    ("r", "l2"), ("r", "l3"), ("r", "l4"), ("r", "l5"),
    ("l2", "h6"), ("l2", "h7"), ("l3", "h8"), ("l3", "h9"), ("l4", "h10"), ("l4", "h11"),
    ("h6", "u15"), ("h6", "p24"), ("h6", "u18"),
    ("h7", "u14"), ("h7", "p25"), ("h7", "u19"),
    ("h8", "u14"), ("h8", "p24"), ("h8", "u17"),
    ("h9", "u15"), ("h9", "p25"), ("h9", "u16"),
    ("h10", "u16"), ("h10", "p24"), ("h10", "u19"),
    ("h11", "u17"), ("h11", "p25"), ("h11", "u18"),
    ("u14", "u15"), ("u16", "u17"),
)  # fmt: skip


def worst_case_family(copies: int) -> Graph:
    """``copies`` worst-case bushy trees chained into a ring through their connectors.

    Roots get ids ``0..copies-1`` so the greedy forest picks them first. Each
    copy partitions as one root, four leaves, six high-magnitude vertices seen
    by one tree and two vertices whose neighbors are all high-magnitude.
    """
    if copies < 1:
        raise ValueError(f"copies must be positive, got {copies}")
    ids: dict[tuple[str, int], int] = {("r", k): k for k in range(copies)}
    for k in range(copies):
        for offset, name in enumerate(_COPY_LOCAL):
            ids[(name, k)] = copies + len(_COPY_LOCAL) * k + offset
    edges = [(ids[(a, k)], ids[(b, k)]) for k in range(copies) for a, b in _COPY_EDGES]
    for k in range(copies):
        nxt = (k + 1) % copies
        for name, copy in (("l5", k), ("l5", nxt), ("u18", k), ("u19", nxt)):
            if (ids[("x", k)], ids[(name, copy)]) not in edges:
                edges.append((ids[("x", k)], ids[(name, copy)]))
    if copies == 1:
        # A single connector sees the lone leaf once; lift that leaf to degree three.
        edges.append((ids[("l5", 0)], ids[("l2", 0)]))
    return Graph.from_edges(edges)


# ---------------------------------------------------------------------------
# Named fixtures
# ---------------------------------------------------------------------------


def _labelled(edges: Iterable[tuple[object, object]], first: Iterable[object] = ()) -> Graph:
    """Graph over the given labels; ``first`` labels get the smallest ids, in order."""
    edges = list(edges)
    order: list[object] = list(first)
    for u, v in edges:
        for x in (u, v):
            if x not in order:
                order.append(x)
    index = {x: i for i, x in enumerate(order)}
    return Graph.from_edges(((index[u], index[v]) for u, v in edges), vertices=range(len(order)))


def wheel(spokes: int) -> Graph:
    """Hub 0 joined to every vertex of a cycle ``1..spokes``."""
    rim = [(i, i % spokes + 1) for i in range(1, spokes + 1)]
    return Graph.from_edges([(0, i) for i in range(1, spokes + 1)] + rim)


def degree3_tree() -> Graph:
    """Nine degree-3 vertices forming a tree, the rest padded by an octahedron.

    The tree's centre ``v`` gets id 0.
    """
    tree = [("v", 2), (2, 3), (2, 4), ("v", 5), (5, 6), ("v", 7), (7, 8), (7, 9)]
    octahedron = [
        (f"o{a}", f"o{b}") for a in range(6) for b in range(a + 1, 6) if b != a + 1 or a % 2
    ]
    attach = [
        (3, "o0"), (3, "o2"), (4, "o0"), (4, "o2"), (6, "o1"), (6, "o3"),
        (5, "o4"), (8, "o2"), (8, "o4"), (9, "o3"), (9, "o5"),
    ]  # fmt: skip
    return _labelled(tree + octahedron + attach, first=["v"])


def two_internal_tree() -> Graph:
    """A single bushy tree with two internal vertices, its neighbors and an outer ring."""
    edges = [
        ("i1", "i2"), ("i1", "l1"), ("i1", "l2"), ("i1", "l3"),
        ("i2", "l4"), ("i2", "l5"), ("i2", "l6"),
        ("l3", "l4"), ("l1", "l6"),
        ("l1", "u1"), ("l1", "u2"), ("l2", "u2"), ("l2", "u6"), ("l3", "u6"), ("l3", "u5"),
        ("l4", "u8"), ("l4", "u7"), ("l5", "u7"), ("l5", "u3"), ("l6", "u3"), ("l6", "u4"),
        ("u1", "u4"), ("u5", "u8"), ("u2", "u9"), ("u1", "u9"), ("u3", "u10"), ("u4", "u10"),
        ("u6", "u11"), ("u5", "u11"), ("u7", "u12"), ("u8", "u12"),
        ("u9", "u10"), ("u11", "u12"),
    ]  # fmt: skip
    first = ["i1", "i2", *(f"l{i}" for i in range(1, 7)), *(f"u{i}" for i in range(1, 13))]
    return _labelled(edges, first=first)


def _numbered(edges: Iterable[tuple[int, int]]) -> Graph:
    edges = list(edges)
    labels = sorted({x for e in edges for x in e})
    return _labelled(edges, first=labels)


def split_tree() -> Graph:
    """Two-internal tree with a high-magnitude vertex at one leaf."""
    return _numbered(
        [(1, 2), (2, 3), (2, 5), (2, 7), (3, 4), (3, 6), (3, 8), (1, 9), (9, 10), (9, 11), (9, 12)]
    )


def wide_tree() -> Graph:
    """Five-leaf star with a high-magnitude vertex at one leaf."""
    return _numbered([(1, 2), (2, 3), (2, 5), (2, 7), (2, 4), (1, 9), (9, 10), (9, 11), (9, 12)])


def far_pair() -> Graph:
    """Star with two high-magnitude vertices sharing no neighbor."""
    return _numbered(
        [
            (1, 2), (2, 3), (2, 4), (2, 5), (3, 6), (6, 7), (6, 8), (6, 9),
            (1, 10), (10, 11), (10, 12), (10, 13),
        ]  # fmt: skip
    )


def adjacent_pair() -> Graph:
    """Star with two adjacent high-magnitude vertices sharing no other neighbor."""
    return _numbered(
        [
            (1, 2), (1, 3), (1, 4), (1, 5), (3, 6), (5, 7), (6, 7),
            (6, 8), (6, 10), (7, 9), (7, 11),
        ]  # fmt: skip
    )


_PETERSEN_EDGES = (
    (1, 2), (1, 3), (1, 4), (2, 7), (2, 9), (3, 5), (3, 10), (4, 6), (4, 8),
    (5, 6), (6, 9), (9, 10), (10, 8), (8, 7), (5, 7),
)  # fmt: skip


def petersen() -> Graph:
    """Claw at vertex 0 whose six candidate grandchildren form a hexagon."""
    return _numbered(_PETERSEN_EDGES)


def hexagon_boundary() -> Graph:
    """The hexagon configuration hung off three leaves of one bushy tree.

    The bushy root gets id 0. A fourth leaf leads into a small padding block
    that forms its own bushy tree, so every vertex has degree three or more.
    """
    edges: list[tuple[object, object]] = list(_PETERSEN_EDGES)
    edges += [(11, 10), (11, 3), (12, 6), (12, 4), (13, 7), (13, 2)]
    edges += [("root", 11), ("root", 12), ("root", 13), ("root", 15), (15, 11)]
    edges += [(15, "p"), ("p", "x"), ("p", "y"), ("x", "y")]
    edges += [("x", "z"), ("x", "w"), ("y", "z"), ("y", "w"), ("z", "w")]
    first = ["root", *range(1, 14), 15, "p", "x", "y", "z", "w"]
    return _labelled(edges, first=first)


FIXTURES: Mapping[str, Callable[[], Graph]] = {
    "even-wheel": lambda: wheel(4),
    "odd-wheel": lambda: wheel(5),
    "degree3-tree": degree3_tree,
    "two-internal-tree": two_internal_tree,
    "split-tree": split_tree,
    "wide-tree": wide_tree,
    "far-pair": far_pair,
    "adjacent-pair": adjacent_pair,
    "petersen": petersen,
    "hexagon-boundary": hexagon_boundary,
    "worst-case-tree": lambda: worst_case_family(1),
}

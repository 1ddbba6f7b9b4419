"""Shared graph builders, hypothesis strategies and the exhaustive CSP oracle."""

from __future__ import annotations

import itertools
import random

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from forest_color.base import Color
from forest_color.csp import CspInstance
from forest_color.graph import Graph

PROPERTY_SETTINGS = settings(
    max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)


def complete(n: int) -> Graph:
    return Graph.from_edges(itertools.combinations(range(n), 2), vertices=range(n))


def cycle(n: int) -> Graph:
    return Graph.from_edges(((i, (i + 1) % n) for i in range(n)), vertices=range(n))


def path(n: int) -> Graph:
    return Graph.from_edges(((i, i + 1) for i in range(n - 1)), vertices=range(n))


def random_graph(n: int, density: float, seed: int) -> Graph:
    rng = random.Random(seed)
    edges = [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < density]
    return Graph.from_edges(edges, vertices=range(n))


def csp_oracle(csp: CspInstance) -> dict[int, Color] | None:
    """First satisfying assignment in lexicographic order, by full enumeration."""
    if csp.is_unsat:
        return None
    variables = sorted(csp.domains)
    for combo in itertools.product(*(sorted(csp.domains[v]) for v in variables)):
        assignment = dict(zip(variables, combo))
        if csp.satisfied_by(assignment):
            return assignment
    return None


@st.composite
def graphs(draw: st.DrawFn, min_n: int = 1, max_n: int = 9) -> Graph:
    n = draw(st.integers(min_value=min_n, max_value=max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges((p for p, keep in zip(pairs, mask) if keep), vertices=range(n))


@st.composite
def csp_instances(draw: st.DrawFn, max_vars: int = 8) -> CspInstance:
    n = draw(st.integers(min_value=0, max_value=max_vars))
    domains = {
        v: draw(st.sets(st.sampled_from(list(Color)), min_size=1, max_size=3)) for v in range(n)
    }
    choices = [(v, c) for v in range(n) for c in sorted(domains[v])]
    pairs = [(p, q) for p, q in itertools.combinations(choices, 2) if p[0] != q[0]]
    conflicts = draw(st.lists(st.sampled_from(pairs), max_size=3 * n)) if pairs else []
    return CspInstance.build(domains, conflicts)

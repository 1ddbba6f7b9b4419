"""Tests for the (3,2)-CSP backend."""

import random

import pytest
from hypothesis import given

from forest_color.base import Color
from forest_color.csp import (
    Committed,
    CspInstance,
    eliminate_small_domains,
    from_partial_coloring,
    solve,
)
from forest_color.reduce import Instance
from forest_color.solver.oracle import verify_coloring
from tests.conftest import PROPERTY_SETTINGS, complete, csp_instances, csp_oracle, cycle

R, G, B = Color.RED, Color.GREEN, Color.BLUE
ALL = {R, G, B}


def random_csp(rng: random.Random, n: int) -> CspInstance:
    domains = {v: rng.sample(sorted(ALL), rng.randint(1, 3)) for v in range(n)}
    choices = [(v, c) for v in range(n) for c in domains[v]]
    conflicts = []
    for _ in range(rng.randint(0, 3 * n) if len(choices) >= 2 else 0):
        p, q = rng.sample(choices, 2)
        if p[0] != q[0]:
            conflicts.append((p, q))
    return CspInstance.build(domains, conflicts)


class TestBuild:
    def test_empty_domain_is_unsat(self):
        """Test an empty domain makes the whole instance UNSAT."""
        assert CspInstance.build({0: []}, []).is_unsat

    def test_stale_conflicts_dropped(self):
        """Test conflicts on colors outside the domain are pruned."""
        csp = CspInstance.build({0: [R], 1: [R, G]}, [((0, G), (1, G)), ((0, R), (1, R))])
        assert csp.conflicts == frozenset({((0, R), (1, R))})

    def test_same_variable_conflicts_dropped(self):
        """Test a conflict within one variable is ignored."""
        csp = CspInstance.build({0: [R, G]}, [((0, R), (0, G))])
        assert csp.conflicts == frozenset()

    def test_conflicts_normalized(self):
        """Test conflict pairs are stored in sorted order."""
        a = CspInstance.build({0: [R], 1: [R]}, [((1, R), (0, R))])
        b = CspInstance.build({0: [R], 1: [R]}, [((0, R), (1, R))])
        assert a == b


class TestFromPartialColoring:
    def test_triangle_with_one_fixed(self):
        """Test fixing one triangle vertex leaves two 2-color domains and two conflicts."""
        inst = Instance.from_graph(complete(3)).with_fixed({0: R})
        csp = from_partial_coloring(inst)
        assert csp.domains == {1: frozenset({G, B}), 2: frozenset({G, B})}
        assert csp.conflicts == frozenset({((1, G), (2, G)), ((1, B), (2, B))})

    def test_isolated_vertex(self):
        """Test an isolated uncolored vertex keeps all three colors."""
        csp = from_partial_coloring(Instance.from_graph(complete(1)))
        assert csp.domains == {0: frozenset(ALL)}
        assert csp.conflicts == frozenset()

    def test_k4_with_one_fixed_unsat(self):
        """Test K4 with one fixed vertex has no solution."""
        inst = Instance.from_graph(complete(4)).with_fixed({0: R})
        assert solve(from_partial_coloring(inst)) is None


class TestElimination:
    def test_unit_propagation(self):
        """Test a one-color variable strikes the conflicting color of its neighbor."""
        csp = CspInstance.build({0: [R], 1: [R, G, B], 2: [R, G, B]}, [((0, R), (1, R))])
        reduction = eliminate_small_domains(csp)
        assert reduction.steps[0] == Committed(var=0, color=R)
        assert 1 not in reduction.instance.domains

    def test_direct_unit_conflict_unsat(self):
        """Test two single-color variables in conflict are UNSAT."""
        csp = CspInstance.build({0: [R], 1: [R]}, [((0, R), (1, R))])
        assert eliminate_small_domains(csp).instance.is_unsat

    def test_even_binary_cycle_eliminated(self):
        """Test a ring of two-color variables collapses entirely and back-substitutes."""
        n = 6
        domains = {v: [R, G] for v in range(n)}
        conflicts = [((v, c), ((v + 1) % n, c)) for v in range(n) for c in (R, G)]
        csp = CspInstance.build(domains, conflicts)
        reduction = eliminate_small_domains(csp)
        assert not reduction.instance.is_unsat
        assert reduction.instance.domains == {}
        assert csp.satisfied_by(reduction.back_substitute({}))

    def test_odd_binary_cycle_unsat(self):
        """Test an odd ring of two-color variables is UNSAT."""
        n = 5
        domains = {v: [R, G] for v in range(n)}
        conflicts = [((v, c), ((v + 1) % n, c)) for v in range(n) for c in (R, G)]
        assert solve(CspInstance.build(domains, conflicts)) is None

    @PROPERTY_SETTINGS
    @given(csp_instances())
    def test_equisatisfiable(self, csp):
        """Test elimination keeps the status and back-substitution stays valid."""
        reduction = eliminate_small_domains(csp)
        reduced = reduction.instance
        assert all(len(cs) == 3 for cs in reduced.domains.values())
        before = csp_oracle(csp)
        after = csp_oracle(reduced)
        assert (before is None) == (after is None)
        if after is not None:
            assert csp.satisfied_by(reduction.back_substitute(after))


class TestSolve:
    def test_empty_instance(self):
        """Test the empty instance is SAT with an empty assignment."""
        found = solve(CspInstance.build({}, []))
        assert found is not None
        assert found.assignment == {}

    def test_odd_cycle_colorable(self):
        """Test C5 gets a proper 3-coloring."""
        found = solve(from_partial_coloring(Instance.from_graph(cycle(5))))
        assert found is not None
        assert verify_coloring(cycle(5), found.assignment) is None

    def test_k4_unsat(self):
        """Test K4 is not 3-colorable."""
        assert solve(from_partial_coloring(Instance.from_graph(complete(4)))) is None

    def test_node_callback(self):
        """Test the node callback fires at least once per call."""
        nodes = []
        csp = from_partial_coloring(Instance.from_graph(cycle(5)))
        solve(csp, on_node=lambda: nodes.append(1))
        assert nodes

    def test_deterministic(self):
        """Test repeated solves return the same assignment."""
        csp = from_partial_coloring(Instance.from_graph(cycle(7)))
        assert solve(csp) == solve(csp)

    def test_random_instances_match_oracle(self):
        """Test 200 random instances with up to twelve variables against full enumeration."""
        rng = random.Random(20240601)
        for _ in range(200):
            csp = random_csp(rng, rng.randint(0, 12))
            found = solve(csp)
            expected = csp_oracle(csp)
            assert (found is None) == (expected is None)
            if found is not None:
                assert csp.satisfied_by(found.assignment)


def test_restrict_outside_domain():
    """Test restricting a variable to a missing color is UNSAT."""
    csp = CspInstance.build({0: [R, G]}, [])
    assert csp.restrict(0, B).is_unsat


def test_unknown_color_rejected():
    """Test a domain value outside the three colors is rejected."""
    with pytest.raises(ValueError, match="not a valid"):
        CspInstance.build({0: [0, 3]}, [])

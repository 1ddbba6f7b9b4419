"""End-to-end tests of the 3-coloring pipeline against the brute-force oracle."""

import networkx as nx
import pytest
from hypothesis import given

from forest_color.base import SolverConfig
from forest_color.cli.generators import (
    FIXTURES,
    hexagon_boundary,
    random_min_degree_3,
    worst_case_family,
)
from forest_color.graph import Graph
from forest_color.solver import NotColorable, solve_3coloring
from forest_color.solver.oracle import brute_force, verify_coloring
from forest_color.solver.stats import NullStatsSink
from tests.conftest import PROPERTY_SETTINGS, complete, cycle, graphs, random_graph


def agrees_with_oracle(g: Graph, config: SolverConfig | None = None) -> bool:
    result = solve_3coloring(g, config)
    expected = brute_force(g, cap=max(g.n, 20)) is not None
    if result.colorable:
        assert verify_coloring(g, result.coloring) is None
    return result.colorable == expected


class RecordingSink(NullStatsSink):
    def __init__(self) -> None:
        self.events: list[str] = []

    def on_component(self, vertices: int) -> None:
        self.events.append("component")

    def on_branch(self, vertex: int, children: int) -> None:
        self.events.append("branch")

    def on_assignment(self) -> None:
        self.events.append("assignment")


class TestSmallGraphs:
    def test_atlas(self):
        """Test every graph with up to seven vertices against the oracle."""
        for nxg in nx.graph_atlas_g()[1:]:
            g = Graph.from_networkx(nxg)
            assert agrees_with_oracle(g), nx.to_edgelist(nxg)

    def test_empty_graph(self):
        """Test the empty graph is colorable with no colors used."""
        result = solve_3coloring(Graph())
        assert result.colorable
        assert result.coloring == {}

    def test_k4(self):
        """Test K4 is reported not colorable."""
        result = solve_3coloring(complete(4))
        assert result.status == NotColorable()
        assert result.coloring is None

    def test_component_with_k4(self):
        """Test one K4 component makes the whole graph not colorable."""
        g = Graph.from_edges(list(complete(4).edges()) + [(4, 5), (5, 6), (4, 6)])
        assert not solve_3coloring(g).colorable

    def test_isolated_vertices(self):
        """Test isolated vertices are colored too."""
        g = Graph.from_edges([(0, 1)], vertices=range(4))
        result = solve_3coloring(g)
        assert set(result.coloring) == {0, 1, 2, 3}


class TestRandomGraphs:
    @pytest.mark.parametrize("seed", range(40))
    def test_dense_random(self, seed):
        """Test seeded random graphs near the colorability threshold."""
        g = random_graph(8 + seed % 9, 0.3 + 0.005 * seed, seed)
        assert agrees_with_oracle(g)

    @pytest.mark.parametrize("density", [0.1, 0.2, 0.3, 0.5])
    def test_density_sweep(self, density):
        """Test 250 graphs of 8 to 20 vertices at each density."""
        for seed in range(250):
            n = 8 + seed % 13
            assert agrees_with_oracle(random_graph(n, density, seed)), (n, density, seed)

    @pytest.mark.parametrize("seed", range(200))
    def test_g18_quarter_density(self, seed):
        """Test G(18, 0.25) at fixed seeds against the oracle."""
        assert agrees_with_oracle(random_graph(18, 0.25, seed))

    @pytest.mark.parametrize("seed", range(10))
    def test_min_degree_3(self, seed):
        """Test random graphs of minimum degree three, where the forests do the work."""
        assert agrees_with_oracle(random_min_degree_3(16, seed=seed, density=0.15))

    @PROPERTY_SETTINGS
    @given(graphs(min_n=4, max_n=11))
    def test_matches_oracle(self, g):
        """Test arbitrary small graphs against the oracle."""
        assert agrees_with_oracle(g)

    @PROPERTY_SETTINGS
    @given(graphs(min_n=4, max_n=11))
    def test_dominated_elimination_matches_oracle(self, g):
        """Test the dominated-vertex rule keeps every answer."""
        assert agrees_with_oracle(g, SolverConfig(dominated_elimination=True))


class TestFixtures:
    @pytest.mark.parametrize("name", sorted(FIXTURES))
    def test_fixture(self, name):
        """Test each named fixture against the oracle."""
        assert agrees_with_oracle(FIXTURES[name]())

    def test_odd_wheel_not_colorable(self):
        """Test a wheel with five spokes needs four colors."""
        assert not solve_3coloring(FIXTURES["odd-wheel"]()).colorable

    def test_hexagon_set_aside(self):
        """Test the closed configuration is colored after the enumeration."""
        result = solve_3coloring(hexagon_boundary())
        assert result.colorable
        assert result.stats.trivial_configurations >= 1

    @pytest.mark.parametrize("copies", [2, 3])
    def test_worst_case_family(self, copies):
        """Test worst-case copies solve with a verified coloring."""
        g = worst_case_family(copies)
        result = solve_3coloring(g, SolverConfig(strict_partition=True))
        if result.colorable:
            assert verify_coloring(g, result.coloring) is None
        assert result.stats.partitions


class TestConfig:
    @pytest.mark.parametrize("seed", range(5))
    def test_jobs_agree(self, seed):
        """Test worker threads give the same answer as a single thread."""
        g = random_min_degree_3(18, seed=seed, density=0.2)
        one = solve_3coloring(g)
        many = solve_3coloring(g, SolverConfig(jobs=3))
        assert one.colorable == many.colorable

    def test_exhaustive_agrees(self):
        """Test exhaustive mode reaches the same answer and does at least as much work."""
        g = random_min_degree_3(14, seed=3)
        first = solve_3coloring(g)
        full = solve_3coloring(g, SolverConfig(exhaustive=True))
        assert first.colorable == full.colorable
        assert full.stats.enumerated_assignments >= first.stats.enumerated_assignments

    @pytest.mark.parametrize("exhaustive", [False, True])
    def test_repeat_run_same_stats(self, exhaustive):
        """Test solving one graph twice on one thread gives the same counters."""
        g = random_min_degree_3(20, seed=5, density=0.15)
        config = SolverConfig(jobs=1, exhaustive=exhaustive)
        first, second = (solve_3coloring(g, config).stats.flat() for _ in range(2))
        first.pop("search.wall_time")
        second.pop("search.wall_time")
        assert first == second

    def test_bad_jobs(self):
        """Test a non-positive worker count is rejected."""
        with pytest.raises(ValueError, match="jobs must be at least 1"):
            SolverConfig(jobs=0)


class TestStats:
    def test_counters(self):
        """Test counters stay within the enumeration bound."""
        g = random_min_degree_3(20, seed=11)
        stats = solve_3coloring(g, SolverConfig(exhaustive=True)).stats
        assert stats.components == len(g.components())
        assert stats.enumerated_assignments <= stats.assignment_bound
        assert stats.csp_calls == stats.enumerated_assignments
        assert stats.wall_time >= 0

    def test_flat_view(self):
        """Test the flat view carries the schema version and dotted keys."""
        flat = solve_3coloring(worst_case_family(2)).stats.flat()
        assert flat["schema_version"] == 1
        assert "search.branch_nodes" in flat
        assert flat["partition.R"] == 2

    def test_extra_sink(self):
        """Test an extra sink sees the same events the collector counts."""
        sink = RecordingSink()
        result = solve_3coloring(cycle(5), sink=sink)
        assert sink.events.count("component") == result.stats.components == 1
        assert sink.events.count("assignment") == result.stats.enumerated_assignments

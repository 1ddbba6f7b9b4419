"""Tests for the brute-force oracle and the coloring checker."""

import pytest
from hypothesis import given

from forest_color.base import Color
from forest_color.solver.oracle import OracleCapExceededError, brute_force, verify_coloring
from tests.conftest import PROPERTY_SETTINGS, complete, cycle, graphs, path

R, G, B = Color.RED, Color.GREEN, Color.BLUE


class TestVerifyColoring:
    def test_proper(self):
        """Test a proper coloring of C4 passes."""
        assert verify_coloring(cycle(4), {0: R, 1: G, 2: R, 3: G}) is None

    def test_monochromatic_edge(self):
        """Test the first monochromatic edge is reported."""
        found = verify_coloring(path(3), {0: R, 1: G, 2: G})
        assert found is not None
        assert found.edge == (1, 2)
        assert str(found) == "edge 1-2 is monochromatic"

    def test_uncolored_vertex(self):
        """Test a missing vertex is reported."""
        found = verify_coloring(path(3), {0: R, 2: G})
        assert found is not None
        assert found.vertex == 1

    def test_invalid_color(self):
        """Test a value outside the three colors is reported."""
        found = verify_coloring(path(2), {0: R, 1: 5})
        assert found is not None
        assert "invalid color" in found.reason

    def test_plain_ints_accepted(self):
        """Test integer colors are accepted like Color members."""
        assert verify_coloring(path(2), {0: 0, 1: 2}) is None


class TestBruteForce:
    def test_k4(self):
        """Test K4 is not 3-colorable."""
        assert brute_force(complete(4)) is None

    def test_odd_cycle(self):
        """Test C7 is 3-colorable."""
        coloring = brute_force(cycle(7))
        assert coloring is not None
        assert verify_coloring(cycle(7), coloring) is None

    def test_empty_graph(self):
        """Test the empty graph has the empty coloring."""
        assert brute_force(complete(0)) == {}

    def test_cap(self):
        """Test graphs above the cap are refused."""
        with pytest.raises(OracleCapExceededError, match="oracle cap is 4"):
            brute_force(cycle(5), cap=4)

    @PROPERTY_SETTINGS
    @given(graphs(max_n=10))
    def test_results_are_proper(self, g):
        """Test every coloring returned is proper."""
        coloring = brute_force(g)
        if coloring is not None:
            assert verify_coloring(g, coloring) is None

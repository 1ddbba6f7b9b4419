"""Tests for DIMACS reading and writing."""

import pytest
from hypothesis import given

from forest_color.cli.dimacs import DimacsParseError, parse_dimacs, read_dimacs, write_dimacs
from tests.conftest import PROPERTY_SETTINGS, complete, graphs


class TestParse:
    def test_triangle(self):
        """Test a triangle with a comment line."""
        g = parse_dimacs("c triangle\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n")
        assert g == complete(3)

    def test_isolated_vertices_kept(self):
        """Test vertices without edges still exist."""
        g = parse_dimacs("p edge 4 1\ne 1 2\n")
        assert g.n == 4

    def test_duplicate_edges_collapse(self):
        """Test repeated edges in either direction are kept once."""
        parsed = read_dimacs("p edge 2 2\ne 1 2\ne 2 1\n")
        assert parsed.edges == ((1, 2),)
        assert parsed.m == 2

    def test_col_keyword(self):
        """Test the older ``p col`` header is accepted."""
        assert parse_dimacs("p col 2 1\ne 1 2\n").m == 1


class TestErrors:
    def test_self_loop(self):
        """Test a self-loop is reported on its line."""
        with pytest.raises(DimacsParseError, match="line 2: self-loop") as info:
            parse_dimacs("p edge 2 1\ne 1 1\n")
        assert info.value.line == 2

    def test_missing_header(self):
        """Test a file without a problem line is rejected."""
        with pytest.raises(DimacsParseError, match="missing 'p edge"):
            parse_dimacs("c nothing here\n")

    def test_edge_before_header(self):
        """Test an edge ahead of the problem line is rejected."""
        with pytest.raises(DimacsParseError, match="line 1: edge before"):
            parse_dimacs("e 1 2\np edge 2 1\n")

    def test_label_out_of_range(self):
        """Test a label above the declared vertex count is rejected."""
        with pytest.raises(DimacsParseError, match="outside 1..3"):
            parse_dimacs("p edge 3 1\ne 1 4\n")

    def test_not_an_integer(self):
        """Test a non-numeric label is rejected."""
        with pytest.raises(DimacsParseError, match="'x' is not an integer"):
            parse_dimacs("p edge 3 1\ne 1 x\n")

    def test_duplicate_header(self):
        """Test a second problem line is rejected."""
        with pytest.raises(DimacsParseError, match="line 2: duplicate"):
            parse_dimacs("p edge 2 0\np edge 2 0\n")

    def test_unknown_line(self):
        """Test an unknown line type is rejected."""
        with pytest.raises(DimacsParseError, match="unrecognized line type 'n'"):
            parse_dimacs("p edge 2 0\nn 1 5\n")

    def test_is_value_error(self):
        """Test parse errors are ValueErrors so callers can treat them as bad input."""
        assert issubclass(DimacsParseError, ValueError)


class TestWrite:
    def test_comment_and_header(self):
        """Test the writer emits comments, the header and 1-based edges."""
        text = write_dimacs(complete(3), comment="made in a test")
        assert text.splitlines() == ["c made in a test", "p edge 3 3", "e 1 2", "e 1 3", "e 2 3"]

    @PROPERTY_SETTINGS
    @given(graphs(max_n=12))
    def test_round_trip(self, g):
        """Test writing then parsing gives the graph back."""
        assert parse_dimacs(write_dimacs(g)) == g

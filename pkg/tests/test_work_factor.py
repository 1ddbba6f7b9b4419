"""Tests for work factors, rate expressions and per-root bases."""

import pytest
from hypothesis import given
from hypothesis import strategies as st
from pydantic import ValidationError

from forest_color.analysis import (
    CHROMATIC_BASE,
    BranchVector,
    RateTerm,
    parse_rate_terms,
    per_root_base,
    rate,
    schedule_rate,
    work_factor,
)
from tests.conftest import PROPERTY_SETTINGS

reductions = st.floats(min_value=0.5, max_value=20, allow_nan=False, allow_infinity=False)


class TestWorkFactor:
    def test_binary_unit_branching(self):
        """Test two branches removing one vertex each double the tree."""
        assert work_factor([1, 1]) == pytest.approx(2.0, abs=1e-9)

    def test_degree3_branching(self):
        """Test the (2, 6, 6) vector of degree-3 branching."""
        assert work_factor([2, 6, 6]) == pytest.approx(1.3022, abs=5e-4)

    def test_single_branch(self):
        """Test a single branch has work factor one."""
        assert work_factor([3]) == 1.0

    def test_accepts_branch_vector(self):
        """Test a BranchVector and a plain list give the same answer."""
        assert work_factor(BranchVector(reductions=[1, 2])) == work_factor([1, 2])

    def test_empty_vector_rejected(self):
        """Test an empty branch vector is rejected."""
        with pytest.raises(ValidationError, match="at least one entry"):
            work_factor([])

    @pytest.mark.parametrize("bad", [0, -1, float("inf")])
    def test_non_positive_rejected(self, bad):
        """Test zero, negative and infinite reductions are rejected."""
        with pytest.raises(ValidationError, match="positive and finite"):
            BranchVector(reductions=[1, bad])

    @PROPERTY_SETTINGS
    @given(st.lists(reductions, min_size=2, max_size=5), st.integers(min_value=0, max_value=4))
    def test_larger_reductions_never_slower(self, vector, index):
        """Test raising any reduction never raises the work factor."""
        bigger = list(vector)
        bigger[index % len(vector)] += 1.0
        assert work_factor(bigger) <= work_factor(vector) + 1e-9

    @PROPERTY_SETTINGS
    @given(st.lists(reductions, min_size=2, max_size=5))
    def test_root_of_characteristic_equation(self, vector):
        """Test the result solves ``sum(x ** -r) == 1``."""
        x = work_factor(vector)
        assert sum(x ** (-r) for r in vector) == pytest.approx(1.0, abs=1e-6)


class TestRate:
    def test_two_grandchild_pairs_below_chromatic_base(self):
        """Test four grandchildren, all CSP variables, stay under the chromatic base."""
        value = rate(parse_rate_terms("3*1.36443^4"), 8)
        assert value == pytest.approx(1.34003, abs=1e-4)
        assert value < CHROMATIC_BASE

    def test_five_grandchildren(self):
        """Test the two-child schedule of a five-grandchild tree."""
        value = rate(parse_rate_terms("3*1.36443^2 + 6*1.36443"), 9)
        assert value == pytest.approx(1.33830, abs=1e-4)

    def test_parse_defaults(self):
        """Test a bare base has coefficient and exponent one."""
        assert parse_rate_terms("2.5") == [RateTerm(coefficient=1, base=2.5, exponent=1)]

    def test_parse_error(self):
        """Test a malformed term names itself in the error."""
        with pytest.raises(ValueError, match="cannot parse rate term 'x\\^2'"):
            parse_rate_terms("3*1.2 + x^2")

    def test_tuples_accepted(self):
        """Test plain tuples work as terms."""
        assert rate([(4, 2, 1)], 3) == pytest.approx(2.0)

    def test_vertices_must_be_positive(self):
        """Test a zero vertex count is rejected."""
        with pytest.raises(ValueError, match="vertices must be positive"):
            rate([(1, 2, 1)], 0)


class TestScheduleRate:
    @pytest.mark.parametrize("grandchildren", range(6))
    def test_every_schedule_beats_chromatic_base(self, grandchildren):
        """Test each chromatic tree shape stays within the chromatic base."""
        assert schedule_rate(grandchildren) <= CHROMATIC_BASE

    def test_out_of_range(self):
        """Test six grandchildren are rejected."""
        with pytest.raises(ValueError, match="0..5"):
            schedule_rate(6)

    def test_worst_case_per_root(self):
        """Test the worst-case structure per root lands on the LP base."""
        assert per_root_base() == pytest.approx(1.3217, abs=1e-4)

    def test_bushy_root_alone(self):
        """Test a root with four leaves costs three over five vertices."""
        assert per_root_base({"R": 1, "L": 4}) == pytest.approx(3 ** (1 / 5))

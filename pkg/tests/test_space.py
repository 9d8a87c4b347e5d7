from __future__ import annotations

from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from conftest import COFINITE_SPACE, NAT_SPACE, UNIT, nat_sets, sample_points, unit_sets
from measure_modes.errors import DomainError, ParseError, UnsupportedSpaceError
from measure_modes.space import (
    Interval,
    NatSet,
    Space,
    boundary,
    canonicalize,
    closure,
    complement,
    difference,
    format_set,
    intersection,
    interior,
    is_bounded,
    is_closed,
    is_compact,
    is_open,
    parse_set,
    point_set_distance,
    union,
)

REAL = Space.real_line()
HALF = Space.real_line(1, float("inf"))


def real(text, space=REAL):
    return parse_set(text, space)


class TestCanonicalize:
    def test_merges_touching_half_open_pieces(self):
        assert real("(0,1/2] u (1/2,1)") == real("(0,1)")

    def test_merges_closed_overlap(self):
        assert real("[0,1] u [1,2]") == real("[0,2]")

    def test_nat_interval_and_point(self):
        assert parse_set("{3} u [1,2]", NAT_SPACE) == NatSet.finite(NAT_SPACE, [1, 2, 3])

    def test_open_intervals_meeting_at_a_point_stay_apart(self):
        a = real("(0,1) u (1,2)")
        assert len(a.intervals) == 2 and 1 not in a

    def test_isolated_point_absorbed_by_interval(self):
        a = real("[0,1] u {1/2}")
        assert a.points == () and a == real("[0,1]")

    def test_component_outside_domain(self):
        with pytest.raises(DomainError):
            canonicalize(UNIT, [Interval(F(1, 2), F(3, 2))])

    @given(unit_sets())
    def test_idempotent(self, a):
        assert canonicalize(UNIT, a.parts) == a


class TestTopology:
    def test_interior_of_closed_interval(self):
        assert interior(real("[1/3,2/3]", UNIT)) == real("(1/3,2/3)", UNIT)

    def test_boundary_of_half_open(self):
        assert boundary(real("(1/3,2/3]", UNIT)) == real("{1/3, 2/3}", UNIT)

    def test_closure_relative_to_open_domain(self):
        assert closure(real("(0,1/3]", UNIT)) == real("(0,1/3]", UNIT)

    def test_half_open_is_neither(self):
        a = real("(1/3,2/3]", UNIT)
        assert not is_open(a) and not is_closed(a)

    def test_cofinite_closure_of_evens_is_everything(self):
        evens = NatSet.periodic(COFINITE_SPACE, 2, [0])
        assert closure(evens) == COFINITE_SPACE.whole()
        assert interior(evens) == COFINITE_SPACE.empty()

    def test_cofinite_open_and_closed_sets(self):
        co = parse_set("co{1,2}", COFINITE_SPACE)
        assert is_open(co) and not is_closed(co)
        finite = parse_set("{1,2}", COFINITE_SPACE)
        assert is_closed(finite) and not is_open(finite)

    def test_discrete_nat_is_clopen(self):
        evens = NatSet.periodic(NAT_SPACE, 2, [0])
        assert is_open(evens) and is_closed(evens)

    def test_bounded_block(self):
        assert is_bounded(real("[5,6]", HALF))
        assert not is_bounded(HALF.whole())

    def test_compact(self):
        assert is_compact(real("[1,2]"))
        assert not is_compact(real("[1,2)"))
        assert not is_compact(real("(0,1/2]", UNIT))  # closed in (0,1) but not compact
        assert is_compact(NatSet.periodic(COFINITE_SPACE, 2, [0]))

    def test_boundedness_needs_a_metric(self):
        with pytest.raises(UnsupportedSpaceError):
            is_bounded(COFINITE_SPACE.whole())

    @given(unit_sets(), unit_sets())
    def test_de_morgan(self, a, b):
        assert complement(union(a, b)) == intersection(complement(a), complement(b))

    @given(unit_sets())
    def test_complement_involution(self, a):
        assert complement(complement(a)) == a

    @given(unit_sets())
    def test_boundary_is_closure_minus_interior_pointwise(self, a):
        b = boundary(a)
        c, i = closure(a), interior(a)
        for x in sample_points(1, 23):
            assert (x in b) == (x in c and x not in i)

    @given(unit_sets())
    def test_open_iff_complement_closed(self, a):
        assert is_open(a) == is_closed(complement(a))

    @given(nat_sets(COFINITE_SPACE), nat_sets(COFINITE_SPACE))
    def test_cofinite_nonempty_open_sets_meet(self, a, b):
        if is_open(a) and is_open(b) and not a.is_empty and not b.is_empty:
            assert not intersection(a, b).is_empty

    @given(nat_sets(), nat_sets())
    def test_nat_algebra_matches_membership(self, a, b):
        u, i, d = union(a, b), intersection(a, b), difference(a, b)
        for k in range(1, 61):
            assert (k in u) == (k in a or k in b)
            assert (k in i) == (k in a and k in b)
            assert (k in d) == (k in a and k not in b)


class TestDistance:
    @pytest.mark.parametrize("x, text, expected", [
        (F(1, 2), "[1,2]", F(1, 2)),
        (F(3, 2), "[1,2]", 0),
        (3, "(0,1) u {5}", 2),
    ])
    def test_examples(self, x, text, expected):
        assert point_set_distance(x, real(text)) == expected

    def test_zero_on_closure_only(self):
        a = real("(0,1)")
        assert point_set_distance(0, a) == 0 and 0 not in a

    def test_cofinite_rejected(self):
        with pytest.raises(UnsupportedSpaceError):
            point_set_distance(1, COFINITE_SPACE.whole())

    @given(unit_sets(), st.sampled_from(sample_points(1, 23)))
    def test_zero_iff_in_closure(self, a, x):
        if a.is_empty:
            return
        assert (point_set_distance(x, a) == 0) == (x in closure(a))


class TestSyntax:
    def test_round_trip_real(self):
        a = real("(0,1/3] u {2/3} u [0.9,1)", UNIT)
        assert parse_set(format_set(a), UNIT) == a

    def test_periodic_literal(self):
        evens = parse_set("per(2:{0})", NAT_SPACE)
        assert 4 in evens and 3 not in evens
        assert str(evens) == "per(2:{0})"

    def test_template_variable(self):
        assert parse_set("[n,n+1]", HALF, {"n": 4}) == real("[4,5]", HALF)

    def test_difference_operator(self):
        assert parse_set("all \\ {1}", COFINITE_SPACE) == parse_set("co{1}", COFINITE_SPACE)

    def test_cofinite_literal_rejected_on_real_line(self):
        with pytest.raises(ParseError):
            real("co{1}")

    def test_error_names_position(self):
        with pytest.raises(ParseError, match="expected"):
            real("[0,1")

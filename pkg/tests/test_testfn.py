from __future__ import annotations

from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import COFINITE_SPACE, HALF_LINE, NAT_SPACE, UNIT, sample_points
from measure_modes.errors import ParseError, UnsupportedSpaceError
from measure_modes.space import Space, closure, interior, parse_set, point_set_distance
from measure_modes.testfn import (
    FAMILIES,
    bump_over_closed,
    bump_under_open,
    certify_holder,
    constant,
    indicator,
    parse_function,
    random_family,
    truncate,
)

REAL = Space.real_line()


class TestBumps:
    def test_over_closed_interval(self):
        a = parse_set("[1/3,2/3]", UNIT)
        f = bump_over_closed(a, 12)
        assert f(F(1, 2)) == 1 and f(F(1, 3)) == 1
        assert f(F(1, 3) - F(1, 24)) == F(1, 2)
        assert f(F(1, 4)) == 0
        assert f.has("continuous", "compact_support", "holder") and f.holder == (1, 12)

    def test_under_open_interval(self):
        b = parse_set("(1/3,2/3)", UNIT)
        g = bump_under_open(b, 12)
        assert g(F(1, 2)) == 1 and g(F(1, 3)) == 0
        assert g(F(1, 3) + F(1, 24)) == F(1, 2)
        assert g.support() == parse_set("[1/3,2/3]", UNIT)

    def test_sandwich_around_indicator(self):
        a = parse_set("[1/3,2/3]", UNIT)
        lower, upper = bump_under_open(interior(a), 24), bump_over_closed(closure(a), 24)
        ind = indicator(a)
        for x in sample_points(1, 23):
            assert lower(x) <= ind(x) <= upper(x)

    def test_under_needs_a_deep_core(self):
        with pytest.raises(ValueError, match="deep"):
            bump_under_open(parse_set("(0,1/100)", UNIT), 10)

    def test_requires_topology_class(self):
        with pytest.raises(ValueError):
            bump_over_closed(parse_set("(0,1/2)", REAL), 4)
        with pytest.raises(UnsupportedSpaceError):
            bump_over_closed(parse_set("{1}", COFINITE_SPACE), 4)

    def test_nat_bump_is_indicator(self):
        a = parse_set("{2,5}", NAT_SPACE)
        f = bump_over_closed(a, 3)
        assert [f(k) for k in range(1, 7)] == [0, 1, 0, 0, 1, 0]

    @given(st.integers(1, 40), st.integers(0, 11), st.integers(1, 12))
    def test_over_closed_formula(self, n, i, width):
        lo, hi = F(i, 12), F(min(i + width, 12), 12)
        a = parse_set(f"[{lo},{hi}]", REAL)
        f = bump_over_closed(a, n)
        for x in sample_points(-12, 36):
            assert f(x) == max(F(0), 1 - n * point_set_distance(x, a))

    @settings(max_examples=25)
    @given(st.integers(1, 40))
    def test_monotone_envelopes(self, n):
        # over-closed bumps decrease toward 1_A and under-open bumps increase toward 1_B as n grows
        a, b = parse_set("[1/4,1/2]", UNIT), parse_set("(1/4,1/2)", UNIT)
        for x in sample_points(1, 23):
            assert bump_over_closed(a, n + 1)(x) <= bump_over_closed(a, n)(x)
            if n >= 8:
                assert bump_under_open(b, n + 1)(x) >= bump_under_open(b, n)(x)


class TestClassification:
    def test_indicator_of_half_open_is_measurable_only(self):
        f = indicator(parse_set("(1/3,2/3]", UNIT))
        assert f.in_family("M") and not f.in_family("Cb")
        assert f.discontinuities() == [F(1, 3), F(2, 3)]

    def test_inverse_tail_vanishes(self):
        f = parse_function("1/x", HALF_LINE)
        assert f.in_family("C0") and not f.in_family("Cc") and f.bound == 1

    def test_unbounded_function(self):
        f = parse_function("x**2", HALF_LINE)
        assert not f.has("bounded") and f.has("nonnegative", "continuous")

    def test_nat_inverse_is_c0(self):
        f = parse_function("1/x", NAT_SPACE)
        # every set is bounded under the discrete metric, but only finite sets are compact
        assert f.in_family("C0") and f.has("bounded_support") and not f.has("compact_support")

    def test_cofinite_constants_are_continuous(self):
        assert constant(COFINITE_SPACE, F(1, 2)).in_family("Cb")
        f = parse_function("pw[{1}: 1; else: 0]", COFINITE_SPACE)
        assert not f.has("continuous") and f.in_family("M")

    def test_holder_certification(self):
        f = parse_function("pw[(0,1/2]: 2*x; (1/2,1): 2-2*x]", UNIT)
        assert certify_holder(f, 1, 2)
        assert not certify_holder(f, 1, F(3, 2))
        sqrt_like = parse_function("x**2", UNIT)
        assert certify_holder(sqrt_like, F(1, 2), 2)

    def test_truncation_cuts_level_set(self):
        f = truncate(parse_function("x**2", HALF_LINE), 9)
        assert f(2) == 4 and f(3) == 0 and f(4) == 0

    def test_literal_errors(self):
        with pytest.raises(ParseError, match="overlaps"):
            parse_function("pw[(0,1/2]: 1; [1/2,1): 2]", UNIT)
        with pytest.raises(ParseError):
            parse_function("pw[(0,1/2] 1]", UNIT)


class TestFamilies:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_members_carry_family_tags(self, family):
        for f in random_family(UNIT, family, gamma=F(1, 2), seed=3, count=8):
            assert f.in_family(family), (family, f)
            assert f.bound <= F(1, 2)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_deterministic(self, family):
        a = random_family(HALF_LINE, family, seed=7, count=5)
        b = random_family(HALF_LINE, family, seed=7, count=5)
        assert [str(f) for f in a] == [str(f) for f in b]
        xs = np.linspace(1, 20, 97)
        for f, g in zip(a, b):
            assert np.array_equal(f.evaluate_array(xs), g.evaluate_array(xs))

    def test_nat_c0_includes_inverse(self):
        fam = random_family(NAT_SPACE, "C0", seed=0, count=4)
        assert fam[0](4) == F(1, 4)

    def test_nonnegative_option(self):
        for f in random_family(UNIT, "Cc", seed=1, count=10, nonnegative=True):
            assert f.has("nonnegative")

    def test_cofinite_continuous_families_are_constant(self):
        for f in random_family(COFINITE_SPACE, "Cb", seed=0, count=5):
            assert len({f(k) for k in range(1, 40)}) == 1
        with pytest.raises(UnsupportedSpaceError):
            random_family(COFINITE_SPACE, "holder")

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            random_family(UNIT, "smooth")

    @given(st.integers(0, 200))
    def test_holder_members_certify(self, seed):
        (f,) = random_family(UNIT, "holder", seed=seed, count=1)
        alpha, c = f.holder
        assert certify_holder(f, alpha, c, seed=seed, pairs=500)

    @given(st.integers(0, 200))
    def test_array_matches_pointwise(self, seed):
        (f,) = random_family(UNIT, "M", seed=seed, count=1)
        xs = sample_points(1, 23)
        assert np.allclose(f.evaluate_array(np.array([float(x) for x in xs])), [float(f(x)) for x in xs])

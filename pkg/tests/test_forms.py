from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from measure_modes.errors import DivergenceError, ParseError
from measure_modes.forms import ExprFunction, PowerSum, compile_function, evaluate, fmt_number, parse_number

small = st.fractions(min_value=-3, max_value=3, max_denominator=6)
exponents = st.integers(-4, 3)


@st.composite
def power_sums(draw):
    return PowerSum._build([(draw(exponents), draw(small)) for _ in range(draw(st.integers(0, 3)))])


def test_numbers_stay_exact():
    assert parse_number("1/3") == F(1, 3)
    assert parse_number("(n-1)/n", {"n": 4}) == F(3, 4)
    assert parse_number("0.9") == F(9, 10)
    assert parse_number("inf") == math.inf


def test_unknown_name_is_a_parse_error():
    with pytest.raises(ParseError):
        evaluate("m + 1")


def test_format():
    assert fmt_number(F(2, 3)) == "2/3"
    assert fmt_number(F(4)) == "4"


def test_power_antiderivative_examples():
    x4 = PowerSum.monomial(1, -4)
    assert x4.integrate(1, math.inf) == F(1, 3)
    assert x4.integrate(1, 2) == F(7, 24)
    assert PowerSum.monomial(1, -1).integrate(1, math.e) == pytest.approx(1.0, abs=1e-15)


def test_divergent_tail():
    with pytest.raises(DivergenceError) as info:
        PowerSum.monomial(1, -1).integrate(1, math.inf)
    assert info.value.direction == 1


def test_line_through_points():
    line = PowerSum.line(1, 2, 3, 6)
    assert line(F(2)) == 4 and line(F(3)) == 6


def test_compile_closed_form_and_fallback():
    assert isinstance(compile_function("x**2 + 1/x"), PowerSum)
    f = compile_function("sin(x)")
    assert isinstance(f, ExprFunction)
    assert f(0.5) == pytest.approx(math.sin(0.5))
    assert np.allclose(f.evaluate_array(np.array([0.0, 1.0])), [0.0, math.sin(1.0)])


@given(power_sums(), power_sums(), st.fractions(min_value=F(1, 2), max_value=4, max_denominator=8))
def test_ring_operations_pointwise(p, q, x):
    assert (p + q)(x) == p(x) + q(x)
    assert (p * q)(x) == p(x) * q(x)
    assert (p - q)(x) == p(x) - q(x)


@given(power_sums(), st.fractions(min_value=1, max_value=3, max_denominator=4),
       st.fractions(min_value=1, max_value=3, max_denominator=4))
def test_integral_additive_over_adjacent_intervals(p, a, b):
    lo, mid, hi = 1, min(a, b), max(a, b) + 1
    assert p.integrate(lo, mid) + p.integrate(mid, hi) == pytest.approx(float(p.integrate(lo, hi)), abs=1e-12)


@given(power_sums(), st.fractions(min_value=1, max_value=5, max_denominator=8))
def test_array_matches_exact(p, x):
    assert float(p.evaluate_array(np.array([float(x)]))[0]) == pytest.approx(float(p(x)), rel=1e-12, abs=1e-12)

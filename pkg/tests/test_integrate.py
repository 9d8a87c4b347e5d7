from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import HALF_LINE, NAT_SPACE, UNIT, unit_sets
from measure_modes import quadrature
from measure_modes.errors import DivergenceError, QuadratureError, UndefinedIntegralError
from measure_modes.forms import PowerSum
from measure_modes.integrate import CLOSED_FORM, QUADRATURE, integrate, integrate_truncated
from measure_modes.measure import Measure, add, counting, dirac, lebesgue, measure_from_json
from measure_modes.space import Interval, Space
from measure_modes.testfn import indicator, make, parse_function, random_family


def power_density(domain: str, interval: str, p: int, space_kind: str = "real") -> Measure:
    return measure_from_json({
        "space": {"kind": space_kind, "domain": domain},
        "pieces": [{"interval": interval, "density": {"form": "power", "params": {"c": 1, "p": p}}}],
    })


def truncated_inverse_square(n: int) -> Measure:
    return power_density("[1,inf)", f"[1,{n}]", -2)


LEB = lebesgue(UNIT, UNIT.domain)
MIXED = Measure(
    UNIT,
    ((F(1, 3), F(1, 3)),),
    ((Interval(F(1, 4), F(1), True, False), PowerSum.line(F(1, 4), 0, 1, 2)),),
)


class TestQuadrature:
    def test_polynomial_is_exact(self):
        value, err = quadrature.integrate(lambda xs: xs**3, [0, 2])
        assert value == pytest.approx(4.0, abs=1e-13)

    def test_kink_at_breakpoint(self):
        value, _ = quadrature.integrate(lambda xs: np.abs(xs - 0.3), [0, 0.3, 1])
        assert value == pytest.approx(0.045 + 0.245, abs=1e-13)

    def test_budget_exhaustion_raises(self):
        with pytest.raises(QuadratureError):
            quadrature.integrate(lambda xs: np.sin(1 / xs), [1e-9, 1], tol=1e-15, max_intervals=50)


class TestExamples:
    def test_oscillating_against_power_tail(self):
        # oracle: Im E_4(-i) = int_1^inf sin(x) x^-4 dx (mpmath, 40 digits)
        r = integrate(parse_function("sin(x)", HALF_LINE), power_density("[1,inf)", "[1,inf)", -4))
        assert r.method == QUADRATURE
        assert float(r) == pytest.approx(0.2865295355961673931, abs=1e-9)

    def test_sine_plus_one_on_unit_interval(self):
        r = integrate(parse_function("1 + sin(x)", UNIT), LEB)
        assert float(r) == pytest.approx(2 - math.cos(1), abs=1e-12)

    def test_exponential_density_on_bounded_window(self):
        space = Space.real_line(0, 10, True, True)
        m = measure_from_json({
            "space": {"kind": "real", "domain": "[0,10]"},
            "pieces": [{"interval": "[0,10]", "density": {"form": "expression", "params": {"expr": "exp(-x)"}}}],
        })
        # oracle: int_0^10 x^2 e^-x dx = 2 - 122 e^-10
        assert float(integrate(parse_function("x**2", space), m)) == pytest.approx(2 - 122 * math.exp(-10), abs=1e-10)

    def test_unbounded_integrand_on_unbounded_numeric_piece_refused(self):
        space = Space.real_line(0, math.inf, True, False)
        m = measure_from_json({
            "space": {"kind": "real", "domain": "[0,inf)"},
            "pieces": [{"interval": "[0,inf)", "density": {"form": "expression", "params": {"expr": "exp(-x)"}}}],
        })
        with pytest.raises(UndefinedIntegralError):
            integrate(parse_function("x**2", space), m)

    def test_closed_form_stays_exact(self):
        r = integrate(parse_function("x**2", HALF_LINE), truncated_inverse_square(5))
        assert r.method == CLOSED_FORM and r.value == 4 and r.error_bound == 0

    def test_atoms_contribute_point_values(self):
        f = parse_function("x", UNIT)
        assert integrate(f, dirac(UNIT, F(2, 3), F(1, 2))).value == F(1, 3)

    def test_nat_piecewise_against_inverse_square(self):
        f = parse_function("pw[{1}: 1/2; [2,5]: 1; else: 1/x]", NAT_SPACE)
        m = measure_from_json({"space": {"kind": "nat"}, "discrete": [{"rule": {"form": "power", "params": {"c": 1, "p": -2}}}]})
        # oracle: 1/2 + sum_{2..5} k^-2 + zeta(3) - sum_{1..5} k^-3
        assert float(integrate(f, m)) == pytest.approx(0.98000597723366835947, abs=1e-12)

    def test_harmonic_diverges_with_partial(self):
        with pytest.raises(DivergenceError) as info:
            integrate(parse_function("1/x", NAT_SPACE), counting(NAT_SPACE))
        assert info.value.direction == 1
        # oracle: H(10^6)
        assert info.value.partial == pytest.approx(14.392726722865723631, rel=1e-9)

    def test_power_tail_diverges(self):
        with pytest.raises(DivergenceError):
            integrate(parse_function("x**2", HALF_LINE), power_density("[1,inf)", "[1,inf)", -2))

    def test_opposite_divergences_are_undefined(self):
        f = parse_function("pw[per(2:{0}): x; per(2:{1}): -x]", NAT_SPACE)
        with pytest.raises(UndefinedIntegralError):
            integrate(f, counting(NAT_SPACE))


class TestTruncation:
    @pytest.mark.parametrize("k, expected", [(0, 0), (1, 0), (4, 1), (16, 3), (100, 7)])
    def test_square_against_inverse_square(self, k, expected):
        # int 1{x^2 < k} x^2 x^-2 dx on [1, 8] = min(8, sqrt k) - 1, floored at 0
        assert integrate_truncated(parse_function("x**2", HALF_LINE), truncated_inverse_square(8), k) == expected

    def test_needs_nonnegative(self):
        with pytest.raises(ValueError):
            integrate_truncated(parse_function("x - 2", HALF_LINE), truncated_inverse_square(4), 1)

    @given(st.integers(0, 400), st.integers(0, 400))
    def test_monotone_in_level(self, a, b):
        f = parse_function("x**2", HALF_LINE)
        lo, hi = sorted((a, b))
        m = truncated_inverse_square(12)
        assert integrate_truncated(f, m, lo) <= integrate_truncated(f, m, hi)


class TestProperties:
    @given(unit_sets())
    def test_indicator_integral_is_mass(self, a):
        assert integrate(indicator(a), MIXED).value == MIXED.mass(a)

    @given(st.integers(0, 50), st.fractions(min_value=-3, max_value=3, max_denominator=5))
    def test_linear_in_the_function(self, seed, c):
        (f,) = random_family(UNIT, "Cc", seed=seed, count=1)
        scaled = make(UNIT, [(iv, form * c) for iv, form in f.pieces])
        assert integrate(scaled, MIXED).value == c * integrate(f, MIXED).value

    @given(st.integers(0, 50))
    def test_linear_in_the_measure(self, seed):
        (f,) = random_family(UNIT, "Cc", seed=seed, count=1)
        assert integrate(f, add(MIXED, LEB)).value == integrate(f, MIXED).value + integrate(f, LEB).value

    @given(st.integers(0, 50))
    def test_bounded_by_sup_times_mass(self, seed):
        (f,) = random_family(UNIT, "M", seed=seed, count=1)
        assert abs(integrate(f, MIXED).value) <= f.bound * MIXED.total_mass()

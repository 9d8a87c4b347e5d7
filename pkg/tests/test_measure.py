from __future__ import annotations

import math
from fractions import Fraction as F

import pytest
from hypothesis import given

from conftest import COFINITE_SPACE, HALF_LINE, NAT_SPACE, UNIT, nat_sets, unit_sets
from measure_modes.errors import DivergenceError, ParseError, SpaceMismatchError
from measure_modes.forms import PowerSum
from measure_modes.measure import (
    DiscreteWeights,
    Measure,
    add,
    counting,
    difference,
    dirac,
    lebesgue,
    measure_from_json,
    nat_sum,
    restrict,
    scale,
    zero,
)
from measure_modes.space import Interval, NatSet, complement, intersection, parse_set, union

EXM2_TEMPLATE = {
    "space": {"kind": "real", "domain": "[1,inf)"},
    "pieces": [
        {"interval": "[1,n]", "density": {"form": "power", "params": {"c": 1, "p": -4}}},
        {"interval": "[n,n+1]", "density": {"form": "constant", "params": {"c": 1}}},
    ],
}
EXM2_LIMIT = {
    "space": {"kind": "real", "domain": "[1,inf)"},
    "pieces": [{"interval": "[1,inf)", "density": {"form": "power", "params": {"c": 1, "p": -4}}}],
}

# a measure on (0,1) mixing atoms, a constant piece and a linear piece
MIXED = Measure(
    UNIT,
    ((F(1, 3), F(1, 3)), (F(3, 4), F(1, 8))),
    ((Interval(F(0), F(1, 2), False, True), PowerSum.constant(1)),
     (Interval(F(1, 4), F(1), True, False), PowerSum.line(F(1, 4), 0, 1, 2))),
)


class TestMass:
    def test_escaping_limit_mass(self):
        assert measure_from_json(EXM2_LIMIT).total_mass() == F(1, 3)

    @pytest.mark.parametrize("n", [2, 3, 10, 64])
    def test_escaping_terms_match_antiderivative(self, n):
        # oracle: 4/3 - 1/(3 n^3)
        assert measure_from_json(EXM2_TEMPLATE, {"n": n}).total_mass() == F(4, 3) - F(1, 3 * n**3)

    def test_atom_on_closed_endpoint(self):
        d = dirac(UNIT, F(2, 3))
        assert d.mass(parse_set("(1/3,2/3]", UNIT)) == 1
        assert d.mass(parse_set("(1/3,2/3)", UNIT)) == 0

    def test_cofinite_terms_are_probabilities(self):
        template = {"space": {"kind": "cofinite"}, "atoms": [{"at": "2*n", "mass": "(n-1)/n"}, {"at": 1, "mass": "1/n"}]}
        for n in (2, 5, 17):
            assert measure_from_json(template, {"n": n}).is_probability()

    def test_mixed_measure_exact(self):
        # oracle: 1/2 + (1/2)*(3/4)*2*... integrate by hand: line from (1/4,0) to (1,2) has area 3/4
        assert MIXED.total_mass() == F(1, 2) + F(3, 4) + F(1, 3) + F(1, 8)

    def test_divergent_counting_mass_reports_partial(self):
        with pytest.raises(DivergenceError) as info:
            counting(NAT_SPACE).total_mass()
        assert info.value.partial == pytest.approx(1e6)

    def test_space_mismatch(self):
        with pytest.raises(SpaceMismatchError):
            dirac(UNIT, F(1, 2)).mass(NAT_SPACE.whole())

    @given(unit_sets(), unit_sets())
    def test_finite_additivity(self, a, b):
        b = intersection(b, complement(a))
        assert MIXED.mass(union(a, b)) == MIXED.mass(a) + MIXED.mass(b)

    @given(unit_sets())
    def test_complement_adds_to_total(self, a):
        assert MIXED.mass(a) + MIXED.mass(complement(a)) == MIXED.total_mass()

    @given(unit_sets())
    def test_nonnegative(self, a):
        assert MIXED.mass(a) >= 0


class TestNatSums:
    def test_zeta_two(self):
        assert nat_sum(PowerSum.monomial(1, -2), NAT_SPACE.whole()) == pytest.approx(math.pi**2 / 6, abs=1e-12)

    def test_zeta_two_on_evens(self):
        evens = NatSet.periodic(NAT_SPACE, 2, [0])
        assert nat_sum(PowerSum.monomial(1, -2), evens) == pytest.approx(0.411233516712056609, abs=1e-12)

    def test_residue_class(self):
        # oracle: sum over k = 1 mod 3 of k^-2, by direct high-precision summation
        ones = NatSet.periodic(NAT_SPACE, 3, [1])
        assert nat_sum(PowerSum.monomial(1, -2), ones) == pytest.approx(1.121733013936343787, abs=1e-12)

    def test_cube_tail(self):
        tail = parse_set("[3,inf)", NAT_SPACE)
        assert nat_sum(PowerSum.monomial(1, -3), tail) == pytest.approx(0.077056903159594285, abs=1e-12)

    def test_finite_sum_is_exact(self):
        assert nat_sum(PowerSum.monomial(1, -1), NatSet.finite(NAT_SPACE, [1, 2, 3])) == F(11, 6)

    def test_harmonic_diverges(self):
        with pytest.raises(DivergenceError) as info:
            nat_sum(PowerSum.monomial(1, -1), parse_set("[5,inf)", NAT_SPACE))
        assert info.value.direction == 1
        # partial over 5..1e6 of 1/k = H(1e6) - H(4)
        assert info.value.partial == pytest.approx(14.392726722864 - F(25, 12), rel=1e-9)

    def test_kind_classification(self):
        assert DiscreteWeights(PowerSum.monomial(1, -2), NAT_SPACE.whole()).kind == "summable"
        assert DiscreteWeights(PowerSum.monomial(1, -1), NAT_SPACE.whole()).kind == "divergent"


class TestAlgebra:
    def test_restrict_block(self):
        leb = lebesgue(HALF_LINE, Interval(F(1), math.inf, True, False))
        block = restrict(leb, parse_set("[4,5]", HALF_LINE))
        assert block.total_mass() == 1

    def test_restrict_to_empty(self):
        assert restrict(MIXED, UNIT.empty()).total_mass() == 0

    def test_restricted_counting(self):
        n = 7
        tail = restrict(counting(NAT_SPACE), parse_set(f"[{n},inf)", NAT_SPACE))
        assert tail.mass(parse_set(f"[1,{2 * n}]", NAT_SPACE)) == n + 1

    @given(unit_sets(), unit_sets())
    def test_restrict_composes(self, a, b):
        probe = parse_set("(1/5,4/5]", UNIT)
        assert restrict(restrict(MIXED, a), b).mass(probe) == restrict(MIXED, intersection(a, b)).mass(probe)

    @given(unit_sets())
    def test_difference_is_linear(self, a):
        other = dirac(UNIT, F(1, 3), F(1, 2))
        assert difference(MIXED, other).mass(a) == MIXED.mass(a) - other.mass(a)
        assert difference(MIXED, MIXED).mass(a) == 0

    def test_scale_and_add(self):
        assert scale(MIXED, 2).total_mass() == 2 * MIXED.total_mass()
        assert add(MIXED, MIXED).total_mass() == 2 * MIXED.total_mass()
        assert zero(UNIT).total_mass() == 0

    def test_negative_scale_is_signed(self):
        assert not isinstance(scale(MIXED, -1), Measure)

    def test_negative_density_rejected(self):
        with pytest.raises(ValueError):
            Measure(UNIT, (), ((Interval(F(0), F(1), False, False), PowerSum.constant(-1)),))


class TestJson:
    def test_round_trip(self):
        m = measure_from_json(EXM2_TEMPLATE, {"n": 5})
        assert measure_from_json(m.to_json()) == m

    @given(nat_sets(COFINITE_SPACE))
    def test_cofinite_atoms_round_trip(self, a):
        m = Measure(COFINITE_SPACE, tuple((k, F(1, k)) for k in a.iter_upto(20)))
        assert measure_from_json(m.to_json()) == m

    def test_missing_field_names_location(self):
        with pytest.raises(ParseError, match=r"pieces\[0\]"):
            measure_from_json({"space": {"kind": "real"}, "pieces": [{"density": {"form": "constant"}}]})

    def test_declared_kind_checked(self):
        data = {"space": {"kind": "nat"}, "discrete": [{"rule": "counting", "kind": "summable"}]}
        with pytest.raises(ParseError, match="divergent"):
            measure_from_json(data)

    def test_expression_weight_in_k(self):
        data = {"space": {"kind": "nat"}, "discrete": [{"rule": {"form": "expression", "params": {"expr": "n/k**2"}}}]}
        m = measure_from_json(data, {"n": 6})
        assert m.total_mass() == pytest.approx(math.pi**2, abs=1e-10)

"""Integrals of test functions against measures, exact where the integrand stays closed-form."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import quadrature
from .errors import DivergenceError, UndefinedIntegralError
from .forms import INF, Number, PowerSum, is_exact
from .measure import SignedMeasure, nat_sum
from .space import Interval, intersection
from .testfn import TestFunction, truncate

CLOSED_FORM = "closed_form"
QUADRATURE = "quadrature"
FLOAT_CLOSED_FORM_BOUND = 1e-12


@dataclass(frozen=True)
class IntegralResult:
    value: Number
    method: str
    error_bound: float

    def __float__(self) -> float:
        return float(self.value)


def integrate(f: TestFunction, m: SignedMeasure, tol: float = quadrature.DEFAULT_TOL) -> IntegralResult:
    """``sum f(x) w`` over atoms, plus ``int f * density`` over pieces, plus weight sums on the naturals.

    Raises :class:`DivergenceError` (with ``direction``) when the integral is
    infinite and :class:`UndefinedIntegralError` when it has no value.
    """
    if f.space != m.space:
        from .errors import SpaceMismatchError

        raise SpaceMismatchError(f.space, m.space)
    total = sum((f(x) * w for x, w in m.atoms), Fraction(0))
    method = CLOSED_FORM
    err = 0.0
    divergent: list[DivergenceError] = []
    if m.space.is_real:
        for region, form in f.pieces:
            if region.is_point:
                continue
            for piece in m.pieces:
                cut = region.intersect(piece.interval)
                if cut is None or cut.is_point:
                    continue
                if isinstance(form, PowerSum) and isinstance(piece.density, PowerSum):
                    try:
                        total = total + (form * piece.density).integrate(cut.lo, cut.hi)
                    except DivergenceError as exc:
                        divergent.append(exc)
                    continue
                value, e = _numeric(form, piece.density, cut, f.bound, tol)
                total = total + value
                err += e
                method = QUADRATURE
    else:
        for region, form in f.pieces:
            for rule in m.discrete:
                try:
                    total = total + nat_sum(form * rule.weight, intersection(region, rule.support))
                except DivergenceError as exc:
                    divergent.append(exc)
    if divergent:
        directions = {e.direction for e in divergent}
        if len(directions) == 1 and 0 not in directions:
            d = directions.pop()
            partial = sum(e.partial for e in divergent if e.partial is not None) if any(e.partial is not None for e in divergent) else None
            raise DivergenceError(f"integral of {f} against the measure diverges", d, partial)
        raise UndefinedIntegralError(f"integral of {f} has divergent parts of both signs")
    if not is_exact(total) and method == CLOSED_FORM:
        err = FLOAT_CLOSED_FORM_BOUND
    return IntegralResult(total, method, err)


def _numeric(form, density, cut: Interval, bound: Number, tol: float) -> tuple[float, float]:
    """Quadrature of ``form * density`` over ``cut``; unbounded ends use a certified tail bound."""
    lo, hi = cut.lo, cut.hi
    if math.isinf(lo) or math.isinf(hi):
        if not isinstance(density, PowerSum) or math.isinf(bound):
            raise UndefinedIntegralError("unbounded quadrature needs a bounded integrand and a power-law density")
        if math.isinf(lo):
            raise UndefinedIntegralError("quadrature tails are supported toward +inf only")
        top = density.terms[-1][0] if density.terms else -2
        if top >= -1:
            raise UndefinedIntegralError(f"density {density} has no integrable tail bound")
        envelope = PowerSum._build([(p, abs(c)) for p, c in density.terms])
        r = max(Fraction(1), Fraction(lo) + 1)
        while float(bound) * float(envelope.integrate(r, INF)) > tol / 2:
            r *= 2
        tail = float(bound) * float(envelope.integrate(r, INF))
        value, err = quadrature.integrate(_product(form, density), [lo, r], tol / 2)
        return value, err + tail
    return quadrature.integrate(_product(form, density), [lo, hi], tol)


def _product(a, b):
    va, vb = quadrature.vectorize(a), quadrature.vectorize(b)
    return _Product(va, vb)


@dataclass(frozen=True)
class _Product:
    a: object
    b: object

    def evaluate_array(self, xs):
        return self.a(xs) * self.b(xs)

    def __call__(self, x):
        import numpy as np

        return float(self.evaluate_array(np.array([float(x)]))[0])


def integrate_truncated(f: TestFunction, m: SignedMeasure, k: Number) -> Number:
    """``int 1_{f < k} f dm`` for nonnegative ``f``; nondecreasing in ``k``."""
    if "nonnegative" not in f.tags:
        raise ValueError("truncated integrals need a nonnegative function")
    return integrate(truncate(f, k), m).value

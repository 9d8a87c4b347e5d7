"""Test functions with regularity metadata, and factories for the standard families.

A :class:`TestFunction` is a finite list of disjoint regions, each carrying a
closed-form piece; it is zero off those regions. On the real line a region is
an :class:`~measure_modes.space.Interval`; on the naturals it is a
:class:`~measure_modes.space.NatSet` (so ``1/k`` on all of ``N`` is a single
piece). Tags record what the constructor guarantees:

``continuous``, ``bounded``, ``bounded_measurable``, ``compact_support``,
``bounded_support``, ``vanishing`` (tends to zero at infinity), ``holder``,
``uniformly_continuous``, ``nonnegative``.

Function literal syntax mirrors the set syntax::

    pw[(0,1): 4*x; [1,2]: 4-4*(x-1)]      # real line, zero elsewhere
    pw[{1}: 1/2; [2,5]: 1; else: 1/x]     # naturals; ``else`` covers the rest
    x**2                                  # one piece on the whole space
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

from .errors import ParseError, UnsupportedSpaceError
from .forms import INF, ExprFunction, Number, PowerSum, compile_function, exact, fmt_number, interior_point, is_exact
from .space import (
    COFINITE,
    NAT,
    BorelSet,
    Interval,
    NatSet,
    RealSet,
    Space,
    boundary,
    canonicalize,
    closure,
    complement,
    difference,
    intersection,
    is_bounded,
    is_closed,
    is_compact,
    is_open,
    parse_set,
    point_set_distance,
    union,
    union_all,
)

FAMILIES = ("Cc", "C0", "Cb", "M", "holder", "uniformly_continuous", "Cbs")

_FAMILY_TAGS = {
    "Cc": {"continuous", "compact_support"},
    "C0": {"continuous", "vanishing"},
    "Cb": {"continuous", "bounded"},
    "M": {"bounded_measurable"},
    "holder": {"continuous", "holder", "compact_support"},
    "uniformly_continuous": {"continuous", "uniformly_continuous", "compact_support"},
    "Cbs": {"continuous", "bounded_support"},
}


@dataclass(frozen=True)
class TestFunction:
    __test__ = False  # keep pytest from collecting this class

    space: Space
    pieces: tuple = ()
    bound: Number = Fraction(0)
    tags: frozenset = frozenset()
    holder: tuple | None = None
    label: str = ""

    # -- evaluation ------------------------------------------------------
    def __call__(self, x) -> Number:
        for region, form in self.pieces:
            if x in region:
                return form(Fraction(x) if isinstance(x, int) else x)
        return Fraction(0)

    def evaluate_array(self, xs: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=float)
        out = np.zeros_like(xs)
        for region, form in self.pieces:
            if isinstance(region, Interval):
                lo, hi = float(region.lo), float(region.hi)
                mask = (xs > lo) & (xs < hi)
                if region.lo_closed:
                    mask |= xs == lo
                if region.hi_closed:
                    mask |= xs == hi
            else:
                mask = np.array([int(v) in region if float(v).is_integer() else False for v in xs], dtype=bool)
            if mask.any():
                out[mask] = form.evaluate_array(xs[mask]) if hasattr(form, "evaluate_array") else [float(form(v)) for v in xs[mask]]
        return out

    def has(self, *tags: str) -> bool:
        return all(t in self.tags for t in tags)

    def in_family(self, family: str) -> bool:
        return self.tags >= _FAMILY_TAGS[family]

    @property
    def is_closed_form(self) -> bool:
        return all(isinstance(form, PowerSum) for _, form in self.pieces)

    def support(self) -> BorelSet:
        """Closure of ``{f != 0}`` (regions whose piece is not identically zero)."""
        if self.space.is_real:
            parts = [region for region, form in self.pieces if not (isinstance(form, PowerSum) and form.is_zero)]
            return closure(canonicalize(self.space, parts))
        return closure(union_all(self.space, (region for region, form in self.pieces if not form.is_zero)))

    def knots(self) -> list[Number]:
        if not self.space.is_real:
            return []
        pts = set()
        for region, _ in self.pieces:
            pts.update(e for e in (region.lo, region.hi) if not math.isinf(e))
        return sorted(pts)

    def discontinuities(self) -> list[Number]:
        """Points of the real line where ``f`` jumps (left limit, value, right limit disagree)."""
        self.space.require_real("discontinuity detection")
        out = []
        for p in self.knots():
            if p not in self.space.domain:
                continue
            left = self._side_limit(p, -1)
            right = self._side_limit(p, 1)
            value = self(p)
            ends = [v for v in (left, right) if v is not None]
            if any(abs(v - value) > 1e-12 for v in ends):
                out.append(p)
        return out

    def _side_limit(self, p, side: int):
        if side < 0 and p == self.space.domain.lo or side > 0 and p == self.space.domain.hi:
            return None
        for region, form in self.pieces:
            if side < 0 and region.lo < p <= region.hi and not region.is_point:
                return form(p)
            if side > 0 and region.lo <= p < region.hi and not region.is_point:
                return form(p)
        return Fraction(0)

    def scaled(self, c: Number) -> "TestFunction":
        c = exact(c)
        tags = set(self.tags)
        if c < 0:
            tags.discard("nonnegative")
        holder = (self.holder[0], self.holder[1] * abs(c)) if self.holder else None
        pieces = tuple((r, f * c if isinstance(f, PowerSum) else _scaled_expr(f, c)) for r, f in self.pieces)
        return replace(self, pieces=pieces, bound=self.bound * abs(c), tags=frozenset(tags), holder=holder)

    def __str__(self) -> str:
        if self.label:
            return self.label
        body = "; ".join(f"{r}: {f}" for r, f in self.pieces)
        return f"pw[{body}]"


def _scaled_expr(f, c):
    return ExprFunction(f"({fmt_number(c)})*({f.text})", f.env)


# ---------------------------------------------------------------------------
# bounds and tags for piecewise forms
# ---------------------------------------------------------------------------

def _derivative(ps: PowerSum) -> PowerSum:
    return PowerSum._build([(p - 1, c * p) for p, c in ps.terms if p != 0])


def _extremes(form, region) -> list[Number]:
    """Values (or one-sided limits) of ``form`` at the candidate extremal points of ``region``."""
    if isinstance(region, NatSet):
        if region.is_finite:
            return [form(Fraction(n)) for n in region.elements()]
        pts = [n for n in region.iter_upto(max(region.horizon(), 1) + region.modulus)]
        if isinstance(form, PowerSum):
            for r in _derivative(form).roots(1, INF):
                for n in (math.floor(r), math.ceil(r)):
                    if n in region:
                        pts.append(n)
            return [form(Fraction(n)) for n in pts] + [form.limit(1)]
        return [form(Fraction(n)) for n in region.iter_upto(10_000)]
    lo, hi = region.lo, region.hi
    if isinstance(form, PowerSum):
        vals = []
        for end, side in ((lo, 1), (hi, -1)):
            if math.isinf(end):
                vals.append(form.limit(1 if end > 0 else -1))
            elif end == 0 and form.terms and form.terms[0][0] < 0:
                vals.append(INF)
            else:
                vals.append(form(end))
        vals += [form(r) for r in _derivative(form).roots(lo, hi)]
        return vals
    a = float(lo) if not math.isinf(lo) else -1e6
    b = float(hi) if not math.isinf(hi) else 1e6
    xs = np.linspace(a, b, 2001)
    return list(form.evaluate_array(xs) if hasattr(form, "evaluate_array") else [form(v) for v in xs])


def sup_abs(pieces: Iterable) -> Number:
    best = Fraction(0)
    for region, form in pieces:
        for v in _extremes(form, region):
            best = max(best, abs(v))
    return best


def _lipschitz(pieces) -> Number | None:
    """Largest slope of linear pieces; ``None`` when some piece is not linear."""
    best = Fraction(0)
    for region, form in pieces:
        if not isinstance(form, PowerSum):
            return None
        if isinstance(region, Interval) and region.is_point:
            continue
        if any(p not in (0, 1) for p, _ in form.terms):
            return None
        best = max(best, abs(dict(form.terms).get(1, Fraction(0))))
    return best


def _is_continuous_real(f: TestFunction) -> bool:
    return not f.discontinuities()


def classify(f: TestFunction) -> TestFunction:
    """Attach the tags that can be certified structurally (bounds, support, continuity, slopes)."""
    sp = f.space
    bound = sup_abs(f.pieces)
    tags = set(f.tags)
    holder = f.holder
    finite_bound = not math.isinf(bound)
    if finite_bound:
        tags.update({"bounded", "bounded_measurable"})
    mins = [min(_extremes(form, region)) for region, form in f.pieces]
    if all(m >= 0 for m in mins):
        tags.add("nonnegative")
    if sp.kind == COFINITE:
        # every subset of a cofinite space is compact; only constants are continuous
        tags.update({"bounded_support", "compact_support"})
        if all(isinstance(form, PowerSum) and form.is_constant for _, form in f.pieces) and _is_constant_cofinite(f):
            # the space is compact, so continuous functions also vanish at infinity
            tags.update({"continuous", "uniformly_continuous", "vanishing"})
        return replace(f, bound=bound, tags=frozenset(tags), holder=holder)
    supp = f.support()
    if is_bounded(supp):
        tags.add("bounded_support")
        if is_compact(supp):
            tags.add("compact_support")
    if sp.kind == NAT:
        tags.add("continuous")
        if finite_bound:
            tags.add("uniformly_continuous")
            tags.add("holder")
            holder = holder or (Fraction(1), 2 * bound)
        if supp.is_finite or _vanishes_nat(f):
            tags.add("vanishing")
        return replace(f, bound=bound, tags=frozenset(tags), holder=holder)
    if _is_continuous_real(f):
        tags.add("continuous")
        slope = _lipschitz(f.pieces)
        if slope is not None and finite_bound:
            tags.update({"holder", "uniformly_continuous"})
            holder = holder or (Fraction(1), slope)
        if "compact_support" in tags or _vanishes_real(f):
            tags.add("vanishing")
    return replace(f, bound=bound, tags=frozenset(tags), holder=holder)


def _is_constant_cofinite(f: TestFunction) -> bool:
    whole = union_all(f.space, (r for r, _ in f.pieces))
    values = {form.constant_value for _, form in f.pieces}
    return (whole == f.space.whole() and len(values) == 1) or (not f.pieces)


def _vanishes_nat(f: TestFunction) -> bool:
    for region, form in f.pieces:
        if not region.is_finite and not (isinstance(form, PowerSum) and form.limit(1) == 0):
            return False
    return True


def _vanishes_real(f: TestFunction) -> bool:
    dom = f.space.domain
    for region, form in f.pieces:
        for end, side, dom_end, closed in ((region.hi, 1, dom.hi, dom.hi_closed), (region.lo, -1, dom.lo, dom.lo_closed)):
            if end == dom_end and not closed:
                if not isinstance(form, PowerSum):
                    return False
                lim = form.limit(side) if math.isinf(end) else form(end)
                if lim != 0:
                    return False
    return True


def make(space: Space, pieces: Iterable, label: str = "", tags: Iterable[str] = ()) -> TestFunction:
    """Build and classify a test function from ``(region, form)`` pairs."""
    pieces = tuple(pieces)
    if space.is_real:
        pieces = tuple(sorted(pieces, key=lambda rf: (rf[0].lo, 0 if rf[0].lo_closed else 1)))
        for (r1, _), (r2, _) in zip(pieces, pieces[1:]):
            if r1.intersect(r2) is not None:
                raise ValueError(f"overlapping pieces {r1} and {r2}")
    return classify(TestFunction(space, pieces, tags=frozenset(tags), label=label))


def constant(space: Space, c: Number, label: str = "") -> TestFunction:
    c = exact(c)
    region = space.domain if space.is_real else space.whole()
    return make(space, [(region, PowerSum.constant(c))], label or f"const {fmt_number(c)}")


# ---------------------------------------------------------------------------
# bumps, indicators, truncation
# ---------------------------------------------------------------------------

def _piecewise_linear(space: Space, knots: list[tuple[Number, Number]], left: Number, right: Number) -> list:
    """Continuous piecewise-linear pieces through ``knots``, constant ``left``/``right`` beyond them, clipped to the domain."""
    dom = space.domain
    pieces = []
    spans = []
    if knots:
        spans.append((Interval(-INF, knots[0][0], False, False), PowerSum.constant(left)))
        for (x0, y0), (x1, y1) in zip(knots, knots[1:]):
            form = PowerSum.constant(y0) if y0 == y1 else PowerSum.line(x0, y0, x1, y1)
            spans.append((Interval(x0, x1, True, False), form))
        spans.append((Interval(knots[-1][0], INF, True, False), PowerSum.constant(right)))
    merged = []
    for iv, form in spans:
        if merged and merged[-1][1] == form:
            prev = merged[-1][0]
            merged[-1] = (Interval(prev.lo, iv.hi, prev.lo_closed, iv.hi_closed), form)
        else:
            merged.append((iv, form))
    for iv, form in merged:
        if form.is_zero:
            continue
        cut = iv.intersect(dom)
        if cut is not None:
            pieces.append((cut, form))
    return pieces


def _knot_points(space: Space, sets: list[BorelSet], n: int) -> list[Number]:
    step = Fraction(1, n)
    pts = set()
    ends = []
    for s in sets:
        ends.extend(s.endpoints())
    ends = sorted(set(ends))
    for e in ends:
        pts.update((e - step, e, e + step))
    for a, b in zip(ends, ends[1:]):
        pts.add((a + b) / 2)
    dom = space.domain
    for e in (dom.lo, dom.hi):
        if not math.isinf(e):
            pts.add(e)
    return sorted(p for p in pts if dom.lo <= p <= dom.hi)


def bump_over_closed(a: BorelSet, n: int) -> TestFunction:
    """``max(0, 1 - n * dist(x, A))``: 1 on ``A``, 0 at distance ``>= 1/n``, Lipschitz ``n``."""
    sp = a.space
    if sp.kind == COFINITE:
        raise UnsupportedSpaceError("bumps need a metric; the cofinite space has none")
    if not is_closed(a):
        raise ValueError(f"{a} is not closed")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if sp.kind == NAT:
        # discrete metric: distance is 0 or 1, so the bump is the indicator for every n >= 1
        return _lipschitz_tagged(make(sp, [(a, PowerSum.constant(1))] if not a.is_empty else [], f"bump_over({a}, {n})"), n)
    if a.is_empty:
        return make(sp, [], f"bump_over(empty, {n})")
    knots = [(x, max(Fraction(0), 1 - n * point_set_distance(x, a))) for x in _knot_points(sp, [a], n)]
    left = Fraction(1) if any(math.isinf(iv.lo) for iv in a.parts) else Fraction(0)
    right = Fraction(1) if any(math.isinf(iv.hi) for iv in a.parts) else Fraction(0)
    return _lipschitz_tagged(make(sp, _piecewise_linear(sp, knots, left, right), f"bump_over({a}, {n})"), n)


def bump_under_open(b: BorelSet, n: int) -> TestFunction:
    """``min(1, n * dist(x, boundary(B)))`` on ``B`` and 0 elsewhere; needs a nonempty ``1/n``-deep core."""
    sp = b.space
    if sp.kind == COFINITE:
        raise UnsupportedSpaceError("bumps need a metric; the cofinite space has none")
    if not is_open(b):
        raise ValueError(f"{b} is not open")
    n = int(n)
    if n < 1:
        raise ValueError("n must be a positive integer")
    if b.is_empty:
        raise ValueError("the 1/n-deep core of the empty set is empty")
    if sp.kind == NAT:
        return _lipschitz_tagged(make(sp, [(b, PowerSum.constant(1))], f"bump_under({b}, {n})"), n)
    edge = boundary(b)
    knots = []
    for x in _knot_points(sp, [b, edge], n):
        if x in b:
            d = point_set_distance(x, edge) if not edge.is_empty else INF
            knots.append((x, min(Fraction(1), n * d) if not math.isinf(d) else Fraction(1)))
        else:
            knots.append((x, Fraction(0)))
    if not any(v == 1 for _, v in knots):
        raise ValueError(f"no point of {b} lies 1/{n} deep; increase n")
    left = Fraction(1) if any(math.isinf(iv.lo) for iv in b.parts) else Fraction(0)
    right = Fraction(1) if any(math.isinf(iv.hi) for iv in b.parts) else Fraction(0)
    return _lipschitz_tagged(make(sp, _piecewise_linear(sp, knots, left, right), f"bump_under({b}, {n})"), n)


def _lipschitz_tagged(f: TestFunction, n: int) -> TestFunction:
    """Bumps are Lipschitz with constant ``n`` by construction."""
    tags = set(f.tags) | {"holder", "uniformly_continuous", "continuous"}
    return replace(f, tags=frozenset(tags), holder=(Fraction(1), Fraction(n)))


def indicator(a: BorelSet) -> TestFunction:
    """``1_A``: bounded measurable with bound 1, discontinuous exactly on the boundary of ``A`` (real line)."""
    sp = a.space
    one = PowerSum.constant(1)
    if sp.is_real:
        pieces = [(iv, one) for iv in a.parts]
    else:
        pieces = [(a, one)] if not a.is_empty else []
    return make(sp, pieces, f"1[{a}]")


def truncate(f: TestFunction, k: Number) -> TestFunction:
    """``1_{f < k} * f``."""
    k = exact(k)
    sp = f.space
    pieces = []
    for region, form in f.pieces:
        if not isinstance(form, PowerSum):
            raise ValueError("truncation needs closed-form pieces")
        shifted = form - k
        if sp.is_real:
            if region.is_point:
                if form(region.lo) < k:
                    pieces.append((region, form))
                continue
            cuts = shifted.roots(region.lo, region.hi)
            ends = [region.lo] + cuts + [region.hi]
            for i, (lo, hi) in enumerate(zip(ends, ends[1:])):
                if shifted.sign_between(lo, hi) < 0:
                    lo_closed = region.lo_closed if i == 0 else False
                    hi_closed = region.hi_closed if i == len(ends) - 2 else False
                    pieces.append((Interval(lo, hi, lo_closed, hi_closed), form))
        else:
            below = _nat_below(shifted, region)
            if not below.is_empty:
                pieces.append((below, form))
    pieces = _coalesce(pieces) if sp.is_real else pieces
    out = make(sp, pieces, f"trunc({f}, {fmt_number(k)})")
    return out


def _coalesce(pieces: list) -> list:
    out = []
    for iv, form in sorted(pieces, key=lambda rf: (rf[0].lo, 0 if rf[0].lo_closed else 1)):
        if out and out[-1][1] == form and out[-1][0].hi == iv.lo and (out[-1][0].hi_closed or iv.lo_closed):
            prev = out[-1][0]
            out[-1] = (Interval(prev.lo, iv.hi, prev.lo_closed, iv.hi_closed), form)
        else:
            out.append((iv, form))
    return out


def _nat_below(shifted: PowerSum, region: NatSet) -> NatSet:
    """``{n in region : shifted(n) < 0}``."""
    sp = region.space
    roots = shifted.roots(0, INF)
    horizon = max([region.horizon(), 1] + [math.ceil(float(r)) + 1 for r in roots])
    eventual = not shifted.is_zero and shifted.limit(1) < 0
    early = NatSet.finite(sp, [n for n in range(1, horizon + 1) if n in region and shifted(Fraction(n)) < 0])
    if eventual and not region.is_finite:
        late = intersection(region, canonicalize(sp, [Interval(horizon + 1, INF, True, False)]))
        return union(early, late)
    return early


# ---------------------------------------------------------------------------
# Hölder certification (sample-based)
# ---------------------------------------------------------------------------

def certify_holder(f: TestFunction, alpha: Number, c: Number, seed: int = 0, pairs: int = 10_000, window: tuple | None = None) -> bool:
    """Check ``|f(x)-f(y)| <= C |x-y|**alpha`` on seeded random pairs (plus pairs straddling knots)."""
    f.space.require_metric("Hölder certification")
    rng = np.random.default_rng(seed)
    alpha, c = float(alpha), float(c)
    if f.space.is_real:
        lo, hi = window or _window(f)
        xs = rng.uniform(lo, hi, pairs)
        ys = xs + rng.uniform(-1, 1, pairs) * rng.choice([1e-6, 1e-3, 1e-1, (hi - lo)], pairs)
        knots = np.array([float(k) for k in f.knots()], dtype=float)
        if len(knots):
            kx = np.repeat(knots, 8)
            ky = kx + np.tile(np.array([-1e-3, 1e-3, -1e-6, 1e-6, -0.1, 0.1, -1e-9, 1e-9]), len(knots))
            xs, ys = np.concatenate([xs, kx]), np.concatenate([ys, ky])
        dom = f.space.domain
        keep = np.array([(x in dom) and (y in dom) for x, y in zip(xs, ys)])
        xs, ys = xs[keep], ys[keep]
        dist = np.abs(xs - ys)
    else:
        top = max(64, (f.support().horizon() if isinstance(f.support(), NatSet) else 0) + 8)
        xs = rng.integers(1, top, pairs).astype(float)
        ys = rng.integers(1, top, pairs).astype(float)
        dist = (xs != ys).astype(float)
    fx, fy = f.evaluate_array(xs), f.evaluate_array(ys)
    lhs = np.abs(fx - fy)
    rhs = c * np.power(dist, alpha)
    return bool(np.all(lhs <= rhs * (1 + 1e-9) + 1e-12))


def _window(f: TestFunction) -> tuple[float, float]:
    dom = f.space.domain
    knots = [float(k) for k in f.knots()]
    lo = float(dom.lo) if not math.isinf(dom.lo) else (min(knots) - 1 if knots else -10.0)
    hi = float(dom.hi) if not math.isinf(dom.hi) else (max(knots) + 1 if knots else 10.0)
    return lo, hi


# ---------------------------------------------------------------------------
# seeded families
# ---------------------------------------------------------------------------

_DENOM = 1000


def _rational(rng, lo: Number, hi: Number) -> Fraction:
    """A random rational in ``(lo, hi)`` on a grid of ``_DENOM`` steps."""
    lo, hi = Fraction(lo), Fraction(hi)
    k = int(rng.integers(1, _DENOM))
    return lo + (hi - lo) * Fraction(k, _DENOM)


def _value(rng, gamma: Fraction) -> Fraction:
    low = 0 if getattr(rng, "nonnegative", False) else -_DENOM
    return gamma * Fraction(int(rng.integers(low, _DENOM + 1)), _DENOM)


class _Draws:
    """A numpy generator that also remembers whether values must be nonnegative."""

    def __init__(self, gen: np.random.Generator, nonnegative: bool):
        self.gen = gen
        self.nonnegative = nonnegative

    def integers(self, *args, **kwargs):
        return self.gen.integers(*args, **kwargs)


def sampling_window(space: Space) -> tuple[Fraction, Fraction]:
    """A bounded window inside the domain where random functions and sets are placed."""
    dom = space.domain
    lo = dom.lo if not math.isinf(dom.lo) else (Fraction(-10) if math.isinf(dom.hi) else dom.hi - 10)
    hi = dom.hi if not math.isinf(dom.hi) else lo + 10
    return Fraction(lo), Fraction(hi)


def random_family(
    space: Space,
    family: str,
    gamma: Number = 1,
    seed: int = 0,
    count: int = 10,
    window: tuple | None = None,
    nonnegative: bool = False,
) -> list[TestFunction]:
    """``count`` seeded members of ``family`` with values in ``[-gamma, gamma]``.

    Families: ``Cc``, ``C0``, ``Cb``, ``M`` (bounded measurable), ``holder``,
    ``uniformly_continuous`` and ``Cbs`` (continuous with bounded support).
    Continuous functions on the cofinite space are constants, so every
    continuous family there returns constants. ``nonnegative`` restricts the
    values to ``[0, gamma]``.
    """
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {', '.join(FAMILIES)}")
    gamma = exact(gamma)
    rng = _Draws(np.random.default_rng([int(seed), FAMILIES.index(family), int(nonnegative)]), nonnegative)
    if space.kind == COFINITE:
        if family == "holder":
            raise UnsupportedSpaceError("Hölder functions need a metric; the cofinite space has none")
        return _cofinite_family(space, family, gamma, rng, count)
    if space.kind == NAT:
        return _nat_family(space, family, gamma, rng, count)
    return _real_family(space, family, gamma, rng, count, window)


def _cofinite_family(space, family, gamma, rng, count):
    if family == "M":
        out = []
        for i in range(count):
            pts = sorted({int(v) for v in rng.integers(1, 65, int(rng.integers(1, 6)))})
            pieces = [(NatSet.finite(space, [p]), PowerSum.constant(_value(rng, gamma))) for p in pts]
            if i % 2:
                pieces.append((NatSet.periodic(space, 2, [0]) - NatSet.finite(space, pts), PowerSum.constant(_value(rng, gamma))))
            out.append(make(space, pieces, f"M#{i}"))
        return out
    # only constants are continuous for the cofinite topology
    return [constant(space, _value(rng, gamma), f"{family}#{i}") for i in range(count)]


def _nat_family(space, family, gamma, rng, count):
    out = []
    if family == "C0":
        out.append(make(space, [(space.whole(), PowerSum.monomial(gamma, -1))], f"{fmt_number(gamma)}/k"))
        out.append(make(space, [(space.whole(), PowerSum.monomial(gamma, -2))], f"{fmt_number(gamma)}/k**2"))
    while len(out) < count:
        i = len(out)
        pts = sorted({int(v) for v in rng.integers(1, 65, int(rng.integers(1, 9)))})
        pieces = [(NatSet.finite(space, [p]), PowerSum.constant(_value(rng, gamma))) for p in pts]
        if family in ("Cb", "M"):
            rest = NatSet.cofinite(space, pts)
            if i % 2:
                rest = rest & NatSet.periodic(space, int(rng.integers(2, 5)), [0])
            pieces.append((rest, PowerSum.constant(_value(rng, gamma))))
        pieces = [(r, f) for r, f in pieces if not f.is_zero]
        out.append(make(space, pieces, f"{family}#{i}"))
    return out[:count]


def _real_family(space, family, gamma, rng, count, window):
    lo, hi = window or sampling_window(space)
    dom = space.domain
    out = []
    for i in range(count):
        if family == "M":
            k = int(rng.integers(1, 6))
            cuts = sorted({_rational(rng, lo, hi) for _ in range(2 * k)})
            pieces = []
            for j, (a, b) in enumerate(zip(cuts, cuts[1:])):
                if j % 2 == 0:
                    flags = rng.integers(0, 2, 2)
                    val = _value(rng, gamma)
                    if val:
                        pieces.append((Interval(a, b, bool(flags[0]), bool(flags[1])), PowerSum.constant(val)))
            out.append(make(space, pieces, f"M#{i}"))
            continue
        k = int(rng.integers(2, 6))
        xs = sorted({_rational(rng, lo, hi) for _ in range(k + 2)})
        if len(xs) < 3:
            xs = sorted({lo + (hi - lo) / 4, (lo + hi) / 2, hi - (hi - lo) / 4})
        compact = family in ("Cc", "holder", "uniformly_continuous", "C0")
        ys = [_value(rng, gamma) for _ in xs]
        if compact:
            ys[0] = ys[-1] = Fraction(0)
            left = right = Fraction(0)
        elif family == "Cbs":
            # bounded support that may reach an open domain end
            if not math.isinf(dom.lo) and not dom.lo_closed and i % 2:
                xs[0] = dom.lo
            ys[-1] = Fraction(0)
            left = ys[0] if xs[0] == dom.lo else Fraction(0)
            if xs[0] != dom.lo:
                ys[0] = Fraction(0)
            right = Fraction(0)
        else:
            left, right = ys[0], ys[-1]
        pieces = _piecewise_linear(space, list(zip(xs, ys)), left, right)
        f = make(space, pieces, f"{family}#{i}")
        if family == "C0" and i % 3 == 2 and math.isinf(dom.hi):
            # add a decaying tail beyond the window
            a = max(hi, Fraction(1))
            tail = PowerSum.monomial(_value(rng, gamma) * (a + 1), -1)
            f = make(space, _bridge(f, a, tail), f"C0#{i}")
        out.append(f)
    return out


def _bridge(f: TestFunction, a: Fraction, tail: PowerSum) -> list:
    """Join the compact part to the tail continuously across ``[a, a+1]``."""
    pieces = [(r, g) for r, g in f.pieces if r.hi <= a]
    pieces.append((Interval(a, a + 1, True, False), PowerSum.line(a, 0, a + 1, tail(a + 1))))
    pieces.append((Interval(a + 1, INF, True, False), tail))
    return pieces


# ---------------------------------------------------------------------------
# literal syntax
# ---------------------------------------------------------------------------

def _split_top(text: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in text:
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return out


def _form(text: str, env: Mapping, where: str | None):
    if text.strip() == "0":
        return PowerSum()
    return compile_function(text, env, where)


def parse_function(text: str, space: Space, env: Mapping | None = None, where: str | None = None) -> TestFunction:
    """Parse ``pw[region: expr; ...]`` or a bare expression in ``x``."""
    env = dict(env or {})
    text = text.strip()
    if not text.startswith("pw["):
        region = space.domain if space.is_real else space.whole()
        return make(space, [(region, _form(text, env, where))], text)
    if not text.endswith("]"):
        raise ParseError(f"unterminated function literal {text!r}", where)
    body = text[3:-1]
    pieces = []
    covered = space.empty()
    rest_form = None
    for chunk in _split_top(body, ";"):
        if not chunk.strip():
            continue
        parts = _split_top(chunk, ":")
        if len(parts) != 2:
            raise ParseError(f"expected 'region: expression' in {chunk.strip()!r}", where)
        region_text, expr = parts[0].strip(), parts[1].strip()
        if region_text == "else":
            rest_form = _form(expr, env, where)
            continue
        region = parse_set(region_text, space, env, where)
        if not (region & covered).is_empty:
            raise ParseError(f"region {region_text} overlaps an earlier piece", where)
        covered = covered | region
        form = _form(expr, env, where)
        if space.is_real:
            pieces.extend((iv, form) for iv in region.parts)
        else:
            pieces.append((region, form))
    if rest_form is not None:
        rest = complement(covered)
        if space.is_real:
            pieces.extend((iv, rest_form) for iv in rest.parts)
        elif not rest.is_empty:
            pieces.append((rest, rest_form))
    pieces = [(r, f) for r, f in pieces if not (isinstance(f, PowerSum) and f.is_zero)]
    return make(space, pieces, text)

"""Finite Borel measures built from atoms, closed-form density pieces, and weight rules on the naturals.

A :class:`SignedMeasure` is a sum of three kinds of components:

* atoms ``(point, mass)``;
* density pieces ``(interval, density)`` on the real line, where the density is
  a :class:`~measure_modes.forms.PowerSum` (exact) or an expression evaluated by
  quadrature;
* weight rules on the naturals, ``n -> w(n)`` for ``n`` in an eventually
  periodic support (the counting measure is ``w = 1``).

An atom belongs to a set exactly when its point does, so half-open sets such
as ``(1/3, 2/3]`` pick up an endpoint atom on one side only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import DivergenceError, DomainError, ParseError, SpaceMismatchError
from .forms import (
    INF,
    ExprFunction,
    Number,
    PowerSum,
    compile_function,
    exact,
    fmt_number,
    interior_point,
    is_exact,
    number_to_json,
    parse_number,
    power_sum_from_json,
)
from . import quadrature
from .space import (
    BorelSet,
    Interval,
    NatSet,
    RealSet,
    Space,
    intersection,
    parse_interval,
    parse_set,
)

PARTIAL_SUM_TERMS = 1_000_000
PROBABILITY_FLOAT_TOL = 1e-12


# ---------------------------------------------------------------------------
# sums over eventually periodic sets of naturals
# ---------------------------------------------------------------------------

def _hurwitz(s: float, q: float) -> float:
    from scipy.special import zeta

    return float(zeta(s, q))


@lru_cache(maxsize=64)
def _periodic_partial(weight: PowerSum, modulus: int, residues: frozenset) -> float:
    """``sum(weight(n))`` over ``n <= PARTIAL_SUM_TERMS`` with ``n % modulus`` in ``residues``."""
    ns = np.arange(1, PARTIAL_SUM_TERMS + 1)
    table = np.zeros(modulus, dtype=bool)
    table[list(residues)] = True
    return float(weight.evaluate_array(ns[table[ns % modulus]].astype(float)).sum())


def _float_sum(weight: PowerSum, ns: list) -> float:
    return float(weight.evaluate_array(np.array(ns, dtype=float)).sum()) if ns else 0.0


def nat_sum(weight: PowerSum, support: NatSet) -> Number:
    """``sum(weight(n) for n in support)``: exact for finite supports, zeta-based otherwise.

    An infinite support with a term ``n**p``, ``p >= -1``, diverges by comparison
    with the harmonic series; the raised :class:`DivergenceError` carries the
    partial sum over the members up to ``PARTIAL_SUM_TERMS``.
    """
    if weight.is_zero or support.is_empty:
        return Fraction(0)
    if support.is_finite:
        return sum((weight(Fraction(n)) for n in support.elements()), Fraction(0))
    p_max, c_max = weight.terms[-1]
    if p_max >= -1:
        direction = 1 if c_max > 0 else -1
        partial = _periodic_partial(weight, support.modulus, support.residues)
        partial += _float_sum(weight, [n for n in support.added if n <= PARTIAL_SUM_TERMS])
        partial -= _float_sum(weight, [n for n in support.removed if n <= PARTIAL_SUM_TERMS])
        raise DivergenceError(
            f"sum of {weight} over an infinite set of period {support.modulus} diverges (terms decay no faster than 1/n)", direction, partial
        )
    m = support.modulus
    total = 0.0
    for p, c in weight.terms:
        for r in support.residues:
            start = r if r > 0 else m
            total += float(c) * float(m) ** float(p) * _hurwitz(-float(p), start / m)
    for n in support.added:
        total += float(weight(n))
    for n in support.removed:
        total -= float(weight(n))
    return total


# ---------------------------------------------------------------------------
# components
# ---------------------------------------------------------------------------

Density = "PowerSum | ExprFunction"


@dataclass(frozen=True)
class Piece:
    interval: Interval
    density: object

    @property
    def closed_form(self) -> bool:
        return isinstance(self.density, PowerSum)


@dataclass(frozen=True)
class DiscreteWeights:
    """Weight ``weight(n)`` on each natural ``n`` in ``support``."""

    weight: PowerSum
    support: NatSet

    @property
    def kind(self) -> str:
        if self.support.is_finite or self.weight.is_zero or self.weight.terms[-1][0] < -1:
            return "summable"
        return "divergent"

    def __call__(self, n: int) -> Number:
        return self.weight(Fraction(n)) if n in self.support else Fraction(0)


def _merge_atoms(atoms: Iterable) -> tuple:
    acc: dict = {}
    for x, w in atoms:
        x = exact(x)
        acc[x] = acc.get(x, 0) + exact(w)
    return tuple(sorted((x, w) for x, w in acc.items() if w != 0))


@dataclass(frozen=True)
class SignedMeasure:
    space: Space
    atoms: tuple = ()
    pieces: tuple = ()
    discrete: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "atoms", _merge_atoms(self.atoms))
        pieces = tuple(p if isinstance(p, Piece) else Piece(*p) for p in self.pieces)
        pieces = tuple(p for p in pieces if not p.interval.is_point and not (isinstance(p.density, PowerSum) and p.density.is_zero))
        object.__setattr__(self, "pieces", pieces)
        object.__setattr__(self, "discrete", tuple(d for d in self.discrete if not d.weight.is_zero and not d.support.is_empty))
        for x, _ in self.atoms:
            if not self.space.contains_point(x):
                raise DomainError(f"atom at {fmt_number(x)} lies outside {self.space}")
        if self.space.is_real:
            if self.discrete:
                raise DomainError("weight rules on the naturals need a natural-number space")
            for p in self.pieces:
                if not self.space.domain.contains_interval(p.interval):
                    raise DomainError(f"density piece on {p.interval} lies outside the domain {self.space.domain}")
        else:
            if self.pieces:
                raise DomainError("density pieces need a real-line space")
            for d in self.discrete:
                if d.support.space != self.space:
                    raise SpaceMismatchError(d.support.space, self.space)

    # -- evaluation ------------------------------------------------------
    def mass(self, a: BorelSet) -> Number:
        """Exact signed mass of ``a``; raises :class:`DivergenceError` for infinite sums."""
        if a.space != self.space:
            raise SpaceMismatchError(self.space, a.space)
        total = sum((w for x, w in self.atoms if x in a), Fraction(0))
        if isinstance(a, RealSet):
            for piece in self.pieces:
                for part in a.intervals:
                    cut = piece.interval.intersect(part)
                    if cut is not None and not cut.is_point:
                        total = total + _integrate_density(piece.density, cut.lo, cut.hi)
        else:
            for d in self.discrete:
                total = total + nat_sum(d.weight, intersection(d.support, a))
        return total

    def total_mass(self) -> Number:
        return self.mass(self.space.whole())

    def is_probability(self) -> bool:
        total = self.total_mass()
        if is_exact(total):
            return total == 1
        return abs(total - 1) <= PROBABILITY_FLOAT_TOL

    @property
    def is_exact(self) -> bool:
        return (
            all(is_exact(x) and is_exact(w) for x, w in self.atoms)
            and all(isinstance(p.density, PowerSum) and p.density.is_exact and is_exact(p.interval.lo) and is_exact(p.interval.hi) for p in self.pieces)
            and all(d.weight.is_exact for d in self.discrete)
        )

    @property
    def is_finite(self) -> bool:
        if self.space.is_real:
            return True
        return all(d.kind == "summable" for d in self.discrete)

    def atom_at(self, x) -> Number:
        for p, w in self.atoms:
            if p == x:
                return w
        return Fraction(0)

    def density_at(self, x) -> Number:
        return sum((p.density(x) for p in self.pieces if x in p.interval), Fraction(0))

    def weight_at(self, n: int) -> Number:
        """Point mass of ``{n}`` on the naturals."""
        return self.atom_at(n) + sum((d(n) for d in self.discrete), Fraction(0))

    def breakpoints(self) -> list[Number]:
        pts = {x for x, _ in self.atoms}
        for p in self.pieces:
            pts.update(e for e in (p.interval.lo, p.interval.hi) if not math.isinf(e))
        return sorted(pts)

    def cells(self) -> list[tuple[Number, Number, object]]:
        """Open cells between consecutive piece endpoints with their summed density."""
        ends = set()
        for p in self.pieces:
            ends.update((p.interval.lo, p.interval.hi))
        ends = sorted(ends)
        out = []
        for lo, hi in zip(ends, ends[1:]):
            mid = interior_point(lo, hi)
            dens = [p.density for p in self.pieces if mid in p.interval]
            if not dens:
                continue
            if all(isinstance(d, PowerSum) for d in dens):
                total = sum(dens[1:], dens[0])
                if total.is_zero:
                    continue
            else:
                total = _SumDensity(tuple(dens))
            out.append((lo, hi, total))
        return out

    # -- algebra ---------------------------------------------------------
    def _same(self, other: "SignedMeasure"):
        if self.space != other.space:
            raise SpaceMismatchError(self.space, other.space)

    def __add__(self, other: "SignedMeasure") -> "SignedMeasure":
        self._same(other)
        cls = Measure if isinstance(self, Measure) and isinstance(other, Measure) else SignedMeasure
        return cls(self.space, self.atoms + other.atoms, self.pieces + other.pieces, self.discrete + other.discrete)

    def __neg__(self) -> "SignedMeasure":
        return scale(self, -1)

    def __sub__(self, other: "SignedMeasure") -> "SignedMeasure":
        return difference(self, other)

    # -- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        out = {"space": self.space.to_json()}
        out["atoms"] = [{"at": number_to_json(x), "mass": number_to_json(w)} for x, w in self.atoms]
        out["pieces"] = [{"interval": str(p.interval), "density": p.density.to_json()} for p in self.pieces]
        if self.discrete:
            out["discrete"] = [
                {"rule": d.weight.to_json(), "support": str(d.support), "kind": d.kind} for d in self.discrete
            ]
        return out

    def __str__(self) -> str:
        parts = [f"{fmt_number(w)}*delta[{fmt_number(x)}]" for x, w in self.atoms]
        parts += [f"({p.density}) on {p.interval}" for p in self.pieces]
        parts += [f"({d.weight}) on {d.support}" for d in self.discrete]
        return " + ".join(parts) if parts else "0"


class Measure(SignedMeasure):
    """A nonnegative :class:`SignedMeasure`."""

    def __post_init__(self):
        super().__post_init__()
        for x, w in self.atoms:
            if w < 0:
                raise ValueError(f"negative atom {fmt_number(w)} at {fmt_number(x)}")
        for p in self.pieces:
            if _density_min_sign(p.density, p.interval) < 0:
                raise ValueError(f"density {p.density} takes negative values on {p.interval}")
        for d in self.discrete:
            if not d.support.is_finite:
                if d.weight.terms[-1][1] < 0:
                    raise ValueError(f"weight rule {d.weight} is eventually negative")
            horizon = max(d.support.horizon(), *(math.ceil(float(r)) for r in d.weight.roots(0, INF)), 0) + d.support.modulus
            for n in range(1, horizon + 1):
                if d(n) < 0:
                    raise ValueError(f"weight rule {d.weight} is negative at n={n}")


@dataclass(frozen=True)
class _SumDensity:
    parts: tuple

    def __call__(self, x):
        return sum(float(p(x)) for p in self.parts)

    def evaluate_array(self, xs):
        return sum(quadrature.vectorize(p)(xs) for p in self.parts)


def _density_min_sign(density, iv: Interval) -> int:
    if isinstance(density, PowerSum):
        cuts = [iv.lo] + density.roots(iv.lo, iv.hi) + [iv.hi]
        signs = [density.sign_between(a, b) for a, b in zip(cuts, cuts[1:])]
        return min(signs)
    lo = float(iv.lo) if not math.isinf(iv.lo) else -1e3
    hi = float(iv.hi) if not math.isinf(iv.hi) else 1e3
    xs = np.linspace(lo, hi, 1001)[1:-1]
    vals = quadrature.vectorize(density)(xs)
    return -1 if np.any(vals < 0) else 1


def _integrate_density(density, a: Number, b: Number) -> Number:
    if isinstance(density, PowerSum):
        return density.integrate(a, b)
    if math.isinf(a) or math.isinf(b):
        raise ValueError("expression densities must live on bounded pieces")
    value, _ = quadrature.integrate(density, [a, b])
    return value


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def mass(m: SignedMeasure, a: BorelSet) -> Number:
    return m.mass(a)


def total_mass(m: SignedMeasure) -> Number:
    return m.total_mass()


def is_probability(m: SignedMeasure) -> bool:
    return m.is_probability()


def restrict(m: SignedMeasure, a: BorelSet) -> SignedMeasure:
    """``B -> m(A & B)``."""
    if a.space != m.space:
        raise SpaceMismatchError(m.space, a.space)
    atoms = [(x, w) for x, w in m.atoms if x in a]
    pieces = []
    discrete = []
    if isinstance(a, RealSet):
        for piece in m.pieces:
            for part in a.intervals:
                cut = piece.interval.intersect(part)
                if cut is not None and not cut.is_point:
                    pieces.append(Piece(cut, piece.density))
    else:
        discrete = [DiscreteWeights(d.weight, intersection(d.support, a)) for d in m.discrete]
    return type(m)(m.space, tuple(atoms), tuple(pieces), tuple(discrete))


def scale(m: SignedMeasure, c: Number) -> SignedMeasure:
    c = exact(c)
    if isinstance(m, Measure) and c < 0:
        cls = SignedMeasure
    else:
        cls = type(m)
    pieces = tuple(Piece(p.interval, p.density * c if isinstance(p.density, PowerSum) else _Scaled(p.density, c)) for p in m.pieces)
    return cls(
        m.space,
        tuple((x, w * c) for x, w in m.atoms),
        pieces,
        tuple(DiscreteWeights(d.weight * c, d.support) for d in m.discrete),
    )


@dataclass(frozen=True)
class _Scaled:
    inner: object
    c: Number

    def __call__(self, x):
        return float(self.c) * float(self.inner(x))

    def evaluate_array(self, xs):
        return float(self.c) * quadrature.vectorize(self.inner)(xs)

    def to_json(self):
        return {"form": "expression", "params": {"expr": f"({fmt_number(self.c)})*({self.inner})"}}

    def __str__(self):
        return f"{fmt_number(self.c)}*({self.inner})"


def add(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    return mu + nu


def difference(mu: SignedMeasure, nu: SignedMeasure) -> SignedMeasure:
    mu._same(nu)
    neg = scale(nu, -1)
    return SignedMeasure(mu.space, mu.atoms + neg.atoms, mu.pieces + neg.pieces, mu.discrete + neg.discrete)


def zero(space: Space) -> Measure:
    return Measure(space)


def dirac(space: Space, x: Number, w: Number = 1) -> Measure:
    return Measure(space, ((exact(x), exact(w)),))


def lebesgue(space: Space, iv: Interval, c: Number = 1) -> Measure:
    return Measure(space, (), (Piece(iv, PowerSum.constant(exact(c))),))


def counting(space: Space, support: NatSet | None = None) -> Measure:
    support = support if support is not None else space.whole()
    return Measure(space, (), (), (DiscreteWeights(PowerSum.constant(1), support),))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def _density_from_json(form: dict, iv: Interval, env: Mapping, where: str) -> list[Piece]:
    if not isinstance(form, dict):
        raise ParseError("density must be an object with 'form' and 'params'", where)
    if form.get("form") == "piecewise_linear":
        knots = form.get("params", {}).get("knots")
        if not knots or len(knots) < 2:
            raise ParseError("piecewise_linear needs at least two knots", where)
        pts = [(parse_number(x, env, where), parse_number(y, env, where)) for x, y in knots]
        out = []
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not x0 < x1:
                raise ParseError("piecewise_linear knots must increase", where)
            cut = iv.intersect(Interval(x0, x1, True, True))
            if cut is not None and not cut.is_point:
                out.append(Piece(cut, PowerSum.line(x0, y0, x1, y1)))
        return out
    if form.get("form") == "expression":
        return [Piece(iv, compile_function(form["params"]["expr"], env, where))]
    return [Piece(iv, power_sum_from_json(form, where, env))]


def _weight_from_json(rule, env: Mapping, where: str) -> PowerSum:
    if isinstance(rule, str):
        rule = {"form": rule}
    if rule.get("form") == "counting":
        return PowerSum.constant(1)
    if rule.get("form") == "expression":
        # the summation index is ``k``; ``n`` stays free for sequence templates
        from .forms import NotClosedForm, evaluate

        try:
            out = evaluate(rule["params"]["expr"], {**env, "k": PowerSum.x()}, where)
        except NotClosedForm as exc:
            raise ParseError("weight rules must stay in the power-sum family", where) from exc
        return out if isinstance(out, PowerSum) else PowerSum.constant(out)
    return power_sum_from_json(rule, where, env)


def measure_from_json(data: Mapping, env: Mapping | None = None, where: str = "measure", signed: bool = False) -> SignedMeasure:
    """Decode the measure-description format.

    ``env`` binds free names (``n`` in sequence templates). Numbers may be JSON
    numbers or strings such as ``"1/3"`` or ``"(n-1)/n"``.
    """
    env = dict(env or {})
    if not isinstance(data, Mapping):
        raise ParseError("measure must be a JSON object", where)
    try:
        space = Space.from_json(data["space"], f"{where}.space")
    except KeyError as exc:
        raise ParseError("missing field 'space'", where) from exc
    atoms = []
    for i, atom in enumerate(data.get("atoms", [])):
        w = f"{where}.atoms[{i}]"
        try:
            atoms.append((parse_number(atom["at"], env, w), parse_number(atom["mass"], env, w)))
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", w) from exc
    pieces = []
    for i, piece in enumerate(data.get("pieces", [])):
        w = f"{where}.pieces[{i}]"
        try:
            iv = parse_interval(piece["interval"], env, w)
            pieces.extend(_density_from_json(piece["density"], iv, env, f"{w}.density"))
        except KeyError as exc:
            raise ParseError(f"missing field {exc.args[0]!r}", w) from exc
    discrete = []
    raw = data.get("discrete", [])
    if isinstance(raw, Mapping):
        raw = [raw]
    for i, rule in enumerate(raw):
        w = f"{where}.discrete[{i}]"
        support = parse_set(rule.get("support", "all"), space, env, w) if not space.is_real else None
        if support is None:
            raise ParseError("weight rules need a natural-number space", w)
        dw = DiscreteWeights(_weight_from_json(rule.get("rule", "counting"), env, w), support)
        declared = rule.get("kind")
        if declared is not None and declared != dw.kind:
            raise ParseError(f"declared kind {declared!r} but the rule is {dw.kind}", w)
        discrete.append(dw)
    cls = SignedMeasure if signed else Measure
    try:
        return cls(space, tuple(atoms), tuple(pieces), tuple(discrete))
    except DomainError as exc:
        raise ParseError(str(exc), where) from exc
    except ValueError as exc:
        if isinstance(exc, ParseError):
            raise
        raise ParseError(str(exc), where) from exc

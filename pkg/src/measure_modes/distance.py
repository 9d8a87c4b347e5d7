"""Hahn decomposition, total-variation quantities, and restricted-class sup searches.

Three numbers describe the distance between two finite measures, and the API
never calls any one of them "the" TV distance:

* ``jordan_norm``: ``|mu - nu|(X) = positive_mass + negative_mass``;
* ``sup_sets``: ``sup_A |mu(A) - nu(A)| = max(positive_mass, negative_mass)``;
* ``twice_sup_sets``: ``2 * sup_sets`` (equal to ``jordan_norm`` when the two
  total masses agree).

``sup_estimate`` approaches the same suprema through restricted classes (open
or closed bounded sets, compact sets, continuous functions, ...). Candidates are
built from the Hahn sets at a ladder of dilations ``eps``; the exact optimum is
known from the Hahn decomposition, so the reported gap is the genuine deficit
of the class at that ``eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import UnsupportedSpaceError
from .forms import INF, Number, PowerSum, fmt_number, interior_point, is_exact, number_to_json
from .integrate import integrate
from .measure import SignedMeasure, difference
from .space import (
    COFINITE,
    NAT,
    BorelSet,
    Interval,
    NatSet,
    RealSet,
    canonicalize,
    closure,
    complement,
    difference as set_difference,
    intersection,
    interior,
    is_closed,
    is_compact,
    is_open,
    union,
)
from .testfn import TestFunction, _piecewise_linear, make

SET_CLASSES = ("closed_bounded_sets", "open_bounded_sets", "compact_sets")
FUNCTION_CLASSES = (
    "M_gamma",
    "M_gamma_bounded_support",
    "continuous_bounded_support",
    "uniformly_continuous",
    "holder_bounded",
)
CLASSES = SET_CLASSES + FUNCTION_CLASSES
EPS_LADDER = (Fraction(1, 10**2), Fraction(1, 10**4), Fraction(1, 10**6))
EPS_FLOOR = Fraction(1, 10**12)
DEFAULT_TOL = 1e-6


# ---------------------------------------------------------------------------
# Hahn decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HahnDecomposition:
    positive_set: BorelSet
    negative_set: BorelSet
    positive_mass: Number
    negative_mass: Number

    @property
    def jordan_norm(self) -> Number:
        return self.positive_mass + self.negative_mass


def _signed_cells(d: SignedMeasure) -> list[tuple[Number, Number, PowerSum, int]]:
    """Open cells on which the density of ``d`` has constant nonzero sign."""
    out = []
    for lo, hi, dens in d.cells():
        if not isinstance(dens, PowerSum):
            raise ValueError("Hahn decomposition needs closed-form densities")
        cuts = [lo] + dens.roots(lo, hi) + [hi]
        for a, b in zip(cuts, cuts[1:]):
            s = dens.sign_between(a, b)
            if s:
                out.append((a, b, dens, s))
    return out


def hahn(d: SignedMeasure) -> HahnDecomposition:
    """Positive set: open cells of positive density plus positive atoms, minus negative atoms."""
    sp = d.space
    if sp.is_real:
        cells = [Interval(a, b, False, False) for a, b, _, s in _signed_cells(d) if s > 0]
        pos_pts = [x for x, w in d.atoms if w > 0]
        neg_pts = [x for x, w in d.atoms if w < 0]
        positive = set_difference(canonicalize(sp, cells, pos_pts), canonicalize(sp, [], neg_pts))
    else:
        positive = _nat_positive_set(d)
    negative = complement(positive)
    return HahnDecomposition(positive, negative, d.mass(positive), -d.mass(negative))


def _nat_positive_set(d: SignedMeasure) -> NatSet:
    sp = d.space
    modulus = 1
    for rule in d.discrete:
        modulus = modulus * rule.support.modulus // math.gcd(modulus, rule.support.modulus)
    horizon = max([1] + [int(x) for x, _ in d.atoms] + [rule.support.horizon() for rule in d.discrete])
    residues = set()
    for r in range(modulus):
        total = PowerSum()
        for rule in d.discrete:
            if (r % rule.support.modulus) in rule.support.residues:
                total = total + rule.weight
        for root in total.roots(0, INF):
            horizon = max(horizon, math.ceil(float(root)))
        # the dominant term fixes the sign for large k, even when the weights decay to 0
        if not total.is_zero and total.terms[-1][1] > 0:
            residues.add(r)
    base = NatSet(sp, modulus, frozenset(residues), frozenset())
    horizon += modulus
    flips = {n for n in range(1, horizon + 1) if (d.weight_at(n) > 0) != (n in base)}
    return NatSet(sp, modulus, frozenset(residues), frozenset(flips))


def sup_sets(mu: SignedMeasure, nu: SignedMeasure) -> Number:
    h = hahn(difference(mu, nu))
    return max(h.positive_mass, h.negative_mass)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClassEstimate:
    cls: str
    gamma: Number
    value: Number
    optimum: Number
    attained: bool
    witness: str | None
    trail: tuple = ()  # (eps, value) pairs, largest eps first

    @property
    def gap(self) -> Number:
        return self.optimum - self.value

    def gap_at(self, eps: Number) -> Number | None:
        for e, v in self.trail:
            if e == eps:
                return self.optimum - v
        return None

    def to_json(self) -> dict:
        return {
            "class": self.cls,
            "gamma": number_to_json(self.gamma),
            "value": number_to_json(self.value),
            "optimum": number_to_json(self.optimum),
            "gap": number_to_json(self.gap),
            "attained": self.attained,
            "witness": self.witness,
            "trail": [{"eps": number_to_json(e), "value": number_to_json(v)} for e, v in self.trail],
        }


@dataclass(frozen=True)
class Attainability:
    borel: bool
    open: bool
    closed: bool
    continuous: bool
    witness: str | None
    open_witness: str | None = None
    closed_witness: str | None = None
    continuous_witness: str | None = None

    @property
    def summary(self) -> str:
        kinds = [k for k, ok in (("open", self.open), ("closed", self.closed), ("continuous", self.continuous)) if ok]
        if kinds:
            return "attained by " + ", ".join(kinds)
        return "Borel only" if self.borel else "not attained"

    def to_json(self) -> dict:
        return {
            "attained_by_borel": self.borel,
            "attained_by_open": self.open,
            "attained_by_closed": self.closed,
            "attained_by_continuous": self.continuous,
            "witness": self.witness,
            "open_witness": self.open_witness,
            "closed_witness": self.closed_witness,
            "continuous_witness": self.continuous_witness,
            "summary": self.summary,
        }


@dataclass(frozen=True)
class TVReport:
    jordan_norm: Number
    sup_sets: Number
    twice_sup_sets: Number
    positive_mass: Number
    negative_mass: Number
    positive_set: str
    negative_set: str
    estimates: tuple = ()
    attainability: Attainability | None = None

    def estimate(self, cls: str) -> ClassEstimate:
        for e in self.estimates:
            if e.cls == cls:
                return e
        raise KeyError(cls)

    def to_json(self) -> dict:
        out = {
            "jordan_norm": number_to_json(self.jordan_norm),
            "sup_sets": number_to_json(self.sup_sets),
            "twice_sup_sets": number_to_json(self.twice_sup_sets),
            "positive_mass": number_to_json(self.positive_mass),
            "negative_mass": number_to_json(self.negative_mass),
            "positive_set": self.positive_set,
            "negative_set": self.negative_set,
            "estimates": [e.to_json() for e in self.estimates],
        }
        if self.attainability is not None:
            out["attainability"] = self.attainability.to_json()
        return out


def tv(mu: SignedMeasure, nu: SignedMeasure, classes: Iterable[str] | None = (), gamma: Number = 1, tol: float = DEFAULT_TOL) -> TVReport:
    """All distance quantities for ``mu`` and ``nu``; ``classes=None`` runs every class estimator."""
    d = difference(mu, nu)
    h = hahn(d)
    sup = max(h.positive_mass, h.negative_mass)
    metric = d.space.kind != COFINITE
    if classes is None:
        classes = CLASSES if metric else ()
    estimates = tuple(_estimate(d, h, c, Fraction(gamma), tol) for c in classes)
    attain = _attainability(d, h) if metric else None
    return TVReport(h.jordan_norm, sup, 2 * sup, h.positive_mass, h.negative_mass, str(h.positive_set), str(h.negative_set), estimates, attain)


def sup_estimate(mu: SignedMeasure, nu: SignedMeasure, cls: str, gamma: Number = 1, tol: float = DEFAULT_TOL) -> ClassEstimate:
    d = difference(mu, nu)
    return _estimate(d, hahn(d), cls, Fraction(gamma), tol)


def attainability(mu: SignedMeasure, nu: SignedMeasure) -> Attainability:
    d = difference(mu, nu)
    return _attainability(d, hahn(d))


# ---------------------------------------------------------------------------
# candidate construction
# ---------------------------------------------------------------------------

def _close(a: Number, b: Number) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return abs(float(a) - float(b)) <= 1e-12


class _Search:
    """Evaluates candidates for one signed measure and remembers the best per class."""

    def __init__(self, d: SignedMeasure, h: HahnDecomposition):
        self.d = d
        self.h = h
        self.sp = d.space
        self.extent = self._extent()

    def _extent(self) -> Number:
        pts = [abs(p) for p in self.d.breakpoints()]
        return max(pts + [Fraction(0)]) + 1

    def radius(self, eps: Fraction) -> Number:
        """Radius ``R`` with ``|d|`` outside ``[-R, R]`` at most ``eps`` (exactly zero if the support is bounded)."""
        dom = self.sp.domain
        r = Fraction(self.extent)
        if not (math.isinf(dom.lo) or math.isinf(dom.hi)):
            return r
        for _ in range(200):
            if self._tail(r) <= eps:
                return r
            r *= 2
        return r

    def _tail(self, r: Number) -> Number:
        far = complement(canonicalize(self.sp, [Interval(-r, r, True, True).intersect(self.sp.domain) or Interval(0, 0)]))
        return self.d.mass(intersection(far, self.h.positive_set)) - self.d.mass(intersection(far, self.h.negative_set))

    def ball(self, r: Number, closed: bool) -> RealSet:
        iv = Interval(-r, r, closed, closed).intersect(self.sp.domain)
        return canonicalize(self.sp, [iv] if iv else [])

    def nbhd(self, points: Sequence[Number], eps: Number) -> RealSet:
        parts = []
        for p in points:
            iv = Interval(p - eps, p + eps, False, False).intersect(self.sp.domain)
            if iv is not None:
                parts.append(iv)
        return canonicalize(self.sp, parts)

    def points(self, pts) -> RealSet:
        return canonicalize(self.sp, [], pts)

    def sides(self):
        """``(target set, sign)`` for both Hahn sides."""
        return ((self.h.positive_set, 1), (self.h.negative_set, -1))

    def atoms(self, sign: int, helpful: bool):
        return [x for x, w in self.d.atoms if (sign * w > 0) == helpful]

    def value(self, a: BorelSet, sign: int) -> Number:
        return sign * self.d.mass(a)

    # -- set classes -------------------------------------------------------
    def open_candidate(self, t: BorelSet, sign: int, eps: Number | None, bounded: bool) -> RealSet:
        harmful = self.points(self.atoms(sign, helpful=False))
        o = interior(t)
        if eps is not None:
            o = union(o, self.nbhd(self.atoms(sign, helpful=True), eps))
        o = set_difference(o, harmful)
        if bounded:
            r = self.radius(eps if eps is not None else Fraction(0))
            o = intersection(o, self.ball(r, closed=False))
        return o

    def closed_candidate(self, t: BorelSet, sign: int, eps: Number | None, bounded: bool, compact: bool = False) -> RealSet:
        c = closure(t)
        if eps is not None:
            c = set_difference(c, self.nbhd(self.atoms(sign, helpful=False), eps))
        if bounded or compact:
            r = self.radius(eps if eps is not None else Fraction(0))
            c = intersection(c, self.ball(r, closed=True))
        if compact:
            dom = self.sp.domain
            lo = dom.lo if dom.lo_closed or math.isinf(dom.lo) else dom.lo + (eps if eps is not None else 0)
            hi = dom.hi if dom.hi_closed or math.isinf(dom.hi) else dom.hi - (eps if eps is not None else 0)
            if lo < hi:
                c = intersection(c, canonicalize(self.sp, [Interval(lo, hi, True, True).intersect(dom)]))
            else:
                c = self.sp.empty()
        return c

    # -- function classes -------------------------------------------------
    def sign_function(self, gamma: Fraction, eps: Number | None, cutoff: Number | None) -> TestFunction:
        """Continuous piecewise-linear stand-in for ``gamma * (1_P - 1_N)`` with ramps of width ``<= eps``."""
        cells = _signed_cells(self.d)
        pts = set(self.d.breakpoints())
        for a, b, _, _ in cells:
            pts.update(e for e in (a, b) if not math.isinf(e))
        if cutoff is not None:
            pts.update((-cutoff, cutoff))
        pts = sorted(pts)
        if not pts:
            return make(self.sp, [])

        def cell_sign(a, b):
            mid = interior_point(a, b)
            if cutoff is not None and not (-cutoff < mid < cutoff):
                return 0
            for lo, hi, _, s in cells:
                if lo <= a and b <= hi:
                    return s
            return 0

        gaps = list(zip(pts, pts[1:]))
        width = eps if eps is not None else Fraction(1)
        if gaps:
            width = min(width, min(b - a for a, b in gaps) / 3)
        signs = [cell_sign(a, b) for a, b in gaps]
        left_sign = cell_sign(-INF, pts[0])
        right_sign = cell_sign(pts[-1], INF)
        knots = []
        for i, p in enumerate(pts):
            w = self.d.atom_at(p)
            s_left = signs[i - 1] if i > 0 else left_sign
            s_right = signs[i] if i < len(signs) else right_sign
            if w:
                v = 1 if w > 0 else -1
            elif cutoff is not None and abs(p) == cutoff:
                v = 0
            else:
                v = s_left if s_left == s_right else 0
            if s_left != v:
                knots.append((p - width, gamma * s_left))
            knots.append((p, gamma * v))
            if s_right != v:
                knots.append((p + width, gamma * s_right))
        knots = _dedupe(knots)
        pieces = _piecewise_linear(self.sp, knots, gamma * left_sign, gamma * right_sign)
        return make(self.sp, pieces, "")

    def function_value(self, f: TestFunction) -> Number:
        return integrate(f, self.d).value


def _dedupe(knots):
    out = []
    for x, y in sorted(knots, key=lambda k: k[0]):
        if out and out[-1][0] == x:
            continue
        out.append((x, y))
    return out


def _estimate(d: SignedMeasure, h: HahnDecomposition, cls: str, gamma: Fraction, tol: float) -> ClassEstimate:
    if cls not in CLASSES:
        raise ValueError(f"unknown class {cls!r}; expected one of {', '.join(CLASSES)}")
    sp = d.space
    if sp.kind == COFINITE:
        raise UnsupportedSpaceError("restricted-class searches need a metric; the cofinite space has none")
    if cls in SET_CLASSES:
        optimum = max(h.positive_mass, h.negative_mass)
    else:
        optimum = gamma * h.jordan_norm
    if sp.kind == NAT:
        return _estimate_nat(d, h, cls, gamma, optimum)
    search = _Search(d, h)

    def evaluate(eps):
        """Best (value, witness) for one eps (``None`` means the eps-free candidate)."""
        best, witness = None, None
        if cls in SET_CLASSES:
            for t, sign in search.sides():
                if cls == "open_bounded_sets":
                    cand = search.open_candidate(t, sign, eps, bounded=True)
                    ok = True
                elif cls == "closed_bounded_sets":
                    cand = search.closed_candidate(t, sign, eps, bounded=True)
                    ok = True
                else:
                    cand = search.closed_candidate(t, sign, eps, bounded=True, compact=True)
                    ok = is_compact(cand)
                if eps is None:
                    # eps-free candidates only count when they really are in the class
                    if cls == "open_bounded_sets":
                        ok = is_open(cand) and not _needs_radius(search)
                    elif cls == "closed_bounded_sets":
                        ok = is_closed(cand) and not _needs_radius(search)
                    else:
                        ok = is_compact(cand)
                if not ok:
                    continue
                v = search.value(cand, sign)
                if best is None or v > best:
                    best, witness = v, str(cand)
            return best, witness
        if cls == "M_gamma":
            return gamma * h.jordan_norm, f"{fmt_number(gamma)}*(1[{h.positive_set}] - 1[{h.negative_set}])"
        if cls == "M_gamma_bounded_support":
            if eps is None and _needs_radius(search):
                return None, None
            r = search.radius(eps if eps is not None else Fraction(0))
            ball = search.ball(r, closed=True)
            v = gamma * (d.mass(intersection(h.positive_set, ball)) - d.mass(intersection(h.negative_set, ball)))
            return v, f"{fmt_number(gamma)}*(1[P] - 1[N]) on {ball}"
        cutoff = None
        if cls == "continuous_bounded_support":
            if eps is None and _needs_radius(search):
                return None, None
            cutoff = search.radius(eps if eps is not None else Fraction(0)) if _needs_radius(search) else None
        f = search.sign_function(gamma, eps, cutoff)
        return search.function_value(f), "continuous piecewise-linear sign approximant"

    free_value, free_witness = evaluate(None)
    best, witness = free_value, free_witness
    attained = free_value is not None and _close(free_value, optimum)
    trail = []
    ladder = list(EPS_LADDER)
    # function-class values scale with gamma; normalizing the stopping gap keeps the ladder (and so the scaling law) exact
    unit = gamma if cls in FUNCTION_CLASSES and gamma > 0 else 1
    i = 0
    while i < len(ladder):
        eps = ladder[i]
        v, w = evaluate(eps)
        if v is not None:
            trail.append((eps, v))
            if best is None or v > best:
                best, witness = v, w
            if _close(v, optimum):
                attained = True
        i += 1
        if i == len(ladder) and best is not None and float((optimum - best) / unit) >= tol / 10 and ladder[-1] / 100 >= EPS_FLOOR:
            ladder.append(ladder[-1] / 100)
    if best is None:
        best = Fraction(0)
    return ClassEstimate(cls, gamma, best, optimum, attained, witness if attained else None, tuple(trail))


def _needs_radius(search: _Search) -> bool:
    """True when some mass of ``|d|`` lies outside every bounded window."""
    dom = search.sp.domain
    if not (math.isinf(dom.lo) or math.isinf(dom.hi)):
        return False
    return search._tail(search.extent) > 0


def _estimate_nat(d: SignedMeasure, h: HahnDecomposition, cls: str, gamma: Fraction, optimum: Number) -> ClassEstimate:
    """Discrete metric: every set is clopen and bounded, every function continuous and Lipschitz."""
    sp = d.space
    if cls != "compact_sets":
        if cls in SET_CLASSES:
            pos = h.positive_mass >= h.negative_mass
            t = h.positive_set if pos else h.negative_set
            return ClassEstimate(cls, gamma, optimum, optimum, True, str(t), ())
        return ClassEstimate(cls, gamma, optimum, optimum, True, f"{fmt_number(gamma)}*(1[{h.positive_set}] - 1[{h.negative_set}])", ())
    # compact means finite: truncate the Hahn sets
    best, witness, attained, trail = None, None, False, []
    for t, sign in ((h.positive_set, 1), (h.negative_set, -1)):
        if t.is_finite:
            v = sign * d.mass(t)
            if best is None or v > best:
                best, witness = v, str(t)
            attained = attained or _close(v, optimum)
    for eps in EPS_LADDER:
        row = None
        for t, sign in ((h.positive_set, 1), (h.negative_set, -1)):
            r = 1
            while True:
                cut = intersection(t, NatSet.finite(sp, range(1, r + 1)))
                rest = set_difference(t, cut)
                if sign * d.mass(rest) <= eps or rest.is_empty:
                    break
                r *= 2
            v = sign * d.mass(cut)
            row = v if row is None else max(row, v)
            if best is None or v > best:
                best, witness = v, str(cut)
            attained = attained or _close(v, optimum)
        trail.append((eps, row))
    return ClassEstimate(cls, gamma, best, optimum, attained, witness if attained else None, tuple(trail))


def _attainability(d: SignedMeasure, h: HahnDecomposition) -> Attainability:
    """Whether ``sup_sets`` (or the function-class optimum) is reached by open, closed, or continuous witnesses."""
    sp = d.space
    sup = max(h.positive_mass, h.negative_mass)
    borel_witness = str(h.positive_set if h.positive_mass >= h.negative_mass else h.negative_set)
    if sp.kind == NAT:
        return Attainability(True, True, True, True, borel_witness, borel_witness, borel_witness, "sign function")
    search = _Search(d, h)
    found = {"open": None, "closed": None}
    for eps in (None,) + EPS_LADDER:
        for t, sign in search.sides():
            o = search.open_candidate(t, sign, eps, bounded=False)
            if found["open"] is None and is_open(o) and _close(search.value(o, sign), sup):
                found["open"] = str(o)
            c = search.closed_candidate(t, sign, eps, bounded=False)
            if found["closed"] is None and is_closed(c) and _close(search.value(c, sign), sup):
                found["closed"] = str(c)
    cont = None
    for eps in (None,) + EPS_LADDER:
        f = search.sign_function(Fraction(1), eps, None)
        if _close(search.function_value(f), h.jordan_norm):
            cont = str(f)
            break
    return Attainability(
        True,
        found["open"] is not None,
        found["closed"] is not None,
        cont is not None,
        borel_witness,
        found["open"],
        found["closed"],
        cont,
    )

"""Spaces, Borel sets in canonical form, topology, and point-set distance.

Three space kinds are supported:

* ``real``: an interval domain of the real line with the Euclidean metric;
* ``nat``: the naturals ``{1, 2, ...}`` with the discrete metric;
* ``cofinite``: the naturals with the cofinite topology (no metric).

Real-line sets are finite unions of intervals with per-endpoint open/closed
flags plus isolated points. Sets of naturals are "eventually periodic": a
residue pattern modulo ``m`` with finitely many exceptions. That family is a
Boolean algebra, contains every finite and cofinite set, and also holds the
infinite, co-infinite sets (the even numbers, say) that separate setwise
convergence from its open/closed-set tests on the cofinite space.

Set literal grammar (``parse_set``)::

    expr     := term (op term)*          op: 'u' | '|' | '&' | '\\'   (left to right)
    term     := interval | '{' [num (',' num)*] '}' | 'co{' ... '}'
              | 'per(' m ':' '{' r (',' r)* '}' ')' | 'empty' | 'all' | '(' expr ')'
    interval := ('(' | '[') num ',' num (')' | ']')

``num`` is any arithmetic expression (``1/3``, ``0.9``, ``inf``, ``n+1`` with
``n`` bound by the caller). On the naturals an interval means the integers it
contains, ``co{...}`` is a complement, and ``per(2:{0})`` is the even numbers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterable, Iterator, Mapping

from .errors import DomainError, ParseError, UnsupportedSpaceError
from .forms import INF, Number, evaluate, exact, fmt_number, parse_number

REAL, NAT, COFINITE = "real", "nat", "cofinite"


# ---------------------------------------------------------------------------
# intervals
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    lo: Number
    hi: Number
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if math.isinf(self.lo) and self.lo > 0 or math.isinf(self.hi) and self.hi < 0:
            raise ValueError(f"bad interval ends {self.lo}, {self.hi}")
        if math.isinf(self.lo) and self.lo_closed:
            object.__setattr__(self, "lo_closed", False)
        if math.isinf(self.hi) and self.hi_closed:
            object.__setattr__(self, "hi_closed", False)
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty interval {self}")

    @classmethod
    def point(cls, x: Number) -> "Interval":
        return cls(x, x, True, True)

    @classmethod
    def open(cls, lo: Number, hi: Number) -> "Interval":
        return cls(lo, hi, False, False)

    @classmethod
    def closed(cls, lo: Number, hi: Number) -> "Interval":
        return cls(lo, hi, True, True)

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    @property
    def length(self) -> Number:
        return self.hi - self.lo

    def __contains__(self, x: Number) -> bool:
        if x < self.lo or x > self.hi:
            return False
        if x == self.lo and not self.lo_closed:
            return False
        if x == self.hi and not self.hi_closed:
            return False
        return True

    def contains_interval(self, other: "Interval") -> bool:
        return _lo_key(self) <= _lo_key(other) and _hi_key(other) <= _hi_key(self)

    def intersect(self, other: "Interval") -> "Interval | None":
        lo = max(_lo_key(self), _lo_key(other))
        hi = min(_hi_key(self), _hi_key(other))
        return _from_keys(lo, hi)

    def __str__(self) -> str:
        if self.is_point:
            return "{" + fmt_number(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{fmt_number(self.lo)},{fmt_number(self.hi)}{right}"


def _lo_key(iv: Interval):
    return (iv.lo, 0 if iv.lo_closed else 1)


def _hi_key(iv: Interval):
    return (iv.hi, 1 if iv.hi_closed else 0)


def _from_keys(lo_key, hi_key) -> Interval | None:
    lo, lo_open = lo_key
    hi, hi_closed = hi_key
    if lo > hi:
        return None
    lo_closed = lo_open == 0
    hi_closed = hi_closed == 1
    if lo == hi and not (lo_closed and hi_closed):
        return None
    if math.isinf(lo) and lo == hi:
        return None
    return Interval(lo, hi, lo_closed, hi_closed)


def _merge(parts: Iterable[Interval]) -> tuple[Interval, ...]:
    """Sort and merge into maximal pairwise-disjoint, non-touching intervals."""
    out: list[Interval] = []
    for iv in sorted(parts, key=_lo_key):
        if out:
            last = out[-1]
            if iv.lo < last.hi or (iv.lo == last.hi and (last.hi_closed or iv.lo_closed)):
                if _hi_key(iv) > _hi_key(last):
                    out[-1] = Interval(last.lo, iv.hi, last.lo_closed, iv.hi_closed)
                continue
        out.append(iv)
    return tuple(out)


def _complement_r(parts: tuple[Interval, ...]) -> tuple[Interval, ...]:
    out = []
    cur, cur_closed = -INF, False
    for iv in parts:
        gap = _from_keys((cur, 0 if cur_closed else 1), (iv.lo, 0 if iv.lo_closed else 1))
        if gap is not None:
            out.append(gap)
        cur, cur_closed = iv.hi, not iv.hi_closed
    if not (math.isinf(cur) and cur > 0):
        out.append(Interval(cur, INF, cur_closed, False))
    return tuple(out)


def _intersect_r(a: tuple[Interval, ...], b: tuple[Interval, ...]) -> tuple[Interval, ...]:
    out = []
    for x in a:
        for y in b:
            z = x.intersect(y)
            if z is not None:
                out.append(z)
    return _merge(out)


def _closure_r(parts: tuple[Interval, ...]) -> tuple[Interval, ...]:
    return _merge(Interval(iv.lo, iv.hi, True, True) for iv in parts)


def _interior_r(parts: tuple[Interval, ...]) -> tuple[Interval, ...]:
    return _merge(Interval(iv.lo, iv.hi, False, False) for iv in parts if not iv.is_point)


# ---------------------------------------------------------------------------
# spaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Space:
    kind: str
    domain: Interval | None = None

    def __post_init__(self):
        if self.kind not in (REAL, NAT, COFINITE):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.kind == REAL:
            if self.domain is None:
                object.__setattr__(self, "domain", Interval(-INF, INF, False, False))
            if self.domain.is_point:
                raise ValueError("real-line domain must be a nondegenerate interval")
        elif self.domain is not None:
            raise ValueError("only real-line spaces carry an interval domain")

    @classmethod
    def real_line(cls, lo: Number = -INF, hi: Number = INF, lo_closed: bool = True, hi_closed: bool = True) -> "Space":
        return cls(REAL, Interval(exact(lo), exact(hi), lo_closed, hi_closed))

    @classmethod
    def discrete_nat(cls) -> "Space":
        return cls(NAT)

    @classmethod
    def cofinite_nat(cls) -> "Space":
        return cls(COFINITE)

    @property
    def is_metric(self) -> bool:
        return self.kind != COFINITE

    @property
    def is_real(self) -> bool:
        return self.kind == REAL

    def require_metric(self, what: str = "operation"):
        if not self.is_metric:
            raise UnsupportedSpaceError(f"{what} needs a metric; the cofinite space is not metrizable")

    def require_real(self, what: str = "operation"):
        if not self.is_real:
            raise UnsupportedSpaceError(f"{what} is only supported on the real line, not on {self}")

    def whole(self) -> "BorelSet":
        if self.is_real:
            return RealSet(self, (self.domain,))
        return NatSet(self, 1, frozenset({0}), frozenset())

    def empty(self) -> "BorelSet":
        if self.is_real:
            return RealSet(self, ())
        return NatSet(self, 1, frozenset(), frozenset())

    def contains_point(self, x) -> bool:
        if self.is_real:
            return x in self.domain
        return isinstance(x, (int, Fraction)) and x == int(x) and x >= 1

    def to_json(self) -> dict:
        if self.is_real:
            return {"kind": REAL, "domain": str(self.domain)}
        return {"kind": self.kind}

    @classmethod
    def from_json(cls, data, where: str = "space") -> "Space":
        if isinstance(data, str):
            data = {"kind": data}
        kind = data.get("kind")
        if kind == REAL:
            dom = data.get("domain", "(-inf,inf)")
            parts = _Parser(dom, {}, None, where).parse_interval_only()
            return cls(REAL, parts)
        if kind in (NAT, COFINITE):
            return cls(kind)
        raise ParseError(f"unknown space kind {kind!r}", where)

    def __str__(self) -> str:
        if self.is_real:
            return f"real{self.domain}"
        return self.kind


# ---------------------------------------------------------------------------
# Borel sets
# ---------------------------------------------------------------------------

class BorelSet:
    """Common surface of :class:`RealSet` and :class:`NatSet`."""

    space: Space

    def __or__(self, other):
        return union(self, other)

    def __and__(self, other):
        return intersection(self, other)

    def __sub__(self, other):
        return difference(self, other)

    def __invert__(self):
        return complement(self)


@dataclass(frozen=True, eq=True)
class RealSet(BorelSet):
    """Canonical finite union of intervals and isolated points inside a real-line domain.

    ``intervals`` holds the nondegenerate components and ``points`` the isolated
    ones; both are sorted, disjoint, and maximal. Construct through
    :func:`canonicalize` or :meth:`from_parts`.
    """

    space: Space
    intervals: tuple[Interval, ...] = ()
    points: tuple[Number, ...] = ()

    @classmethod
    def from_parts(cls, space: Space, parts: Iterable[Interval], check: bool = True) -> "RealSet":
        parts = list(parts)
        if check:
            for iv in parts:
                if not space.domain.contains_interval(iv):
                    raise DomainError(f"component {iv} lies outside the domain {space.domain}")
        merged = _merge(parts)
        return cls(space, tuple(iv for iv in merged if not iv.is_point), tuple(iv.lo for iv in merged if iv.is_point))

    @property
    def parts(self) -> tuple[Interval, ...]:
        return _merge(list(self.intervals) + [Interval.point(p) for p in self.points])

    @property
    def is_empty(self) -> bool:
        return not self.intervals and not self.points

    def __contains__(self, x) -> bool:
        return any(x in iv for iv in self.intervals) or x in self.points

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        return " u ".join(str(iv) for iv in self.parts)

    def endpoints(self) -> list[Number]:
        pts = set()
        for iv in self.parts:
            for e in (iv.lo, iv.hi):
                if not math.isinf(e):
                    pts.add(e)
        return sorted(pts)


@dataclass(frozen=True, eq=True)
class NatSet(BorelSet):
    """``{n >= 1 : (n % modulus in residues) xor (n in flips)}`` with minimal modulus."""

    space: Space
    modulus: int = 1
    residues: frozenset = frozenset()
    flips: frozenset = frozenset()

    def __post_init__(self):
        m, res = _minimal_period(self.modulus, self.residues)
        flips = frozenset(self.flips)
        if flips and min(flips) < 1:
            flips = frozenset(n for n in flips if n >= 1)
        object.__setattr__(self, "modulus", m)
        object.__setattr__(self, "residues", res)
        object.__setattr__(self, "flips", flips)

    @classmethod
    def finite(cls, space: Space, elements: Iterable[int]) -> "NatSet":
        elements = frozenset(int(e) for e in elements)
        if any(e < 1 for e in elements):
            raise DomainError(f"naturals start at 1: {sorted(elements)}")
        return cls(space, 1, frozenset(), elements)

    @classmethod
    def cofinite(cls, space: Space, missing: Iterable[int]) -> "NatSet":
        missing = frozenset(int(e) for e in missing)
        if any(e < 1 for e in missing):
            raise DomainError(f"naturals start at 1: {sorted(missing)}")
        return cls(space, 1, frozenset({0}), missing)

    @classmethod
    def periodic(cls, space: Space, modulus: int, residues: Iterable[int]) -> "NatSet":
        return cls(space, int(modulus), frozenset(int(r) % int(modulus) for r in residues), frozenset())

    def _base(self, n: int) -> bool:
        return (n % self.modulus) in self.residues

    def __contains__(self, n) -> bool:
        if not isinstance(n, (int, Fraction)) or n != int(n) or n < 1:
            return False
        n = int(n)
        return self._base(n) != (n in self.flips)

    @property
    def is_finite(self) -> bool:
        return not self.residues

    @property
    def is_cofinite(self) -> bool:
        return len(self.residues) == self.modulus

    @property
    def is_empty(self) -> bool:
        return self.is_finite and not self.flips

    @cached_property
    def added(self) -> frozenset:
        if self.modulus == 1:
            return frozenset() if self.residues else self.flips
        return frozenset(n for n in self.flips if not self._base(n))

    @cached_property
    def removed(self) -> frozenset:
        if self.modulus == 1:
            return self.flips if self.residues else frozenset()
        return frozenset(n for n in self.flips if self._base(n))

    def elements(self) -> list[int]:
        if not self.is_finite:
            raise ValueError("set is infinite")
        return sorted(self.flips)

    def iter_upto(self, limit: int) -> Iterator[int]:
        for n in range(1, limit + 1):
            if n in self:
                yield n

    def horizon(self) -> int:
        """Beyond this index membership is purely periodic."""
        return max(self.flips, default=0)

    def __str__(self) -> str:
        if self.is_finite:
            return "{" + ",".join(str(n) for n in sorted(self.flips)) + "}" if self.flips else "empty"
        if self.is_cofinite:
            if not self.flips:
                return "all"
            return "co{" + ",".join(str(n) for n in sorted(self.flips)) + "}"
        text = f"per({self.modulus}:{{{','.join(str(r) for r in sorted(self.residues))}}})"
        if self.added:
            text += " u {" + ",".join(str(n) for n in sorted(self.added)) + "}"
        if self.removed:
            text += " \\ {" + ",".join(str(n) for n in sorted(self.removed)) + "}"
        return text


def _minimal_period(m: int, residues: frozenset) -> tuple[int, frozenset]:
    if m < 1:
        raise ValueError("modulus must be positive")
    residues = frozenset(r % m for r in residues)
    for d in range(1, m + 1):
        if m % d:
            continue
        if all(((r % d) in {s % d for s in residues}) == (r in residues) for r in range(m)):
            return d, frozenset(r % d for r in residues)
    return m, residues


def _lift(a: NatSet, m: int) -> frozenset:
    return frozenset(r for r in range(m) if (r % a.modulus) in a.residues)


def _nat_binary(a: NatSet, b: NatSet, op) -> NatSet:
    if a.modulus == b.modulus == 1:
        # constant bases: each of the three flip regions is decided as a block
        ba, bb = bool(a.residues), bool(b.residues)
        base = op(ba, bb)
        flips = set()
        for region, ina, inb in ((a.flips - b.flips, not ba, bb), (b.flips - a.flips, ba, not bb),
                                 (a.flips & b.flips, not ba, not bb)):
            if op(ina, inb) != base:
                flips |= region
        return NatSet(a.space, 1, frozenset({0}) if base else frozenset(), frozenset(flips))
    m = a.modulus * b.modulus // math.gcd(a.modulus, b.modulus)
    ra, rb = _lift(a, m), _lift(b, m)
    residues = frozenset(r for r in range(m) if op(r in ra, r in rb))
    ma, resa, fa = a.modulus, a.residues, a.flips
    mb, resb, fb = b.modulus, b.residues, b.flips
    flips = frozenset(
        n
        for n in fa | fb
        if op(((n % ma) in resa) != (n in fa), ((n % mb) in resb) != (n in fb)) != ((n % m) in residues)
    )
    return NatSet(a.space, m, residues, flips)


def _same_space(a: BorelSet, b: BorelSet):
    from .errors import SpaceMismatchError

    if a.space != b.space:
        raise SpaceMismatchError(a.space, b.space)


def canonicalize(space: Space, parts: Iterable = (), points: Iterable = ()) -> BorelSet:
    """Build the canonical set from raw components.

    On the real line ``parts`` are :class:`Interval` objects and ``points`` are
    numbers. On the naturals, intervals contribute the integers they contain.
    """
    parts = list(parts)
    points = list(points)
    if space.is_real:
        for p in points:
            if not space.contains_point(p):
                raise DomainError(f"point {fmt_number(p)} lies outside the domain {space.domain}")
        return RealSet.from_parts(space, parts + [Interval.point(p) for p in points])
    out = space.empty()
    for iv in parts:
        out = union(out, _nat_interval(space, iv))
    finite = []
    for p in points:
        if not space.contains_point(p):
            raise DomainError(f"{fmt_number(p)} is not a natural number")
        finite.append(int(p))
    return union(out, NatSet.finite(space, finite))


def _nat_interval(space: Space, iv: Interval) -> NatSet:
    lo = max(1, math.ceil(iv.lo) if iv.lo_closed else math.floor(iv.lo) + 1) if not math.isinf(iv.lo) else 1
    if math.isinf(iv.hi):
        return NatSet.cofinite(space, range(1, lo))
    hi = math.floor(iv.hi) if iv.hi_closed else math.ceil(iv.hi) - 1
    return NatSet.finite(space, range(lo, hi + 1))


def union(a: BorelSet, b: BorelSet) -> BorelSet:
    _same_space(a, b)
    if isinstance(a, RealSet):
        return RealSet.from_parts(a.space, a.parts + b.parts, check=False)
    return _nat_binary(a, b, lambda x, y: x or y)


def intersection(a: BorelSet, b: BorelSet) -> BorelSet:
    _same_space(a, b)
    if isinstance(a, RealSet):
        return RealSet.from_parts(a.space, _intersect_r(a.parts, b.parts), check=False)
    if a.is_finite or b.is_finite:
        small, other = (a, b) if a.is_finite and (not b.is_finite or len(a.flips) <= len(b.flips)) else (b, a)
        return NatSet(a.space, 1, frozenset(), frozenset(n for n in small.flips if n in other))
    return _nat_binary(a, b, lambda x, y: x and y)


def complement(a: BorelSet) -> BorelSet:
    if isinstance(a, RealSet):
        return RealSet.from_parts(a.space, _intersect_r(_complement_r(a.parts), (a.space.domain,)), check=False)
    return NatSet(a.space, a.modulus, frozenset(range(a.modulus)) - a.residues, a.flips)


def difference(a: BorelSet, b: BorelSet) -> BorelSet:
    return intersection(a, complement(b))


def union_all(space: Space, sets: Iterable[BorelSet]) -> BorelSet:
    return reduce(union, sets, space.empty())


def is_empty(a: BorelSet) -> bool:
    return a.is_empty


# ---------------------------------------------------------------------------
# topology
# ---------------------------------------------------------------------------

def closure(a: BorelSet) -> BorelSet:
    if isinstance(a, RealSet):
        return RealSet.from_parts(a.space, _intersect_r(_closure_r(a.parts), (a.space.domain,)), check=False)
    if a.space.kind == NAT or a.is_finite:
        return a
    return a.space.whole()


def interior(a: BorelSet) -> BorelSet:
    if isinstance(a, RealSet):
        outside = _complement_r((a.space.domain,))
        grown = _merge(a.parts + outside)
        return RealSet.from_parts(a.space, _intersect_r(_interior_r(grown), (a.space.domain,)), check=False)
    if a.space.kind == NAT or a.is_cofinite:
        return a
    return a.space.empty()


def boundary(a: BorelSet) -> BorelSet:
    return difference(closure(a), interior(a))


def is_open(a: BorelSet) -> bool:
    return interior(a) == a


def is_closed(a: BorelSet) -> bool:
    return closure(a) == a


def is_bounded(a: BorelSet) -> bool:
    """Contained in some ball. Every set is bounded under the discrete metric."""
    a.space.require_metric("boundedness")
    if isinstance(a, RealSet):
        return all(not math.isinf(iv.lo) and not math.isinf(iv.hi) for iv in a.parts)
    return True


def is_compact(a: BorelSet) -> bool:
    if isinstance(a, RealSet):
        return is_bounded(a) and _closure_r(a.parts) == a.parts
    if a.space.kind == COFINITE:
        return True  # every subset of a cofinite space is compact
    return a.is_finite


def point_set_distance(x: Number, a: BorelSet) -> Number:
    """``inf_{y in A} |x - y|``; zero exactly on the closure of ``A``."""
    a.space.require_metric("point-set distance")
    if isinstance(a, NatSet):
        if a.is_empty:
            return INF
        return Fraction(0) if x in a else Fraction(1)
    best = INF
    for iv in a.parts:
        if iv.lo <= x <= iv.hi:
            return Fraction(0) if not isinstance(x, float) else 0.0
        d = iv.lo - x if x < iv.lo else x - iv.hi
        best = min(best, d)
    return best


# ---------------------------------------------------------------------------
# literal syntax
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, env: Mapping[str, object], space: Space | None, where: str | None):
        self.text = text
        self.i = 0
        self.env = dict(env)
        self.space = space
        self.where = where

    def error(self, msg: str) -> ParseError:
        return ParseError(f"{msg} at column {self.i + 1} of {self.text!r}", self.where)

    def ws(self):
        while self.i < len(self.text) and self.text[self.i].isspace():
            self.i += 1

    def peek(self, s: str) -> bool:
        self.ws()
        return self.text.startswith(s, self.i)

    def take(self, s: str):
        if not self.peek(s):
            raise self.error(f"expected {s!r}")
        self.i += len(s)

    def number_until(self, stops: str) -> Number:
        self.ws()
        depth = 0
        start = self.i
        while self.i < len(self.text):
            ch = self.text[self.i]
            if ch == "(":
                depth += 1
            elif ch == ")" and depth:
                depth -= 1
            elif ch in stops and depth == 0:
                break
            self.i += 1
        chunk = self.text[start:self.i].strip()
        if not chunk:
            raise self.error("expected a number")
        return parse_number(chunk, self.env, self.where)

    def parse_interval_only(self) -> Interval:
        iv = self.interval()
        self.ws()
        if self.i != len(self.text):
            raise self.error("trailing input")
        return iv

    def interval(self) -> Interval:
        self.ws()
        opener = self.text[self.i] if self.i < len(self.text) else ""
        if opener not in ("(", "["):
            raise self.error("expected '(' or '['")
        self.i += 1
        lo = self.number_until(",")
        self.take(",")
        hi = self.number_until(")]")
        closer = self.text[self.i] if self.i < len(self.text) else ""
        if closer not in (")", "]"):
            raise self.error("expected ')' or ']'")
        self.i += 1
        try:
            return Interval(lo, hi, opener == "[", closer == "]")
        except ValueError as exc:
            raise self.error(str(exc)) from exc

    def number_list(self) -> list[Number]:
        self.take("{")
        out = []
        if self.peek("}"):
            self.take("}")
            return out
        while True:
            out.append(self.number_until(",}"))
            if self.peek(","):
                self.take(",")
                continue
            self.take("}")
            return out

    def term(self) -> BorelSet:
        sp = self.space
        if self.peek("empty"):
            self.take("empty")
            return sp.empty()
        if self.peek("all"):
            self.take("all")
            return sp.whole()
        if self.peek("co{"):
            self.take("co")
            items = self.number_list()
            if sp.is_real:
                raise self.error("co{...} is only defined on the naturals")
            return complement(canonicalize(sp, points=items))
        if self.peek("per("):
            self.take("per(")
            m = int(self.number_until(":"))
            self.take(":")
            residues = self.number_list()
            self.take(")")
            if sp.is_real:
                raise self.error("per(...) is only defined on the naturals")
            return NatSet.periodic(sp, m, [int(r) for r in residues])
        if self.peek("{"):
            return canonicalize(sp, points=self.number_list())
        if self.peek("(") and self._group_ahead():
            self.take("(")
            inner = self.expr()
            self.take(")")
            return inner
        return canonicalize(sp, parts=[self.interval()])

    def _group_ahead(self) -> bool:
        # a parenthesised sub-expression starts with a set keyword or bracket, an interval with a number
        j = self.i + 1
        while j < len(self.text) and self.text[j].isspace():
            j += 1
        rest = self.text[j:]
        return rest.startswith(("(", "[", "{", "co{", "per(", "empty", "all"))

    def expr(self) -> BorelSet:
        acc = self.term()
        while True:
            if self.peek("u ") or self.peek("u(") or self.peek("u[") or self.peek("u{") or self.peek("∪") or self.peek("|"):
                self.i += 1
                acc = union(acc, self.term())
            elif self.peek("&") or self.peek("∩"):
                self.i += 1
                acc = intersection(acc, self.term())
            elif self.peek("\\"):
                self.i += 1
                acc = difference(acc, self.term())
            else:
                return acc

    def parse(self) -> BorelSet:
        out = self.expr()
        self.ws()
        if self.i != len(self.text):
            raise self.error("trailing input")
        return out


def parse_set(text: str, space: Space, env: Mapping[str, object] | None = None, where: str | None = None) -> BorelSet:
    """Parse a set literal such as ``(0,1/3] u {2/3}`` or ``co{1,2,3}``."""
    return _Parser(text, env or {}, space, where).parse()


def parse_interval(text: str, env: Mapping[str, object] | None = None, where: str | None = None) -> Interval:
    return _Parser(text, env or {}, None, where).parse_interval_only()


def format_set(a: BorelSet) -> str:
    return str(a)

"""Sequence diagnostics: limit probing, F-/S-convergence checks, and the condition batteries.

Every verdict is computed on a finite grid of indices ``n``. ``pass`` means no
violation was detected and the extrapolated limit is stable at the stated
tolerance; it is evidence, not proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .distance import sup_sets
from .errors import DivergenceError, ParseError, SpaceMismatchError, UndefinedIntegralError, UnsupportedSpaceError
from .forms import INF, Number, fmt_number
from .integrate import integrate, integrate_truncated
from .measure import Measure, SignedMeasure, measure_from_json
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
    intersection,
    interior,
    is_bounded,
    is_closed,
    is_compact,
    is_open,
    union,
)
from .testfn import (
    TestFunction,
    bump_over_closed,
    bump_under_open,
    constant,
    indicator,
    random_family,
    sampling_window,
)

DEFAULT_GRID = tuple(2**k for k in range(1, 15))
DEFAULT_TOL = 1e-6
WINDOW = 4
MIN_POINTS = 6
CONTRACTION = 0.75
DIVERGENCE_THRESHOLD = 1e6
BLOWUP_THRESHOLDS = (10, 100, 1000)

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
MODES = ("vague", "weak", "setwise", "tv")

VAGUE_CONDITIONS = (
    "cc_functions",
    "compact_open_sets",
    "closed_open_sets",
    "sandwich",
    "continuity_sets",
    "bounded_support_continuous",
    "holder_cc",
    "uniform_cc",
    "null_discontinuity_bounded",
    "nonnegative_cc",
)
SETWISE_CONDITIONS = ("all_sets", "open_sets", "closed_sets")


# ---------------------------------------------------------------------------
# sequences
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MeasureSequence:
    """``n -> nu_n`` with a candidate limit and an evaluation grid."""

    rule: Callable[[int], SignedMeasure]
    limit: SignedMeasure
    grid: tuple = DEFAULT_GRID
    label: str = ""
    template: Mapping | None = field(default=None, compare=False)
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        grid = tuple(int(n) for n in self.grid)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError(f"grid must be strictly increasing: {grid}")
        if not grid or grid[0] < 1:
            raise ValueError("grid indices must be positive")
        object.__setattr__(self, "grid", grid)

    @property
    def space(self) -> Space:
        return self.limit.space

    def at(self, n: int) -> SignedMeasure:
        if n not in self._cache:
            m = self.rule(n)
            if m.space != self.space:
                raise SpaceMismatchError(m.space, self.space)
            self._cache[n] = m
        return self._cache[n]

    def with_grid(self, grid: Sequence[int]) -> "MeasureSequence":
        return MeasureSequence(self.rule, self.limit, tuple(grid), self.label, self.template)

    def to_json(self) -> dict:
        out = {"label": self.label, "grid": list(self.grid), "limit": self.limit.to_json()}
        if self.template is not None:
            out["rule"] = {"template": self.template}
        return out


def sequence_from_template(template: Mapping, limit: Mapping, grid: Sequence[int] = DEFAULT_GRID, label: str = "") -> MeasureSequence:
    """A sequence whose ``n``-th term is the measure JSON ``template`` with ``n`` bound."""
    lim = measure_from_json(limit, where="limit")
    measure_from_json(template, {"n": grid[0]}, where="rule.template")  # fail early on bad templates

    def rule(n: int) -> Measure:
        return measure_from_json(template, {"n": n}, where=f"rule.template[n={n}]")

    return MeasureSequence(rule, lim, tuple(grid), label, template)


def sequence_from_json(data: Mapping, grid: Sequence[int] | None = None) -> MeasureSequence:
    """Decode ``{rule: {template: ...} | {gallery: id}, limit: ..., grid: [...]}``."""
    if not isinstance(data, Mapping):
        raise ParseError("sequence spec must be a JSON object", "sequence")
    rule = data.get("rule")
    if rule is None:
        raise ParseError("missing field 'rule'", "sequence")
    grid = tuple(grid or data.get("grid") or DEFAULT_GRID)
    if isinstance(rule, Mapping) and "gallery" in rule:
        from .gallery import case

        seq = case(rule["gallery"]).sequence
        if seq is None:
            raise ParseError(f"gallery case {rule['gallery']!r} has no sequence", "sequence.rule")
        return seq.with_grid(grid)
    template = rule.get("template") if isinstance(rule, Mapping) else None
    if template is None:
        raise ParseError("rule must be {'template': ...} or {'gallery': id}", "sequence.rule")
    if "limit" not in data:
        raise ParseError("missing field 'limit'", "sequence")
    if "space" in data:
        declared = Space.from_json(data["space"], "sequence.space")
        for where, m in (("rule.template", template), ("limit", data["limit"])):
            if Space.from_json(m.get("space", {}), where) != declared:
                raise SpaceMismatchError(declared, Space.from_json(m.get("space", {}), where))
    seq = sequence_from_template(template, data["limit"], grid, data.get("label", ""))
    # compare spaces up front so a mismatch is an input error, not a mid-run failure
    first = seq.at(grid[0])
    if first.space != seq.space:
        raise SpaceMismatchError(first.space, seq.space)
    return seq


# ---------------------------------------------------------------------------
# limits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LimitVerdict:
    kind: str  # converges | diverges | oscillates | inconclusive
    value: float | None = None
    limits: tuple = ()
    direction: int = 0
    tol: float = DEFAULT_TOL
    limsup: float | None = None
    liminf: float | None = None

    def to_json(self) -> dict:
        out = {"kind": self.kind, "tol": self.tol}
        if self.value is not None:
            out["value"] = self.value
        if self.limits:
            out["limits"] = list(self.limits)
        if self.direction:
            out["direction"] = self.direction
        if self.limsup is not None:
            out["limsup"] = _json_float(self.limsup)
            out["liminf"] = _json_float(self.liminf)
        return out


def _json_float(v):
    if v is None:
        return None
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return v


def _aitken(a: float, b: float, c: float) -> float:
    denom = (c - b) - (b - a)
    if denom == 0:
        return c
    return c - (c - b) ** 2 / denom


def _settles(values: Sequence[float], tol: float) -> float | None:
    """Limit of ``values`` if the tail is flat or contracts geometrically, else ``None``."""
    if len(values) < WINDOW or not all(math.isfinite(v) for v in values[-WINDOW:]):
        return None
    tail = values[-WINDOW:]
    last = tail[-1]
    scale = max(1.0, abs(last))
    if max(tail) - min(tail) <= tol * scale and abs(_aitken(*tail[-3:]) - last) <= tol * scale:
        return last
    if len(values) >= WINDOW + 1:
        seg = values[-(WINDOW + 1):]
        diffs = [b - a for a, b in zip(seg, seg[1:])]
        if all(d != 0 for d in diffs):
            ratios = [abs(d2 / d1) for d1, d2 in zip(diffs, diffs[1:])]
            if all(r <= CONTRACTION for r in ratios):
                a1 = _aitken(*seg[-3:])
                a0 = _aitken(*seg[-4:-1])
                r = max(ratios)
                # remaining movement is bounded by a geometric tail of the last step
                if abs(a1 - a0) <= tol * scale and abs(diffs[-1]) * r / (1 - r) <= max(tol * scale, abs(a1 - last) * 1.01 + tol):
                    return a1
    return None


def probe_limit(trace: Sequence[tuple[int, float]], tol: float = DEFAULT_TOL) -> LimitVerdict:
    """Classify a numeric trace ``[(n, value), ...]`` as converging, oscillating, diverging, or inconclusive."""
    values = [float(v) for _, v in trace]
    if len(values) < MIN_POINTS:
        return LimitVerdict("inconclusive", tol=tol)
    tail = values[-WINDOW:]
    finite_tail = [v for v in tail if math.isfinite(v)]
    window_sup = max(tail)
    window_inf = min(tail)
    if len(finite_tail) < len(tail):
        infs = [v for v in tail if math.isinf(v)]
        if all(v > 0 for v in infs) and len(infs) == len(tail):
            return LimitVerdict("diverges", direction=1, tol=tol, limsup=INF, liminf=INF)
        if all(v < 0 for v in infs) and len(infs) == len(tail):
            return LimitVerdict("diverges", direction=-1, tol=tol, limsup=-INF, liminf=-INF)
        return LimitVerdict("inconclusive", tol=tol, limsup=window_sup, liminf=window_inf)
    limit = _settles(values, tol)
    if limit is not None:
        return LimitVerdict("converges", value=limit, tol=tol, limsup=limit, liminf=limit)
    even, odd = values[0::2], values[1::2]
    le, lo = _settles(even, tol), _settles(odd, tol)
    if le is not None and lo is not None and abs(le - lo) > 4 * tol * max(1.0, abs(le), abs(lo)):
        limits = tuple(sorted((le, lo)))
        return LimitVerdict("oscillates", limits=limits, tol=tol, limsup=limits[-1], liminf=limits[0])
    steps = [b - a for a, b in zip(tail, tail[1:])]
    if abs(tail[-1]) > DIVERGENCE_THRESHOLD and (all(s > 0 for s in steps) or all(s < 0 for s in steps)):
        d = 1 if steps[0] > 0 else -1
        return LimitVerdict("diverges", direction=d, tol=tol, limsup=d * INF, liminf=d * INF)
    return LimitVerdict("inconclusive", tol=tol, limsup=window_sup, liminf=window_inf)


# ---------------------------------------------------------------------------
# probes and verdicts
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Probe:
    probe_id: str
    requirement: str  # limit | limsup_le | liminf_ge | sandwich
    target: float | tuple
    trace: tuple
    verdict: LimitVerdict
    status: str
    note: str = ""

    def to_json(self) -> dict:
        target = [_json_float(t) for t in self.target] if isinstance(self.target, tuple) else _json_float(self.target)
        return {
            "probe": self.probe_id,
            "requirement": self.requirement,
            "target": target,
            "verdict": self.verdict.to_json(),
            "status": self.status,
            "note": self.note,
        }


@dataclass(frozen=True)
class CheckVerdict:
    status: str
    witness: str | None = None
    probes: tuple = ()
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS

    def failing(self) -> list[Probe]:
        return [p for p in self.probes if p.status == FAIL]

    def to_json(self, probes: bool = False) -> dict:
        out = {"status": self.status, "witness": self.witness, "probe_count": len(self.probes)}
        if self.note:
            out["note"] = self.note
        bad = [p for p in self.probes if p.status != PASS]
        if bad:
            out["first_problem"] = bad[0].to_json()
        if probes:
            out["probes"] = [p.to_json() for p in self.probes]
        return out


def _combine(probes: Sequence[Probe], note: str = "") -> CheckVerdict:
    probes = tuple(probes)
    for p in probes:
        if p.status == FAIL:
            return CheckVerdict(FAIL, p.probe_id, probes, note or p.note)
    for p in probes:
        if p.status == INCONCLUSIVE:
            return CheckVerdict(INCONCLUSIVE, None, probes, note or f"{p.probe_id}: {p.verdict.kind}")
    return CheckVerdict(PASS, None, probes, note)


def _scaled_tol(tol: float, target: float) -> float:
    return tol * max(1.0, abs(target)) if math.isfinite(target) else tol


def _judge(probe_id: str, requirement: str, target, trace, tol: float, note: str = "") -> Probe:
    verdict = probe_limit(trace, tol)
    status = INCONCLUSIVE
    if requirement == "limit":
        if verdict.kind == "converges":
            status = PASS if abs(verdict.value - target) <= _scaled_tol(10 * tol, target) else FAIL
        elif verdict.kind in ("oscillates", "diverges"):
            status = FAIL
        elif verdict.limsup is not None and math.isfinite(target):
            # a window that stays away from the target on one side is a violation,
            # unless the tail is still moving monotonically toward it
            slack = _scaled_tol(10 * tol, target)
            if verdict.liminf > target + slack or verdict.limsup < target - slack:
                tail = [float(v) for _, v in trace][-WINDOW:]
                approaching = all((b - a) * (target - a) > 0 for a, b in zip(tail, tail[1:]))
                if not approaching:
                    status = FAIL
    elif requirement == "limsup_le":
        if verdict.limsup is not None:
            status = PASS if verdict.limsup <= target + _scaled_tol(10 * tol, target) else FAIL
    elif requirement == "liminf_ge":
        if verdict.liminf is not None:
            status = PASS if verdict.liminf >= target - _scaled_tol(10 * tol, target) else FAIL
    elif requirement == "sandwich":
        low, high = target
        if verdict.limsup is not None:
            ok = verdict.liminf >= low - _scaled_tol(10 * tol, low) and verdict.limsup <= high + _scaled_tol(10 * tol, high)
            status = PASS if ok else FAIL
    return Probe(probe_id, requirement, target, tuple(trace), verdict, status, note)


def _mass_value(m: SignedMeasure, a: BorelSet) -> float:
    try:
        return float(m.mass(a))
    except DivergenceError as exc:
        return INF * (exc.direction or 1)


def _integral_value(f: TestFunction, m: SignedMeasure) -> float:
    try:
        return float(integrate(f, m).value)
    except DivergenceError as exc:
        return INF * (exc.direction or 1)
    except UndefinedIntegralError:
        return math.nan


def set_trace(seq: MeasureSequence, a: BorelSet) -> list[tuple[int, float]]:
    return [(n, _mass_value(seq.at(n), a)) for n in seq.grid]


def function_trace(seq: MeasureSequence, f: TestFunction) -> list[tuple[int, float]]:
    return [(n, _integral_value(f, seq.at(n))) for n in seq.grid]


def check_F(seq: MeasureSequence, family: Sequence[TestFunction], tol: float = DEFAULT_TOL, prefix: str = "f") -> CheckVerdict:
    """``int f d nu_n -> int f d nu`` for every ``f`` in ``family``."""
    if not family:
        raise ValueError("family must be nonempty")
    probes = []
    for i, f in enumerate(family):
        if f.space != seq.space:
            raise SpaceMismatchError(f.space, seq.space)
        pid = f"{prefix}[{i}] {f}"
        target = _integral_value(f, seq.limit)
        trace = function_trace(seq, f)
        if not math.isfinite(target):
            probes.append(Probe(pid, "limit", target, tuple(trace), probe_limit(trace, tol), FAIL, "limit integral is not finite"))
            continue
        divergent_at = [n for n, v in trace if not math.isfinite(v)]
        if divergent_at:
            note = "divergent at every grid n" if len(divergent_at) == len(trace) else f"divergent at n in {divergent_at}"
            probes.append(Probe(pid, "limit", target, tuple(trace), probe_limit(trace, tol), FAIL, note))
            continue
        probes.append(_judge(pid, "limit", target, trace, tol))
    return _combine(probes)


def check_S(seq: MeasureSequence, sets: Sequence[BorelSet], tol: float = DEFAULT_TOL, prefix: str = "A") -> CheckVerdict:
    """``nu_n(A) -> nu(A)`` for every ``A`` in ``sets``."""
    probes = []
    for i, a in enumerate(sets):
        if a.space != seq.space:
            raise SpaceMismatchError(a.space, seq.space)
        pid = f"{prefix}[{i}] {a}"
        probes.append(_judge(pid, "limit", _mass_value(seq.limit, a), set_trace(seq, a), tol))
    return _combine(probes)


def continuity_set(nu: SignedMeasure, a: BorelSet) -> bool:
    """``nu(boundary(A)) == 0``."""
    return nu.mass(boundary(a)) == 0


# ---------------------------------------------------------------------------
# probe libraries
# ---------------------------------------------------------------------------

def structural_points(seq: MeasureSequence) -> list[Number]:
    """Atoms and breakpoints of the limit and of the first two grid terms."""
    pts = set(seq.limit.breakpoints())
    for n in seq.grid[:2]:
        pts.update(seq.at(n).breakpoints())
    dom = seq.space.domain
    return sorted(p for p in pts if p in dom)


def _random_real_sets(space: Space, rng: np.random.Generator, count: int) -> list[RealSet]:
    lo, hi = sampling_window(space)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, 4))
        cuts = sorted({lo + (hi - lo) * Fraction(int(rng.integers(1, 1000)), 1000) for _ in range(2 * k)})
        parts = []
        for a, b in zip(cuts[0::2], cuts[1::2]):
            flags = rng.integers(0, 2, 2)
            parts.append(Interval(a, b, bool(flags[0]), bool(flags[1])))
        out.append(canonicalize(space, parts))
    return out


def real_probe_sets(seq: MeasureSequence, seed: int = 0, count: int = 8) -> list[RealSet]:
    """Structural sets (supports, pieces, Hahn sets, neighbourhoods of atoms) plus seeded random unions."""
    sp = seq.space
    dom = sp.domain
    found: dict = {}

    def add(a):
        if a is not None and not a.is_empty:
            found.setdefault(str(a), a)

    add(sp.whole())
    for m in [seq.limit] + [seq.at(n) for n in seq.grid[:2]]:
        for piece in m.pieces:
            add(canonicalize(sp, [piece.interval]))
    from .distance import hahn
    from .measure import difference

    for n in seq.grid[:2]:
        try:
            h = hahn(difference(seq.at(n), seq.limit))
            add(h.positive_set)
            add(h.negative_set)
        except (ValueError, DivergenceError):
            pass
    for p in structural_points(seq):
        add(canonicalize(sp, [], [p]))
        for r in (Fraction(1, 4), Fraction(1, 64)):
            for lc, hc in ((True, True), (False, False), (False, True), (True, False)):
                iv = Interval(p - r, p + r, lc, hc).intersect(dom)
                if iv is not None:
                    add(canonicalize(sp, [iv]))
    rng = np.random.default_rng([int(seed), 17])
    for a in _random_real_sets(sp, rng, count):
        add(a)
    return list(found.values())


def nat_probe_sets(seq: MeasureSequence, limit: int = 64, size: int = 8, seed: int = 0, samples: int = 48) -> list[NatSet]:
    """Finite sets of at most ``size`` points in ``{1..limit}``, their complements, and periodic sets.

    When every term is a finite sum of atoms, two finite sets give identical
    traces whenever they agree on the atoms that fall in ``{1..limit}``, so the
    subsets of those relevant points cover every finite set up to equivalence.
    With weight rules present every point is relevant and a seeded sample is
    drawn instead.
    """
    sp = seq.space
    pure_atoms = not seq.limit.discrete and all(not seq.at(n).discrete for n in seq.grid)
    finite = []
    if pure_atoms:
        relevant = set()
        for m in [seq.limit] + [seq.at(n) for n in seq.grid]:
            relevant.update(int(x) for x, _ in m.atoms if 1 <= x <= limit)
        relevant = sorted(relevant)
        top = min(size, len(relevant))
        subsets = itertools.chain.from_iterable(itertools.combinations(relevant, k) for k in range(top + 1))
        finite = [NatSet.finite(sp, sub) for sub in subsets]
    else:
        rng = np.random.default_rng([int(seed), 29])
        finite = [NatSet.finite(sp, []), *(NatSet.finite(sp, [k]) for k in range(1, size + 1))]
        for _ in range(samples):
            k = int(rng.integers(1, size + 1))
            finite.append(NatSet.finite(sp, rng.choice(np.arange(1, limit + 1), k, replace=False).tolist()))
    out = finite + [complement(a) for a in finite]
    out += [NatSet.periodic(sp, 2, [0]), NatSet.periodic(sp, 2, [1]), NatSet.periodic(sp, 3, [0])]
    from .distance import hahn
    from .measure import difference

    for n in seq.grid[:2]:
        try:
            h = hahn(difference(seq.at(n), seq.limit))
            out += [h.positive_set, h.negative_set]
        except (ValueError, DivergenceError):
            pass
    seen = {}
    for a in out:
        seen.setdefault(str(a), a)
    return list(seen.values())


def _compact_version(a: RealSet) -> RealSet | None:
    sp = a.space
    c = closure(a)
    if is_compact(c):
        return c
    dom = sp.domain
    lo = dom.lo + Fraction(1, 64) if not dom.lo_closed and not math.isinf(dom.lo) else dom.lo
    hi = dom.hi - Fraction(1, 64) if not dom.hi_closed and not math.isinf(dom.hi) else dom.hi
    if math.isinf(lo) or math.isinf(hi) or not lo < hi:
        return None
    c = intersection(c, canonicalize(sp, [Interval(lo, hi, True, True)]))
    return c if is_compact(c) and not c.is_empty else None


def _structural_functions(seq: MeasureSequence, sets: Sequence[RealSet]) -> list[TestFunction]:
    """Bumps over and under neighbourhoods of the structural points."""
    sp = seq.space
    out = []
    for p in structural_points(seq):
        for r in (Fraction(1, 4), Fraction(1, 64)):
            iv = Interval(p - r, p + r, True, True).intersect(sp.domain)
            if iv is None:
                continue
            a = closure(canonicalize(sp, [iv]))
            out.append(bump_over_closed(a, 64))
            try:
                out.append(bump_under_open(interior(a), 256))
            except ValueError:
                pass
    return out


# ---------------------------------------------------------------------------
# batteries
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Battery:
    conditions: dict

    def __getitem__(self, key: str) -> CheckVerdict:
        return self.conditions[key]

    def statuses(self) -> dict:
        return {k: v.status for k, v in self.conditions.items()}

    @property
    def coherent(self) -> bool:
        return len({v.status for v in self.conditions.values()}) == 1

    def to_json(self, probes: bool = False) -> dict:
        return {k: v.to_json(probes) for k, v in self.conditions.items()}


def _family(seq, family, seed, count, **kw):
    return random_family(seq.space, family, 1, seed, count, **kw)


def check_vague_battery(seq: MeasureSequence, seed: int = 0, tol: float = DEFAULT_TOL, count: int = 6) -> Battery:
    """Probe each of the ten equivalent descriptions of vague convergence independently."""
    sp = seq.space
    if not sp.is_real:
        raise UnsupportedSpaceError("the vague-convergence battery runs on real-line spaces only")
    nu = seq.limit
    base = real_probe_sets(seq, seed)
    bounded = [a for a in base if is_bounded(a)]
    compact = [c for c in (_compact_version(a) for a in bounded) if c is not None]
    open_bounded = [o for o in (interior(a) for a in bounded) if not o.is_empty]
    closed_bounded = [closure(a) for a in bounded]
    continuity = [a for a in bounded if continuity_set(nu, a)]
    bumps = _structural_functions(seq, base)

    def dedupe(sets):
        seen = {}
        for a in sets:
            seen.setdefault(str(a), a)
        return list(seen.values())

    compact, open_bounded, closed_bounded = dedupe(compact), dedupe(open_bounded), dedupe(closed_bounded)

    def one_sided(prefix, sets, requirement):
        probes = []
        for i, a in enumerate(sets):
            target = _mass_value(nu, a)
            probes.append(_judge(f"{prefix}[{i}] {a}", requirement, target, set_trace(seq, a), tol))
        return probes

    def fn_check(name, fams, keep):
        fs = [f for f in bumps if keep(f)]
        for fam, kw in fams:
            fs += [f for f in _family(seq, fam, seed, count, **kw) if keep(f)]
        return check_F(seq, fs, tol, prefix=name)

    out = {}
    cc = lambda f: f.has("continuous", "compact_support")  # noqa: E731
    out["cc_functions"] = fn_check("cc", [("Cc", {})], cc)
    out["compact_open_sets"] = _combine(
        one_sided("compact", compact, "limsup_le") + one_sided("open", open_bounded, "liminf_ge")
    )
    out["closed_open_sets"] = _combine(
        one_sided("closed", closed_bounded, "limsup_le") + one_sided("open", open_bounded, "liminf_ge")
    )
    sandwich = []
    for i, a in enumerate(bounded):
        low, high = _mass_value(nu, interior(a)), _mass_value(nu, closure(a))
        sandwich.append(_judge(f"bounded[{i}] {a}", "sandwich", (low, high), set_trace(seq, a), tol))
    out["sandwich"] = _combine(sandwich)
    out["continuity_sets"] = check_S(seq, continuity, tol, prefix="continuity") if continuity else CheckVerdict(INCONCLUSIVE, note="no bounded continuity sets")
    out["bounded_support_continuous"] = fn_check(
        "cbs", [("Cbs", {}), ("Cc", {})], lambda f: f.has("continuous", "bounded_support")
    )
    out["holder_cc"] = fn_check("holder", [("holder", {})], lambda f: f.has("continuous", "compact_support", "holder"))
    out["uniform_cc"] = fn_check(
        "uc", [("uniformly_continuous", {})], lambda f: f.has("continuous", "compact_support", "uniformly_continuous")
    )
    measurable = [indicator(a) for a in continuity]
    measurable += [f for f in _family(seq, "M", seed, count) if "bounded_support" in f.tags]
    measurable = [f for f in measurable if _null_discontinuities(nu, f)]
    out["null_discontinuity_bounded"] = check_F(seq, measurable, tol, prefix="ae") if measurable else CheckVerdict(INCONCLUSIVE, note="no admissible functions")
    out["nonnegative_cc"] = fn_check(
        "nonneg", [("Cc", {"nonnegative": True})], lambda f: f.has("continuous", "compact_support", "nonnegative")
    )
    return Battery(out)


def _null_discontinuities(nu: SignedMeasure, f: TestFunction) -> bool:
    pts = f.discontinuities()
    return nu.mass(canonicalize(nu.space, [], pts)) == 0 if pts else True


def setwise_probe_sets(seq: MeasureSequence, seed: int = 0) -> tuple[list, list, list]:
    """(all sets, open sets, closed sets) probe libraries for the space kind."""
    sp = seq.space
    if sp.is_real:
        base = real_probe_sets(seq, seed)
        opens = [interior(a) for a in base] + [sp.whole()]
        closeds = [closure(a) for a in base] + [sp.whole()]
    else:
        base = nat_probe_sets(seq, seed=seed)
        if sp.kind == COFINITE:
            opens = [a for a in base if is_open(a)]
            closeds = [a for a in base if is_closed(a)]
        else:
            opens = closeds = base
    uniq = lambda sets: list({str(a): a for a in sets if not a.is_empty}.values())  # noqa: E731
    return uniq(base), uniq(opens), uniq(closeds)


def check_setwise_battery(seq: MeasureSequence, seed: int = 0, tol: float = DEFAULT_TOL) -> Battery:
    """All sets, open sets, closed sets. On metric spaces the three must agree."""
    everything, opens, closeds = setwise_probe_sets(seq, seed)
    return Battery({
        "all_sets": check_S(seq, everything, tol, "set"),
        "open_sets": check_S(seq, opens, tol, "open"),
        "closed_sets": check_S(seq, closeds, tol, "closed"),
    })


def tv_trace(seq: MeasureSequence) -> list[tuple[int, float]]:
    out = []
    for n in seq.grid:
        try:
            out.append((n, float(sup_sets(seq.at(n), seq.limit))))
        except DivergenceError:
            out.append((n, INF))
    return out


def check_tv(seq: MeasureSequence, tol: float = DEFAULT_TOL) -> CheckVerdict:
    """``sup_A |nu_n(A) - nu(A)| -> 0``."""
    return _combine([_judge("sup_sets(nu_n, nu)", "limit", 0.0, tv_trace(seq), tol)])


def check_truncation_blowup(
    seq: MeasureSequence, f: TestFunction, thresholds: Sequence[float] = BLOWUP_THRESHOLDS, max_doublings: int = 64
) -> CheckVerdict:
    """For each threshold ``M`` find a cutoff ``k`` and index ``N`` with ``int trunc(f, k) d nu_n > M`` for grid ``n >= N``.

    Preconditions: ``f`` is nonnegative and unbounded, and ``int f d nu`` is infinite.
    """
    if "nonnegative" not in f.tags:
        raise ValueError("precondition violated: f must be nonnegative")
    if "bounded" in f.tags:
        raise ValueError("precondition violated: f is bounded, so its integral against a finite limit is finite")
    try:
        value = integrate(f, seq.limit).value
        raise ValueError(f"precondition violated: int f d nu = {fmt_number(value)} is finite")
    except DivergenceError as exc:
        if exc.direction <= 0:
            raise ValueError("precondition violated: int f d nu must diverge to +inf") from exc
    probes = []
    for m in thresholds:
        k = Fraction(1)
        found = None
        for _ in range(max_doublings):
            trace = [(n, float(integrate_truncated(f, seq.at(n), k))) for n in seq.grid]
            above = [v > m for _, v in trace]
            if above and above[-1]:
                start = len(above) - 1
                while start > 0 and above[start - 1]:
                    start -= 1
                found = (k, seq.grid[start], trace)
                break
            k *= 2
        if found is None:
            probes.append(Probe(f"M={m}", "exceeds", float(m), (), LimitVerdict("inconclusive"), FAIL, "no cutoff found"))
        else:
            k, start, trace = found
            note = f"k={fmt_number(k)}, N={start}"
            probes.append(Probe(f"M={m}", "exceeds", float(m), tuple(trace), LimitVerdict("diverges", direction=1), PASS, note))
    return _combine(probes)


# ---------------------------------------------------------------------------
# reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvergenceReport:
    label: str
    modes: dict
    batteries: dict
    grid: tuple
    tol: float
    seed: int

    @property
    def hierarchy_consistent(self) -> bool:
        """A pass at a stronger mode must come with a pass at every weaker one."""
        order = [m for m in ("tv", "setwise", "weak", "vague") if m in self.modes]
        for i, strong in enumerate(order):
            if self.modes[strong].status == PASS:
                if any(self.modes[weak].status != PASS for weak in order[i + 1:]):
                    return False
        return True

    def traces(self) -> list[tuple[str, int, float]]:
        rows = []
        for mode, verdict in sorted(self.modes.items()):
            for p in verdict.probes:
                rows.extend((f"{mode}/{p.probe_id}", n, v) for n, v in p.trace)
        for name, battery in sorted(self.batteries.items()):
            for key, verdict in battery.conditions.items():
                for p in verdict.probes:
                    rows.extend((f"{name}/{key}/{p.probe_id}", n, v) for n, v in p.trace)
        return rows

    def to_json(self, probes: bool = False) -> dict:
        return {
            "label": self.label,
            "grid": list(self.grid),
            "tol": self.tol,
            "seed": self.seed,
            "modes": {k: v.to_json(probes) for k, v in self.modes.items()},
            "batteries": {k: v.to_json(probes) for k, v in self.batteries.items()},
            "hierarchy_consistent": self.hierarchy_consistent,
            "caveat": "verdicts are computed on a finite grid; pass means no violation detected and a stable extrapolated limit",
        }


def _weak_family(seq: MeasureSequence, seed: int, count: int) -> list[TestFunction]:
    return [constant(seq.space, 1, "1")] + random_family(seq.space, "Cb", 1, seed, count)


def _vague_family(seq: MeasureSequence, seed: int, count: int) -> list[TestFunction]:
    return random_family(seq.space, "Cc", 1, seed, count)


def diagnose(
    seq: MeasureSequence,
    modes: Iterable[str] = MODES,
    seed: int = 0,
    tol: float = DEFAULT_TOL,
    batteries: bool = True,
    count: int = 6,
) -> ConvergenceReport:
    """Run the requested modes and, where the space allows, the condition batteries."""
    modes = tuple(modes)
    for m in modes:
        if m not in MODES:
            raise ValueError(f"unknown mode {m!r}; expected a subset of {', '.join(MODES)}")
    sp = seq.space
    out = {}
    bats = {}
    vague_battery = None
    if sp.is_real and batteries and "vague" in modes:
        vague_battery = check_vague_battery(seq, seed, tol, count)
        bats["vague"] = vague_battery
    if "vague" in modes:
        if vague_battery is not None:
            out["vague"] = vague_battery["cc_functions"]
        else:
            out["vague"] = check_F(seq, _vague_family(seq, seed, count), tol, "cc")
    if "weak" in modes:
        out["weak"] = check_F(seq, _weak_family(seq, seed, count), tol, "cb")
    if "setwise" in modes:
        setwise = check_setwise_battery(seq, seed, tol)
        if batteries:
            bats["setwise"] = setwise
        out["setwise"] = setwise["all_sets"]
    if "tv" in modes:
        out["tv"] = check_tv(seq, tol)
    return ConvergenceReport(seq.label, out, bats, seq.grid, tol, seed)

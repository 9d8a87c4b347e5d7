"""Golden corpus of worked sequences and measure pairs with machine-checkable expectations.

Cases live as JSON under ``data/`` (override with ``MEASURE_MODES_DATA``). Each
expectation names one operation, its arguments, the expected outcome, and where
the expected value comes from:

* ``published``: stated in the literature the case is drawn from;
* ``derived``: computed by an independent closed-form oracle;
* ``trivial``: follows from the definitions.

A ``published`` expectation marked ``disputed`` that does not hold is reported
as ``discrepancy`` rather than ``fail``; the case's ``discrepancy_note`` says why.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Any, Mapping, Sequence

from ..convergence import (
    DEFAULT_TOL,
    INCONCLUSIVE,
    FAIL,
    PASS,
    ConvergenceReport,
    MeasureSequence,
    check_F,
    check_S,
    check_truncation_blowup,
    continuity_set,
    diagnose,
    function_trace,
    nat_probe_sets,
    probe_limit,
    real_probe_sets,
    sequence_from_template,
    set_trace,
)
from ..distance import SET_CLASSES, TVReport, sup_sets, tv
from ..errors import DivergenceError, ParseError
from ..forms import exact, fmt_number, is_exact, parse_number
from ..integrate import integrate
from ..measure import SignedMeasure, measure_from_json
from ..space import Space, is_bounded, parse_set
from ..testfn import parse_function, random_family

DISCREPANCY = "discrepancy"
SOURCES = ("published", "derived", "trivial")
DATA_ENV = "MEASURE_MODES_DATA"


def data_dir() -> Path:
    override = os.environ.get(DATA_ENV)
    return Path(override) if override else Path(__file__).parent / "data"


@dataclass(frozen=True)
class Expectation:
    id: str
    op: str
    args: dict
    expected: Any
    source: str
    note: str = ""
    disputed: bool = False

    def to_json(self) -> dict:
        out = {"id": self.id, "op": self.op, **self.args, "expected": self.expected, "source": self.source}
        if self.note:
            out["note"] = self.note
        if self.disputed:
            out["disputed"] = True
        return out


@dataclass(frozen=True)
class GalleryCase:
    id: str
    title: str
    space: Space
    expectations: tuple
    sequence: MeasureSequence | None = None
    pair: tuple | None = None  # (mu, nu)
    discrepancy_note: str = ""
    raw: dict = field(default_factory=dict, compare=False, repr=False)

    def to_json(self) -> dict:
        return self.raw


def _expectation(data: Mapping, where: str) -> Expectation:
    data = dict(data)
    try:
        eid, op, expected, source = data.pop("id"), data.pop("op"), data.pop("expected"), data.pop("source")
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", where) from exc
    if source not in SOURCES:
        raise ParseError(f"source must be one of {', '.join(SOURCES)}", where)
    if op not in _OPS:
        raise ParseError(f"unknown operation {op!r}", where)
    note = data.pop("note", "")
    disputed = bool(data.pop("disputed", False))
    return Expectation(eid, op, data, expected, source, note, disputed)


def _load_json(path: Path, where: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"no such file {path}", where) from exc
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON at line {exc.lineno}: {exc.msg}", str(path)) from exc


def case_from_json(data: Mapping, base: Path | None = None) -> GalleryCase:
    cid = data.get("id", "?")
    space = Space.from_json(data["space"], f"{cid}.space")
    seq = None
    pair = None
    if "sequence" in data:
        s = data["sequence"]
        seq = sequence_from_template(s["rule"]["template"], s["limit"], s.get("grid") or None, cid)
    if "pair" in data:
        base = base or data_dir()
        loaded = []
        for key in ("mu", "nu"):
            ref = data["pair"][key]
            body = _load_json(base / ref, f"{cid}.pair.{key}") if isinstance(ref, str) else ref
            loaded.append(measure_from_json(body, where=f"{cid}.pair.{key}"))
        pair = tuple(loaded)
    exps = tuple(_expectation(e, f"{cid}.expectations[{i}]") for i, e in enumerate(data.get("expectations", [])))
    return GalleryCase(cid, data.get("title", ""), space, exps, seq, pair, data.get("discrepancy_note", ""), dict(data))


def ids() -> list[str]:
    out = []
    for p in sorted(data_dir().glob("*.json")):
        data = _load_json(p, p.name)
        if isinstance(data, dict) and "expectations" in data:
            out.append(data["id"])
    return out


@lru_cache(maxsize=None)
def _case_cached(cid: str, directory: str) -> GalleryCase:
    path = Path(directory) / f"{cid}.json"
    if not path.exists():
        raise KeyError(f"unknown gallery case {cid!r}; known: {', '.join(ids())}")
    return case_from_json(_load_json(path, path.name), Path(directory))


def case(cid: str) -> GalleryCase:
    return _case_cached(cid, str(data_dir()))


# ---------------------------------------------------------------------------
# expectation checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Outcome:
    case: str
    expectation: Expectation
    observed: Any
    status: str
    detail: str = ""

    def to_json(self) -> dict:
        e = self.expectation
        return {
            "case": self.case,
            "id": e.id,
            "op": e.op,
            "source": e.source,
            "expected": e.expected,
            "observed": self.observed,
            "status": self.status,
            "detail": self.detail or e.note,
        }


class _Context:
    """Per-run cache of diagnoses and reports for one case."""

    def __init__(self, c: GalleryCase, seed: int, grid: Sequence[int] | None, tol: float):
        self.case = c
        self.seed = seed
        self.tol = tol
        self.seq = c.sequence.with_grid(grid) if c.sequence is not None and grid else c.sequence
        self._report: ConvergenceReport | None = None
        self._tv: TVReport | None = None

    def report(self) -> ConvergenceReport:
        if self._report is None:
            self._report = diagnose(self.seq, seed=self.seed, tol=self.tol)
        return self._report

    def tv(self) -> TVReport:
        if self._tv is None:
            self._tv = tv(*self.case.pair, classes=None, tol=self.tol)
        return self._tv

    def measure(self, name: str) -> SignedMeasure:
        if name == "limit":
            return self.seq.limit
        return self.case.pair[("mu", "nu").index(name)]

    def set(self, text: str):
        return parse_set(text, self.case.space)

    def function(self, text: str):
        return parse_function(text, self.case.space)


def _num_json(v):
    if isinstance(v, float) and math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if isinstance(v, Fraction) or is_exact(v):
        return fmt_number(v)
    return v


def _matches_number(observed, expected, tol: float) -> bool:
    expected = parse_number(expected)
    if is_exact(observed) and is_exact(expected):
        return observed == expected
    return abs(float(observed) - float(expected)) <= tol * max(1.0, abs(float(expected)))


def _verdict_status(verdict) -> str | None:
    return INCONCLUSIVE if verdict.kind == "inconclusive" else None


def _op_mass(ctx, a):
    return ctx.measure(a["measure"]).mass(ctx.set(a["set"]))


def _op_mass_limit(ctx, a):
    return probe_limit(set_trace(ctx.seq, ctx.set(a["set"])), ctx.tol)


def _op_integral(ctx, a):
    try:
        return integrate(ctx.function(a["function"]), ctx.measure(a["measure"])).value
    except DivergenceError:
        return "diverges"


def _op_integral_limit(ctx, a):
    return probe_limit(function_trace(ctx.seq, ctx.function(a["function"])), ctx.tol)


def _op_integral_limits_exceed(ctx, a):
    f = ctx.function(a["function"])
    v = probe_limit(function_trace(ctx.seq, f), ctx.tol)
    if v.kind == "inconclusive":
        return v
    target = float(integrate(f, ctx.seq.limit).value)
    lims = v.limits if v.kind == "oscillates" else (v.value,) if v.kind == "converges" else ()
    return bool(lims) and all(x > target + ctx.tol for x in lims)


def _op_eventually_exact(ctx, a):
    seq = ctx.seq
    if a["sets"] == "bounded_probes":
        sets = [s for s in real_probe_sets(seq, ctx.seed) if is_bounded(s)]
    else:
        sets = [ctx.set(t) for t in a["sets"]]
    for s in sets:
        sup = max(s.endpoints())
        target = seq.limit.mass(s)
        if any(seq.at(n).mass(s) != target for n in seq.grid if n > sup):
            return False
    return True


def _op_mode(ctx, a):
    return ctx.report().modes[a["mode"]]


def _op_battery(ctx, a):
    return ctx.report().batteries[a["battery"]][a["condition"]]


def _op_battery_all(ctx, a):
    return ctx.report().batteries[a["battery"]]


def _op_check_F(ctx, a):
    sp = ctx.case.space
    if "family" in a:
        fs = random_family(sp, a["family"], 1, ctx.seed, a.get("count", 10))
    else:
        fs = [ctx.function(t) for t in a["functions"]]
    return check_F(ctx.seq, fs, ctx.tol)


def _op_divergent_everywhere(ctx, a):
    f = ctx.function(a["function"])
    return all(math.isinf(v) for _, v in function_trace(ctx.seq, f))


def _op_check_S(ctx, a):
    if a["sets"] == "finite_probes":
        sets = nat_probe_sets(ctx.seq)
        skip = a.get("exclude_point")
        if skip is not None:
            # keep only sets that do not separate the point from the rest
            sets = [s for s in sets if s.is_finite and skip not in s or s.is_cofinite and skip in s]
        sets = [s for s in sets if s.is_finite or s.is_cofinite]
    else:
        sets = [ctx.set(t) for t in a["sets"]]
    return check_S(ctx.seq, sets, ctx.tol)


def _op_sup_sets_bound(ctx, a):
    c, p = parse_number(a["C"]), int(a["power"])
    return all(sup_sets(ctx.seq.at(n), ctx.seq.limit) <= c / Fraction(n) ** p for n in ctx.seq.grid)


def _op_sup_sets(ctx, a):
    return ctx.tv().sup_sets


def _op_jordan_norm(ctx, a):
    return ctx.tv().jordan_norm


def _op_twice_sup_sets(ctx, a):
    return ctx.tv().twice_sup_sets


def _op_attainability(ctx, a):
    return ctx.tv().attainability.summary


def _op_witness(ctx, a):
    return ctx.tv().attainability.witness


def _op_gaps_shrink(ctx, a):
    report = ctx.tv()
    for cls in a["classes"]:
        est = report.estimate(cls)
        gaps = [est.optimum - v for _, v in est.trail]
        if len(gaps) < 3 or any(g <= 0 for g in gaps) or any(b >= a_ for a_, b in zip(gaps, gaps[1:])):
            return False
    return True


def _op_continuity_set(ctx, a):
    return continuity_set(ctx.measure(a["measure"]), ctx.set(a["set"]))


def _op_truncation_blowup(ctx, a):
    return check_truncation_blowup(ctx.seq, ctx.function(a["function"]))


_OPS = {
    "mass": _op_mass,
    "mass_limit": _op_mass_limit,
    "integral": _op_integral,
    "integral_limit": _op_integral_limit,
    "integral_limits_exceed": _op_integral_limits_exceed,
    "eventually_exact": _op_eventually_exact,
    "mode": _op_mode,
    "battery": _op_battery,
    "battery_all": _op_battery_all,
    "check_F": _op_check_F,
    "divergent_everywhere": _op_divergent_everywhere,
    "check_S": _op_check_S,
    "sup_sets_bound": _op_sup_sets_bound,
    "sup_sets": _op_sup_sets,
    "jordan_norm": _op_jordan_norm,
    "twice_sup_sets": _op_twice_sup_sets,
    "attainability": _op_attainability,
    "witness": _op_witness,
    "gaps_shrink": _op_gaps_shrink,
    "continuity_set": _op_continuity_set,
    "truncation_blowup": _op_truncation_blowup,
}


def _judge(e: Expectation, raw, tol: float) -> tuple[Any, bool | None, str]:
    """``(observed JSON, matches, detail)``; ``matches`` is ``None`` when inconclusive."""
    from ..convergence import Battery, CheckVerdict, LimitVerdict

    exp = e.expected
    if isinstance(raw, LimitVerdict):
        observed = raw.to_json()
        if raw.kind == "inconclusive":
            return observed, None, "too few grid points or no stable tail"
        if "converges" in exp:
            return observed, raw.kind == "converges" and _matches_number(raw.value, exp["converges"], 10 * tol), ""
        if "oscillates" in exp:
            want = sorted(float(parse_number(v)) for v in exp["oscillates"])
            ok = raw.kind == "oscillates" and len(raw.limits) == len(want) and all(
                _matches_number(x, w, 10 * tol) for x, w in zip(sorted(raw.limits), want)
            )
            return observed, ok, ""
        if "diverges" in exp:
            return observed, raw.kind == "diverges", ""
        raise ParseError(f"unsupported limit expectation {exp!r}", e.id)
    if isinstance(raw, CheckVerdict):
        detail = raw.witness or raw.note
        if raw.status == INCONCLUSIVE and exp != INCONCLUSIVE:
            return raw.status, None, raw.note
        return raw.status, raw.status == exp, detail or ""
    if isinstance(raw, Battery):
        statuses = raw.statuses()
        if INCONCLUSIVE in statuses.values() and exp != INCONCLUSIVE:
            return statuses, None, "some conditions inconclusive"
        return statuses, all(s == exp for s in statuses.values()), ""
    if isinstance(raw, bool):
        return raw, raw == exp, ""
    if isinstance(raw, str):
        return raw, raw == exp, ""
    if exp == "diverges" or raw == "diverges":
        return _num_json(raw), raw == exp, ""
    return _num_json(raw), _matches_number(raw, exp, tol), ""


def check_expectation(c: GalleryCase, e: Expectation, ctx: _Context) -> Outcome:
    raw = _OPS[e.op](ctx, e.args)
    observed, ok, detail = _judge(e, raw, ctx.tol)
    if ok is None:
        status = INCONCLUSIVE
    elif ok:
        status = PASS
    elif e.disputed and e.source == "published":
        status = DISCREPANCY
    else:
        status = FAIL
    return Outcome(c.id, e, observed, status, detail)


def run_case(c: GalleryCase, seed: int = 0, grid: Sequence[int] | None = None, tol: float = DEFAULT_TOL) -> list[Outcome]:
    ctx = _Context(c, seed, grid, tol)
    return [check_expectation(c, e, ctx) for e in c.expectations]


@dataclass(frozen=True)
class GallerySummary:
    outcomes: tuple
    seed: int
    grid: tuple | None

    def counts(self) -> dict:
        out = {s: 0 for s in (PASS, FAIL, DISCREPANCY, INCONCLUSIVE)}
        for o in self.outcomes:
            out[o.status] += 1
        return out

    @property
    def exit_code(self) -> int:
        return 1 if any(o.status == FAIL for o in self.outcomes) else 0

    def discrepancies(self) -> list[Outcome]:
        return [o for o in self.outcomes if o.status == DISCREPANCY]

    def to_json(self) -> dict:
        return {
            "seed": self.seed,
            "grid": list(self.grid) if self.grid else None,
            "counts": self.counts(),
            "outcomes": [o.to_json() for o in self.outcomes],
        }


def run_all(seed: int = 0, grid: Sequence[int] | None = None, tol: float = DEFAULT_TOL, only: Sequence[str] | None = None) -> GallerySummary:
    """Check every expectation of every case (or of ``only``)."""
    outcomes = []
    for cid in only or ids():
        outcomes.extend(run_case(case(cid), seed, grid, tol))
    return GallerySummary(tuple(outcomes), seed, tuple(grid) if grid else None)

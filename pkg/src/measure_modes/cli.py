"""Command-line entry point: ``measure-modes {tv,diagnose,gallery,report}``.

Every command builds one report document (a plain dict). ``--json PATH`` writes
it (``-`` for stdout); otherwise a table is rendered from the same document.
Exit status: 0 clean, 1 a verdict or expectation failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import sys
from pathlib import Path

from . import gallery
from .convergence import DEFAULT_GRID, DEFAULT_TOL, FAIL, INCONCLUSIVE, MODES, diagnose, sequence_from_json
from .distance import CLASSES, tv
from .errors import MeasureModesError, ParseError
from .forms import parse_number
from .measure import measure_from_json

SCHEMA_VERSION = 1
EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    """Bad command-line input; reported with exit status 2."""


def _load(path: str) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _grid(text: str | None) -> list[int] | None:
    if text is None:
        return None
    try:
        grid = [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError as exc:
        raise InputError(f"--grid expects comma-separated integers, got {text!r}") from exc
    if not grid or any(b <= a for a, b in zip(grid, grid[1:])) or grid[0] < 1:
        raise InputError(f"--grid must be a strictly increasing list of positive integers, got {text!r}")
    return grid


def _listing(text: str | None, allowed, flag: str) -> list[str] | None:
    if text is None:
        return None
    if text == "all":
        return list(allowed)
    items = [t for t in text.split(",") if t]
    bad = [t for t in items if t not in allowed]
    if bad:
        raise InputError(f"{flag}: unknown value(s) {', '.join(bad)}; expected a subset of {', '.join(allowed)}")
    return items


def _document(args, results: dict, warnings: list[str]) -> dict:
    invocation = {"command": args.command}
    for key in ("sub", "case_id", "file_a", "file_b", "spec", "classes", "modes", "gamma", "report"):
        value = getattr(args, key, None)
        if value is not None:
            invocation[key] = value
    invocation["seed"] = args.seed
    invocation["grid"] = _grid(args.grid)
    invocation["tol"] = args.tol
    doc = {"schema_version": SCHEMA_VERSION, "invocation": invocation, "results": results, "warnings": warnings}
    if not args.no_timestamp:
        doc["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return doc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_tv(args) -> tuple[dict, int]:
    mu = measure_from_json(_load(args.file_a), where=args.file_a)
    nu = measure_from_json(_load(args.file_b), where=args.file_b)
    classes = _listing(args.classes, CLASSES, "--classes") if args.classes else []
    report = tv(mu, nu, classes, parse_number(args.gamma), args.tol)
    warnings = []
    if report.jordan_norm != report.twice_sup_sets:
        warnings.append("total masses differ: jordan_norm != twice_sup_sets")
    return _document(args, {"kind": "tv", "report": report.to_json()}, warnings), EXIT_OK


def cmd_diagnose(args) -> tuple[dict, int]:
    seq = sequence_from_json(_load(args.spec), _grid(args.grid))
    modes = _listing(args.modes, MODES, "--modes") or list(MODES)
    report = diagnose(seq, modes, args.seed, args.tol)
    warnings = [f"{m}: inconclusive ({v.note})" for m, v in report.modes.items() if v.status == INCONCLUSIVE]
    if not report.hierarchy_consistent:
        warnings.append("mode verdicts violate the strength ordering tv > setwise > weak > vague")
    if args.traces:
        _write_traces(args.traces, report.traces())
    code = EXIT_FAIL if any(v.status == FAIL for v in report.modes.values()) else EXIT_OK
    return _document(args, {"kind": "diagnose", "report": report.to_json()}, warnings), code


def cmd_gallery(args) -> tuple[dict, int]:
    if args.sub == "list":
        cases = [{"id": cid, "title": gallery.case(cid).title} for cid in gallery.ids()]
        return _document(args, {"kind": "gallery-list", "cases": cases}, []), EXIT_OK
    if args.sub == "show":
        try:
            c = gallery.case(args.case_id)
        except KeyError as exc:
            raise InputError(exc.args[0]) from exc
        return _document(args, {"kind": "gallery-show", "case": c.to_json()}, []), EXIT_OK
    summary = gallery.run_all(args.seed, _grid(args.grid), args.tol)
    warnings = [f"{o.case}/{o.expectation.id}: published value disagrees with computation" for o in summary.discrepancies()]
    warnings += [f"{o.case}/{o.expectation.id}: inconclusive" for o in summary.outcomes if o.status == INCONCLUSIVE]
    return _document(args, {"kind": "gallery-run", "summary": summary.to_json()}, warnings), summary.exit_code


def cmd_report(args) -> tuple[dict, int]:
    doc = _load(args.report)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise InputError(f"{args.report}: unsupported schema_version {doc.get('schema_version')!r}")
    return doc, EXIT_OK


def _write_traces(path: str, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["probe_id", "n", "value"])
        writer.writerows(rows)


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def render(doc: dict) -> str:
    res = doc["results"]
    kind = res.get("kind")
    lines = []
    if kind == "tv":
        r = res["report"]
        for key in ("jordan_norm", "sup_sets", "twice_sup_sets", "positive_mass", "negative_mass", "positive_set"):
            lines.append(f"{key:18} {r[key]}")
        if "attainability" in r:
            a = r["attainability"]
            lines.append(f"{'attainability':18} {a['summary']}")
            lines.append(f"{'witness':18} {a['witness']}")
        for e in r["estimates"]:
            lines.append(f"  {e['class']:28} value {e['value']:>12}  gap {e['gap']:>12}  attained {e['attained']}")
    elif kind == "diagnose":
        r = res["report"]
        lines.append(f"sequence {r['label'] or '-'}  grid {r['grid'][0]}..{r['grid'][-1]} ({len(r['grid'])} points)")
        for mode, v in r["modes"].items():
            lines.append(f"  {mode:10} {v['status']:13} {v['witness'] or ''}")
        for name, battery in r["batteries"].items():
            lines.append(f"{name} battery")
            for cond, v in battery.items():
                lines.append(f"  {cond:28} {v['status']:13} {v['witness'] or ''}")
        lines.append(f"hierarchy consistent: {r['hierarchy_consistent']}")
        lines.append(r["caveat"])
    elif kind == "gallery-list":
        lines += [f"{c['id']:26} {c['title']}" for c in res["cases"]]
    elif kind == "gallery-show":
        lines.append(json.dumps(res["case"], indent=2))
    elif kind == "gallery-run":
        s = res["summary"]
        for o in s["outcomes"]:
            lines.append(f"{o['case']:24} {o['id']:32} {o['source']:10} {o['status']}")
        lines.append(", ".join(f"{k} {v}" for k, v in s["counts"].items()))
    for w in doc.get("warnings", []):
        lines.append(f"warning: {w}")
    return "\n".join(lines)


def _emit(doc: dict, target: str | None) -> None:
    if target is None:
        print(render(doc))
        return
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if target == "-":
        sys.stdout.write(text)
    else:
        Path(target).write_text(text)
        print(render(doc))


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", metavar="PATH", help="write the report document as JSON ('-' for stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--grid", help="comma-separated increasing indices n")
    common.add_argument("--tol", type=float, default=DEFAULT_TOL)
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    parser = argparse.ArgumentParser(prog="measure-modes", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tv", parents=[common], help="distances between two measures")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.add_argument("--classes", help="'all' or a comma-separated list of class estimators")
    p.add_argument("--gamma", default="1", help="bound for the function classes")

    p = sub.add_parser("diagnose", parents=[common], help="convergence modes of a measure sequence")
    p.add_argument("spec")
    p.add_argument("--modes", help="comma-separated subset of vague,weak,setwise,tv")
    p.add_argument("--traces", metavar="PATH", help="write probe traces as CSV (probe_id, n, value)")

    p = sub.add_parser("gallery", parents=[common], help="the worked-case corpus")
    p.add_argument("sub", choices=("list", "show", "run"))
    p.add_argument("case_id", nargs="?")

    p = sub.add_parser("report", parents=[common], help="render a saved JSON report")
    p.add_argument("report")
    return parser


_COMMANDS = {"tv": cmd_tv, "diagnose": cmd_diagnose, "gallery": cmd_gallery, "report": cmd_report}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "gallery" and args.sub == "show" and not args.case_id:
        parser.error("gallery show needs a case id")
    try:
        doc, code = _COMMANDS[args.command](args)
    except (InputError, MeasureModesError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_INPUT
    _emit(doc, args.json)
    return code


if __name__ == "__main__":
    sys.exit(main())

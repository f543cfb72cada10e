"""Command-line front end: deterministic JSON and CSV reports.

Every JSON document carries ``schema_version`` and validates against the
matching file in ``biharm/schemas``.  Floats are written in shortest
round-trip form; exact rationals are repeated as "num/den" strings under
``<key>_exact``.

Exit codes: 0 success, 1 usage or I/O error, 2 when ``--strict`` is given
and an identity verdict is FAIL / DEGENERATE-PROBE-FAIL or an appendix
verdict is "inconsistent".
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Optional, Sequence

from . import exponents, identities, stability
from .exact import RootBracket, as_exact

SCHEMA_VERSION = "1.0"

COMMANDS = ("report", "pstar", "scan", "verify-identities", "verify-appendix", "stability", "jl")

DEFAULT_FILES = {
    "report": "report.json",
    "pstar": "pstar.csv",
    "scan": "feas.csv",
    "verify-identities": "identities.json",
    "verify-appendix": "appendix.json",
    "stability": "stability.json",
    "jl": "jl.json",
}
DEFAULT_FORMAT = {c: "csv" if c in ("pstar", "scan") else "json" for c in COMMANDS}
SCHEMA_FILES = {
    "report": "report.schema.json",
    "pstar": "table.schema.json",
    "scan": "table.schema.json",
    "verify-identities": "identities.schema.json",
    "verify-appendix": "appendix.schema.json",
    "stability": "stability.schema.json",
    "jl": "jl.schema.json",
}

SCAN_COLUMNS = ("n", "gamma", "p", "q", "theta", "E", "cond_E", "cond_52", "admissible")
PSTAR_COLUMNS = (
    "n", "gamma0", "low", "high", "width", "p_max", "epsilon_n", "certified", "grid_points",
)


def load_schema(command: str) -> dict:
    """The JSON schema shipped for ``command``'s JSON output."""
    text = resources.files("biharm").joinpath("schemas", SCHEMA_FILES[command]).read_text("utf-8")
    return json.loads(text)


class UsageError(Exception):
    pass


# -- rendering --------------------------------------------------------------


def exact_str(x) -> Optional[str]:
    if x is None:
        return None
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def put(doc: dict, key: str, value) -> None:
    """Store ``value`` as a float under ``key``; exact values also as ``key_exact``."""
    if value is None:
        doc[key] = None
        doc[key + "_exact"] = None
    elif isinstance(value, (Fraction, int)) and not isinstance(value, bool):
        doc[key] = float(value)
        doc[key + "_exact"] = exact_str(value)
    else:
        doc[key] = float(value)


def bracket_doc(b: Optional[RootBracket]) -> Optional[dict]:
    if b is None:
        return None
    out: dict = {}
    put(out, "low", b.low)
    put(out, "high", b.high)
    out["width"] = float(b.width)
    return out


def cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return repr(float(v))
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_csv(columns: Sequence[str], rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([cell(row.get(c)) for c in columns])
    return buf.getvalue()


def render_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def envelope(command: str, parameters: dict, **body) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": command, "parameters": parameters, **body}


# -- command bodies ---------------------------------------------------------


@dataclass
class Result:
    doc: dict
    columns: Sequence[str] = ()
    rows: Sequence[dict] = ()
    strict_failure: bool = False


def _report_doc(r: exponents.ExponentReport) -> dict:
    d: dict = {"n": r.n}
    put(d, "p_sobolev", r.p_sobolev)
    put(d, "p_wy", r.p_wy)
    put(d, "gamma0", r.gamma0)
    d["p_star"] = bracket_doc(r.p_star)
    put(d, "p_max", r.p_max)
    put(d, "epsilon_n", r.epsilon_n)
    put(d, "h_gamma0", r.h_gamma0)
    put(d, "h_gamma0_printed", r.h_gamma0_printed)
    d["pstar_certified"] = r.pstar_certified
    d["notes"] = list(r.notes)
    return d


def cmd_report(ns, args) -> Result:
    tol = args.tol if args.tol is not None else 1e-12
    reports = exponents.exponent_reports(ns, tol, args.workers)
    docs = [_report_doc(r) for r in reports]
    columns = (
        "n", "p_sobolev", "p_wy", "gamma0", "p_star_low", "p_star_high", "p_max", "epsilon_n",
        "h_gamma0", "pstar_certified",
    )
    rows = []
    for d in docs:
        b = d["p_star"] or {}
        rows.append({**d, "p_star_low": b.get("low"), "p_star_high": b.get("high")})
    return Result(envelope("report", {"n": list(ns), "tol": tol}, reports=docs), columns, rows)


def _pstar_row(args) -> dict:
    n, tol = args
    row: dict = {"n": n}
    if n <= 8:
        return row
    res = exponents.p_star_search(n, tol)
    row.update(gamma0=exponents.gamma0(n), grid_points=res.grid_points, certified=res.certified_smallest)
    if res.bracket is not None:
        b = res.bracket
        p_max = 1 + 8 * b.high / (n - 4)
        row.update(
            low=b.low, high=b.high, width=b.width, p_max=p_max, epsilon_n=p_max - Fraction(n, n - 8)
        )
    return row


def _map(fn, jobs, workers):
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, jobs))
    return [fn(j) for j in jobs]


def cmd_pstar(ns, args) -> Result:
    tol = args.tol if args.tol is not None else 1e-12
    rows = _map(_pstar_row, [(n, tol) for n in ns], args.workers)
    docs = []
    for r in rows:
        d: dict = {"n": r["n"]}
        for k in PSTAR_COLUMNS[1:]:
            v = r.get(k)
            if isinstance(v, Fraction):
                put(d, k, v)
            else:
                d[k] = v
        docs.append(d)
    return Result(envelope("pstar", {"n": list(ns), "tol": tol}, rows=docs), PSTAR_COLUMNS, rows)


def cmd_scan(ns, args) -> Result:
    if len(ns) != 1:
        raise UsageError("scan takes a single --n")
    n = ns[0]
    if n <= 8:
        raise UsageError("scan needs n >= 9")
    samples = exponents.feasibility_scan(n, args.gamma_steps, args.p_steps, args.workers)
    rows = [
        {
            "n": s.n, "gamma": s.gamma, "p": s.p, "q": s.q, "theta": s.theta, "E": s.E,
            "cond_E": s.cond_E, "cond_52": s.cond_52, "admissible": s.admissible,
        }
        for s in samples
    ]
    docs = []
    for r in rows:
        d: dict = {}
        for k in SCAN_COLUMNS:
            if isinstance(r[k], Fraction):
                put(d, k, r[k])
            else:
                d[k] = r[k]
        docs.append(d)
    params = {"n": [n], "gamma_steps": args.gamma_steps, "p_steps": args.p_steps}
    return Result(envelope("scan", params, rows=docs), SCAN_COLUMNS, rows)


def _identity_doc(r: identities.IdentityReport) -> dict:
    d = {"id": r.id, "label": r.label, "n": r.n}
    put(d, "gamma", Fraction(r.gamma))
    d.update(
        lhs=r.lhs,
        rhs=r.rhs,
        abs_residual=r.abs_residual,
        rel_residual=r.rel_residual,
        ratio=r.ratio if r.lhs else None,
        lhs_converged=r.lhs_converged,
        rhs_converged=r.rhs_converged,
        pointwise=r.pointwise,
        radius=r.radius,
        verdict=r.verdict,
        note=r.note,
    )
    return d


def cmd_identities(ns, args) -> Result:
    if len(ns) != 1:
        raise UsageError("verify-identities takes a single --n")
    tol = args.tol if args.tol is not None else identities.DEFAULT_TOL
    ids = args.ids.split(",") if args.ids else None
    try:
        reports = identities.run_audit(ids, n=ns[0], tol=tol, workers=args.workers)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    docs = [_identity_doc(r) for r in reports]
    summary = {v: 0 for v in (identities.PASS, identities.FAIL, identities.PROBE_FAIL, identities.WITHHELD)}
    for r in reports:
        summary[r.verdict] += 1
    params = {
        "n": ns[0],
        "tol": tol,
        "ids": [r for r in identities.IDENTITY_IDS if ids is None or r in ids],
        "gammas": [exact_str(g) for g in identities.AUDIT_GAMMAS],
    }
    doc = envelope(
        "verify-identities",
        params,
        catalog=[d.to_dict() for d in identities.identity_catalog()],
        reports=docs,
        summary=summary,
    )
    bad = summary[identities.FAIL] + summary[identities.PROBE_FAIL]
    columns = ("id", "label", "gamma", "n", "lhs", "rhs", "abs_residual", "rel_residual", "verdict")
    return Result(doc, columns, docs, strict_failure=bad > 0)


def _appendix_doc(rep: exponents.DiscrepancyReport) -> dict:
    d: dict = {"n": rep.n, "verdict": rep.verdict}
    put(d, "scale", rep.scale)
    d.update(
        printed_coefficients=list(rep.printed_coefficients),
        cleared_coefficients=list(rep.cleared_coefficients),
        cleared_primitive=list(rep.cleared_primitive),
        cleared_leading=rep.cleared_coefficients[-1],
        deltas_exact=[exact_str(x) for x in rep.deltas],
        mismatched_degrees=list(rep.mismatched_degrees),
        sign_mismatch_count=len(rep.sign_mismatches),
    )
    table = []
    for row in rep.sign_table:
        t: dict = {}
        put(t, "gamma", row.gamma)
        t.update(printed_sign=row.printed_sign, h_sign=row.h_sign, mismatch=row.mismatch)
        table.append(t)
    d["sign_table"] = table
    d["notes"] = list(rep.notes)
    return d


def cmd_appendix(ns, args) -> Result:
    if any(n < 9 for n in ns):
        raise UsageError("verify-appendix needs n >= 9")
    reps = [exponents.discrepancy_report(n, args.samples) for n in ns]
    docs = [_appendix_doc(r) for r in reps]
    rows = [
        {"n": r.n, "gamma": row.gamma, "printed_sign": row.printed_sign, "h_sign": row.h_sign,
         "mismatch": row.mismatch, "verdict": r.verdict}
        for r in reps for row in r.sign_table
    ]
    doc = envelope("verify-appendix", {"n": list(ns), "samples": args.samples}, audits=docs)
    columns = ("n", "gamma", "printed_sign", "h_sign", "mismatch", "verdict")
    return Result(doc, columns, rows, strict_failure=any(r.verdict == "inconsistent" for r in reps))


def _stability_doc(n, p, with_rayleigh: bool) -> dict:
    sol = stability.singular_solution(n, p)
    scan = stability.rayleigh_scan(sol) if with_rayleigh else None
    v = stability.singular_stability(n, p, scan)
    d: dict = {"n": n}
    for key, val in (("p", sol.p), ("alpha", sol.alpha), ("Q", sol.Q)):
        put(d, key, val)
    d["L"] = sol.L
    d["residual"] = sol.residual
    put(d, "pQ", v.pQ)
    put(d, "hr", v.hr)
    d.update(stable=v.stable, margin=v.margin, label=v.label)
    bounds = []
    for b in identities.verify_pointwise_bounds(sol, [0.01, 0.1, 1.0, 10.0, 100.0]):
        bd = {"name": b.name, "lhs": b.lhs, "rhs": b.rhs, "factor": b.factor, "holds": b.holds,
              "margin_ratio": b.margin_ratio, "max_radial_spread": b.max_radial_spread}
        if b.lhs_exact is not None:
            bd["lhs_exact"], bd["rhs_exact"] = exact_str(b.lhs_exact), exact_str(b.rhs_exact)
        bounds.append(bd)
    d["pointwise_bounds"] = bounds
    if scan is None:
        d["rayleigh"] = None
    else:
        d["rayleigh"] = {
            "minimum": scan.minimum,
            "arg_s": scan.arg_s,
            "arg_width": scan.arg_width,
            "witness": scan.witness,
            "best_by_width": [{"width": w, "minimum": q} for w, q in scan.best_by_width().items()],
        }
    return d


def _stability_job(args):
    return _stability_doc(*args)


def cmd_stability(ns, args) -> Result:
    ps = args.p or ["3"]
    try:
        exact_ps = [as_exact(p) for p in ps]
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"--p values must be rationals like 20 or 7/2, got {ps}") from None
    jobs = [(n, p, args.rayleigh) for n in ns for p in exact_ps]
    for n, p, _ in jobs:
        if n < 9 or not p > Fraction(n, n - 4):
            raise UsageError(f"stability needs n >= 9 and p > n/(n-4); got n={n}, p={p}")
    docs = _map(_stability_job, jobs, args.workers)
    params = {"n": list(ns), "p": [exact_str(p) for p in exact_ps], "rayleigh": args.rayleigh}
    columns = ("n", "p", "Q", "pQ", "hr", "stable", "margin", "residual")
    return Result(envelope("stability", params, results=docs), columns, docs)


def cmd_jl(ns, args) -> Result:
    if any(n < 9 for n in ns):
        raise UsageError("jl needs n >= 9")
    tol = args.tol if args.tol is not None else 1e-12
    docs = []
    for n in ns:
        b = stability.jl_threshold(n, tol)
        docs.append({"n": n, "asymptotic_exists": stability.jl_asymptotic_exists(n), "threshold": bracket_doc(b)})
    rows = [
        {"n": d["n"], "asymptotic_exists": d["asymptotic_exists"],
         "low": (d["threshold"] or {}).get("low"), "high": (d["threshold"] or {}).get("high")}
        for d in docs
    ]
    doc = envelope("jl", {"n": list(ns), "tol": tol}, label=stability.THRESHOLD_LABEL, results=docs)
    return Result(doc, ("n", "asymptotic_exists", "low", "high"), rows)


HANDLERS = {
    "report": cmd_report,
    "pstar": cmd_pstar,
    "scan": cmd_scan,
    "verify-identities": cmd_identities,
    "verify-appendix": cmd_appendix,
    "stability": cmd_stability,
    "jl": cmd_jl,
}
DEFAULT_N = {
    "report": [20], "pstar": [20], "scan": [20], "verify-identities": [identities.DEFAULT_N],
    "verify-appendix": [20], "stability": [20], "jl": list(range(9, 41)),
}


# -- argument parsing -------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def parse_range(text: str) -> list[int]:
    try:
        a, b = (int(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--n-range must look like a:b, got {text!r}") from None
    if a > b:
        raise UsageError(f"--n-range needs a <= b, got {text!r}")
    return list(range(a, b + 1))


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    g = common.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, help="dimension")
    g.add_argument("--n-range", help="inclusive dimension range a:b")
    common.add_argument("--tol", type=float, help="bracket width (report/pstar/jl) or identity tolerance")
    common.add_argument("--gamma-steps", type=int, default=32)
    common.add_argument("--p-steps", type=int, default=32)
    common.add_argument("--samples", type=int, default=64, help="appendix sign-table size")
    common.add_argument("--output", help="output file, or directory for the default file name")
    common.add_argument("--format", choices=("json", "csv"))
    common.add_argument("--strict", action="store_true")
    common.add_argument("--workers", type=int, default=1)
    common.add_argument("--p", action="append", help="exponent for stability (repeatable, rational)")
    common.add_argument("--rayleigh", action="store_true", help="add the Rayleigh-quotient scan")
    common.add_argument("--ids", help="comma-separated identity ids")

    parser = _Parser(prog="biharm", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def _dimensions(args) -> list[int]:
    if args.n is not None:
        ns = [args.n]
    elif args.n_range:
        ns = parse_range(args.n_range)
    else:
        ns = DEFAULT_N[args.command]
    if any(n < 5 for n in ns):
        raise UsageError("dimensions must be >= 5")
    return ns


def _resolve_output(path: Optional[str], command: str, fmt: str) -> Optional[str]:
    if path is None:
        return None
    if os.path.isdir(path):
        name = DEFAULT_FILES[command]
        stem = name.rsplit(".", 1)[0]
        return os.path.join(path, f"{stem}.{fmt}")
    return path


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if args.workers < 1:
            raise UsageError("--workers must be >= 1")
        if args.tol is not None and not args.tol > 0:
            raise UsageError("--tol must be positive")
        if args.gamma_steps < 2 or args.p_steps < 2 or args.samples < 1:
            raise UsageError("grid sizes must be >= 2 and --samples >= 1")
        fmt = args.format or DEFAULT_FORMAT[args.command]
        result = HANDLERS[args.command](_dimensions(args), args)
    except UsageError as exc:
        print(f"error: {exc}", file=stderr)
        return 1
    text = render_json(result.doc) if fmt == "json" else render_csv(result.columns, result.rows)
    target = _resolve_output(args.output, args.command, fmt)
    if target is None:
        stdout.write(text)
    else:
        try:
            with open(target, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"error: cannot write {target}: {exc.strerror or exc}", file=stderr)
            return 1
    if args.strict and result.strict_failure:
        print(f"strict: {args.command} reported a failing verdict", file=stderr)
        return 2
    return 0


def main() -> None:
    sys.exit(run())

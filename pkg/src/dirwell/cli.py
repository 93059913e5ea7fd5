"""Command line interface: ``dirwell {analyze,sweep,ekeland,vi,oracle}``.

Exit codes: 0 well-posed / shrinks / verified, 2 not, 3 inconclusive, 1 error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import certificates as cert
from .cone import minimal_time
from .ekeland import ekeland_point, verify_ekeland
from .errors import DirwellError
from .oracle import (oracle_ekeland, oracle_ekeland_predicate,
                     oracle_level_diameter, oracle_minimal_time)
from .problem import parse_problem
from .sampling import sample_directional_region
from .serialize import csv_text, dumps
from .vi import vi_wellposedness_report

EXIT_OK, EXIT_ERROR, EXIT_NOT, EXIT_INCONCLUSIVE = 0, 1, 2, 3

_EXIT_OF = {
    "well-posed": EXIT_OK, "shrinks": EXIT_OK, "admissible": EXIT_OK,
    "not-well-posed": EXIT_NOT, "does-not-shrink": EXIT_NOT, "not-admissible": EXIT_NOT,
    "inconclusive": EXIT_INCONCLUSIVE,
}


class CliError(Exception):
    pass


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dirwell", description="Directional well-posedness diagnostics.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--problem", required=True,
                       help="problem JSON file or catalog name")
        p.add_argument("--schedule", type=_float_list, default=list(cert.DEFAULT_SCHEDULE),
                       help="comma-separated decreasing epsilons (default 1e-1,...,1e-5)")
        p.add_argument("--out", default=None, help="directory for output files")
        p.add_argument("--seed", type=int, default=None, help="override the document seed")
        p.add_argument("--format", choices=("json", "csv"), default="json")

    common(sub.add_parser("analyze", help="combined well-posedness report"))
    p = sub.add_parser("sweep", help="diameter sweep or growth profile")
    common(p)
    p.add_argument("--family", required=True,
                   choices=cert.FAMILIES + cert.VI_FAMILIES + ("c0", "c1"))
    p = sub.add_parser("ekeland", help="constructive Ekeland point")
    common(p)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--x0", type=_float_list, default=None)
    common(sub.add_parser("vi", help="variational inequality report"))
    p = sub.add_parser("oracle", help="cross-check main code against brute force")
    common(p)
    p.add_argument("--epsilon", type=float, default=None)
    return parser


def _load(args):
    path = Path(args.problem)
    problem = parse_problem(path.read_text() if path.is_file() else args.problem)
    if args.seed is not None:
        doc = problem.to_document()
        doc["seed"] = args.seed
        problem = parse_problem(doc)
    return problem


def _envelope(args, problem, result, spacing):
    return {
        "command": args.command, "problem": problem.name or args.problem,
        "seed": problem.seed, "schedule": list(args.schedule), "spacing": spacing,
        "tolerances": {"abs": cert.TOL_ABS, "rel": cert.TOL_REL},
        "window": cert.WINDOW_NOTE, "result": result,
    }


def _csv_header(args, problem, spacing):
    lines = [f"# command: {args.command}", f"# problem: {problem.name or args.problem}",
             f"# seed: {problem.seed}",
             "# schedule: " + ",".join(repr(float(e)) for e in args.schedule),
             f"# spacing: {spacing!r}",
             f"# tolerances: abs={cert.TOL_ABS!r} rel={cert.TOL_REL!r}",
             f"# {cert.WINDOW_NOTE}"]
    return "\n".join(lines) + "\n"


def _emit(args, problem, payload, csv_body, spacing, summary, stem):
    if args.format == "csv":
        text = _csv_header(args, problem, spacing) + csv_body
        suffix = "csv"
    else:
        text = dumps(_envelope(args, problem, payload, spacing))
        suffix = "json"
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        (Path(args.out) / f"{stem}.{suffix}").write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)
        print(summary, file=sys.stderr)


def cmd_analyze(args):
    problem = _load(args)
    report = cert.wellposedness_report(problem, args.schedule)
    rows = []
    for name, c in sorted(report.criteria.items()):
        rows.append((name, c["applicable"], c["verdict"] or ""))
    body = csv_text(["criterion", "applicable", "verdict"], rows)
    applied = ", ".join(f"{n}={v}" for n, a, v in rows if a)
    summary = f"{problem.name or args.problem}: {report.overall} ({cert.WINDOW_NOTE}); {applied}"
    _emit(args, problem, report.to_dict(), body, report.spacing, summary, "analyze")
    return _EXIT_OF[report.overall]


def cmd_sweep(args):
    problem = _load(args)
    cert.check_schedule(args.schedule)
    if args.family in ("c0", "c1"):
        result = cert.c_profile(problem, args.family)
    else:
        result = cert.diameter_sweep(problem, args.family, args.schedule)
    summary = f"{args.family}: {result.verdict} ({cert.WINDOW_NOTE})"
    _emit(args, problem, result.to_dict(), result.to_csv(), result.spacing, summary,
          f"sweep_{args.family}")
    return _EXIT_OF[result.verdict]


def cmd_ekeland(args):
    problem = _load(args)
    cloud = sample_directional_region(problem)
    result = ekeland_point(problem, args.x0, args.epsilon, cloud)
    check = verify_ekeland(result, problem, cloud)
    payload = {"result": result.to_dict(), "verification": check}
    body = csv_text(["iteration", "x", "value"],
                    [(k, ";".join(repr(float(v)) for v in p), f)
                     for k, (p, f) in enumerate(zip(result.iterates, result.values))])
    summary = (f"x_eps={result.x_eps.tolist()} after {result.iterations} iterations; "
               f"verified={check['passed']}")
    _emit(args, problem, payload, body, cloud.spacing, summary, "ekeland")
    return EXIT_OK if check["passed"] else EXIT_NOT


def cmd_vi(args):
    problem = _load(args)
    report = vi_wellposedness_report(problem, args.schedule)
    summary = (f"{problem.name or args.problem}: {report.verdict}; unique={report.uniqueness}; "
               f"clusters={len(report.clusters)} ({cert.WINDOW_NOTE})")
    _emit(args, problem, report.to_dict(), report.to_csv(), report.spacing, summary, "vi")
    return _EXIT_OF[report.verdict]


def oracle_tables(problem, schedule, epsilon=None, pairs=500):
    """Agreement tables between the main code and the brute-force oracle."""
    n = problem.dimension
    if n > 3:
        raise CliError("oracle comparisons need dimension <= 3")
    rng = np.random.default_rng(problem.seed)
    M = problem.directions
    worst, mismatches = 0.0, 0
    for _ in range(pairs):
        y = rng.uniform(problem.sample_lo, problem.sample_hi)
        x = rng.uniform(problem.sample_lo, problem.sample_hi)
        a, b = minimal_time(M, y, x), oracle_minimal_time(M, y, x)
        if math.isinf(a) or math.isinf(b):
            mismatches += int(a != b)
        else:
            gap = abs(a - b)
            worst = max(worst, gap)
            mismatches += int(gap > 1e-6)
    rows = [("minimal_time", "pairs", pairs, pairs, mismatches == 0),
            ("minimal_time", "max_gap", worst, 0.0, worst <= 1e-6)]
    if n <= 2:
        sweep = cert.diameter_sweep(problem, "L", schedule)
        for e, d in zip(sweep.epsilons, sweep.diameters):
            od, h = oracle_level_diameter(problem, e)
            bound = 2 * (sweep.spacing + h)
            rows.append(("level_diameter", f"eps={e!r}", d, od, abs(d - od) <= bound))
    if n == 1:
        eps = schedule[0] if epsilon is None else epsilon
        cloud = sample_directional_region(problem)
        res = ekeland_point(problem, None, eps, cloud)
        ok_main = oracle_ekeland_predicate(problem, res.start, eps, res.x_eps)
        found = oracle_ekeland(problem, res.start, eps)
        rows.append(("ekeland", f"eps={eps!r}", float(res.x_eps[0]),
                     float(found[0]) if found is not None else math.nan,
                     bool(ok_main and found is not None)))
    return rows


def cmd_oracle(args):
    problem = _load(args)
    spacing = sample_directional_region(problem).spacing
    rows = oracle_tables(problem, args.schedule, args.epsilon)
    ok = all(r[-1] for r in rows)
    payload = {"rows": [dict(zip(("check", "quantity", "main", "oracle", "ok"), r))
                        for r in rows], "all_ok": ok}
    body = csv_text(["check", "quantity", "main", "oracle", "ok"], rows)
    summary = f"oracle agreement: {'all within bounds' if ok else 'MISMATCH'}"
    _emit(args, problem, payload, body, spacing, summary, "oracle")
    return EXIT_OK if ok else EXIT_NOT


_COMMANDS = {"analyze": cmd_analyze, "sweep": cmd_sweep, "ekeland": cmd_ekeland,
             "vi": cmd_vi, "oracle": cmd_oracle}


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code else EXIT_OK
    try:
        return _COMMANDS[args.command](args)
    except (DirwellError, CliError, OSError, ValueError) as exc:
        code = getattr(exc, "code", "E_CLI")
        print(f"error [{code}]: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())

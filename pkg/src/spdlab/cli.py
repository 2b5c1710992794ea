"""spdlab command line: verify suites, scan functionals to CSV, demo Hölder, generate and replay.

Exit codes: 0 passed, 1 violation found (a witness file is written),
2 usage or configuration error, 3 numerical failure dominated the run.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .errors import NUMERICAL_ERRORS, SpdLabError
from .geofn import parse_fn
from .lab.checks import _log_slack, holder_log_sides
from .lab.functionals import log_functional_congruence, log_functional_geodesic
from .lab.instances import (
    STRUCTURES,
    GeodesicInstance,
    commuting_family,
    instance_from_dict,
    make_rng,
    random_instance,
)
from .lab.suites import SUITES, replay, search_counterexamples
from .norms import NormSpec
from .results import _jsonable_float
from .spectral import HermitianMatrix, fractional_power

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("SPDLAB_SEED")
    if raw is None:
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"SPDLAB_SEED must be an integer, got {raw!r}") from None


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return _jsonable_float(obj)


def _dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, allow_nan=False) + "\n"


def _emit(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def _witness_path(args, stem: str) -> Path:
    if args.out:
        return Path(args.out).with_suffix(".witness.json")
    return Path(f"spdlab-witness-{stem}.json")


# -- verify ------------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.list:
        width = max(map(len, SUITES))
        for name, suite in SUITES.items():
            print(f"{name:<{width}}  {suite.statement}")
        return EXIT_OK
    if args.suite is None:
        raise UsageError("verify needs a suite name (see --list)")
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; known: {', '.join(SUITES)}")
    if args.trials < 1:
        raise UsageError("--trials must be >= 1")
    report = search_counterexamples(args.suite, args.trials, args.seed, args.tol, args.jobs, args.keep, args.cond)
    _emit(_dumps(report), args.out)
    if report["passed"]:
        return EXIT_OK
    if report.get("numerical_failure"):
        return EXIT_NUMERICAL
    path = _witness_path(args, args.suite)
    bad = [w for w in report["witnesses"] if not w["passed"]] if args.suite != "negative_controls" \
        else report["witnesses"]
    path.write_text(_dumps({"witnesses": bad}))
    print(f"violation: witness written to {path}", file=sys.stderr)
    return EXIT_VIOLATION


# -- instances ---------------------------------------------------------------

def _generate(args, kind=None):
    if args.m < 1 or args.n < 1:
        raise UsageError("--m and --n must be >= 1")
    if args.cond < 1:
        raise UsageError("--cond must be >= 1")
    return random_instance(
        kind or args.kind, args.m, args.n, args.seed, args.cond, args.structure,
        map=args.map, g=args.g or "pow:1", norm=args.norm or "tr",
    )


def _load_instance(path: str):
    with open(path) as fh:
        return instance_from_dict(json.load(fh))


def cmd_gen(args) -> int:
    inst = _generate(args)
    _emit(_dumps(inst.to_dict()), args.out)
    return EXIT_OK


# -- scan --------------------------------------------------------------------

def _scan_point(job):
    inst_dict, t = job
    inst = instance_from_dict(inst_dict)
    f = log_functional_geodesic if isinstance(inst, GeodesicInstance) else log_functional_congruence
    try:
        return float(f(inst, np.asarray(t))), None
    except NUMERICAL_ERRORS as exc:
        return None, type(exc).__name__


def _fmt(x: float) -> str:
    return "%.17g" % x


def cmd_scan(args) -> int:
    inst = _load_instance(args.instance) if args.instance else _generate(args)
    if args.steps < 2:
        raise UsageError("--steps must be >= 2")
    lo, hi = args.range
    if not (np.isfinite(lo) and np.isfinite(hi)) or lo >= hi:
        raise UsageError("--range needs finite LO < HI")
    if not 0 <= args.axis < inst.m:
        raise UsageError(f"--axis must be in [0, {inst.m - 1}]")
    base = np.zeros(inst.m)
    if args.fixed:
        vals = [float(v) for v in args.fixed.split(",")]
        if len(vals) != inst.m:
            raise UsageError(f"--fixed needs {inst.m} values")
        base[:] = vals
    ts = np.linspace(lo, hi, args.steps)
    jobs = []
    for tv in ts:
        t = base.copy()
        t[args.axis] = tv
        jobs.append((inst.to_dict(), t.tolist()))
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_scan_point, jobs, chunksize=max(1, len(jobs) // (4 * args.jobs))))
    else:
        rows = [_scan_point(j) for j in jobs]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "F", "logF", "status"])
    for tv, (lf, err) in zip(ts, rows):
        if err:
            w.writerow([_fmt(tv), "", "", err])
            continue
        with np.errstate(over="ignore"):
            w.writerow([_fmt(tv), _fmt(np.exp(lf)), _fmt(lf), "ok"])

    worst = _second_differences(ts, rows, args.tol if args.tol is not None else 1e-9)
    _emit(buf.getvalue(), args.out)
    errors = sum(1 for _, e in rows if e)
    if worst is not None:
        path = _witness_path(args, "scan")
        path.write_text(_dumps({"instance": inst.to_dict(), "axis": args.axis, "fixed": base.tolist(),
                                "t": worst[1], "second_difference": worst[0]}))
        print(f"violation: log F not midpoint convex near t={worst[1]:.6g}; witness in {path}", file=sys.stderr)
        return EXIT_VIOLATION
    if errors * 2 > len(rows):
        print(f"{errors} of {len(rows)} points failed numerically", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _second_differences(ts, rows, tol):
    """Worst violating ``logF[i-1] + logF[i+1] - 2 logF[i]`` over runs of good points."""
    worst = None
    for i in range(1, len(rows) - 1):
        trio = [rows[j][0] for j in (i - 1, i, i + 1)]
        if any(v is None for v in trio):
            continue
        d = trio[0] + trio[2] - 2 * trio[1]
        if d < -tol * max(1.0, *(abs(v) for v in trio)) and (worst is None or d < worst[0]):
            worst = (float(d), float(ts[i]))
    return worst


# -- holder ------------------------------------------------------------------

def cmd_holder(args) -> int:
    if not args.p > 1:
        raise UsageError(f"--p must be > 1, got {args.p}")
    if args.m < 1 or args.n < 1:
        raise UsageError("--m and --n must be >= 1")
    g = parse_fn(args.g or "sinh")
    norm = NormSpec.parse(args.norm or "tr")
    rng = make_rng(args.seed)
    fam = commuting_family(2 * args.m, args.n, rng, args.cond)
    As = fam[:args.m]
    if args.equality:
        # B_i proportional to A_i^(p-1): the equality case of scalar Hölder
        Bs = [fractional_power(A, args.p - 1) for A in As]
    else:
        Bs = fam[args.m:]
    As = [HermitianMatrix(A) for A in As]
    Bs = [HermitianMatrix(B) for B in Bs]
    lhs, rhs = holder_log_sides(As, Bs, args.p, g, norm)
    res = _log_slack("holder", lhs, rhs, args.tol if args.tol is not None else 1e-9)
    q = args.p / (args.p - 1)
    print(f"g = {g.spec()}, norm = {norm}, p = {_fmt(args.p)}, q = {_fmt(q)}, m = {args.m}, n = {args.n}")
    print(f"left  ||g(sum A_i B_i)||                        = {_fmt(np.exp(lhs))}")
    print(f"right ||g(sum A_i^p)||^(1/p) ||g(sum B_i^q)||^(1/q) = {_fmt(np.exp(rhs))}")
    print(f"log slack = {_fmt(res.slack)}")
    print("PASS" if res.passed else "VIOLATION")
    return EXIT_OK if res.passed else EXIT_VIOLATION


# -- replay ------------------------------------------------------------------

def cmd_replay(args) -> int:
    with open(args.witness) as fh:
        data = json.load(fh)
    witnesses = data["witnesses"] if "witnesses" in data else [data]
    if not witnesses:
        raise UsageError("no witnesses in file")
    results = [replay(w) for w in witnesses]
    _emit(_dumps([r.to_dict() for r in results]), args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------

def _add_common(p, seed):
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", default=None)


def _add_instance(p):
    p.add_argument("--kind", choices=("geodesic", "congruence"), default="geodesic")
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--cond", type=float, default=10.0)
    p.add_argument("--structure", choices=STRUCTURES, default="generic")
    p.add_argument("--map", default=None, help="map spec or variant name")
    p.add_argument("--g", default=None, help="geometrically convex function spec")
    p.add_argument("--norm", default=None, help="op, tr, fro, sp:p or kf:k")


def build_parser(seed: int) -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spdlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("suite", nargs="?")
    p.add_argument("--list", action="store_true", help="list suites and exit")
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--keep", type=int, default=5, help="number of worst trials reported")
    p.add_argument("--cond", type=float, default=10.0, help="max condition number of sampled matrices")
    _add_common(p, seed)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scan", help="tabulate F(t) along one axis as CSV")
    p.add_argument("--instance", default=None, help="instance JSON file (else generated)")
    p.add_argument("--axis", type=int, default=0)
    p.add_argument("--range", type=float, nargs=2, default=(-2.0, 2.0), metavar=("LO", "HI"))
    p.add_argument("--steps", type=int, default=101)
    p.add_argument("--fixed", default=None, help="base t vector, m comma-separated values (the scanned axis is overwritten)")
    _add_common(p, seed)
    _add_instance(p)
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("holder", help="Hölder inequality on a seeded commuting instance")
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--cond", type=float, default=10.0)
    p.add_argument("--g", default=None)
    p.add_argument("--norm", default=None)
    p.add_argument("--equality", action="store_true", help="take B_i = A_i^(p-1)")
    p.add_argument("--seed", type=int, default=seed)
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_holder)

    p = sub.add_parser("gen", help="write a seeded instance as JSON")
    _add_common(p, seed)
    _add_instance(p)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("replay", help="re-evaluate witnesses from a report or witness file")
    p.add_argument("witness")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_replay)
    return ap


def main(argv=None) -> int:
    try:
        seed = _default_seed()
    except UsageError as exc:
        print(f"spdlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    ap = build_parser(seed)
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "jobs", 1) < 1:
        print("spdlab: --jobs must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"spdlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NUMERICAL_ERRORS as exc:
        print(f"spdlab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (SpdLabError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"spdlab: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

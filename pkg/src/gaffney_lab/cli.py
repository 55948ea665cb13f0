"""Command-line entry point: ``gaffney-lab verify | quotient | curvature``.

Reports are JSON objects with sorted keys (CSV for sweeps) so that the
same configuration and seed give byte-identical output.  Exit codes: 0
when every check passes, 1 when a residual check fails, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from . import geometry as geo
from . import suite as S
from . import verify as v
from .errors import DomainError
from .quadrature import QuadratureOrder

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


@dataclass
class RunConfig:
    """Everything needed to reproduce a report."""

    command: str
    suite: str | None = None
    domain: dict = field(default_factory=dict)
    n: int | None = None
    k: int | None = None
    bc: str | None = None
    seed: int = 0
    trials: int | None = None
    order: list[int] | None = None
    tolerances: dict = field(default_factory=dict)
    example: str | None = None
    m: float | None = None
    sweep: str | None = None
    samples: int | None = None
    format: str = "json"


class UsageError(Exception):
    pass


def _order(text: str | None) -> QuadratureOrder | None:
    if text is None:
        return None
    try:
        parts = [int(p) for p in text.split(",")]
    except ValueError:
        raise UsageError(f"--order expects three integers 'radial,angular,box', got {text!r}") from None
    if len(parts) != 3 or min(parts) < 2:
        raise UsageError(f"--order expects three integers >= 2, got {text!r}")
    return QuadratureOrder(*parts)


def dumps(obj) -> str:
    return json.dumps(v._jsonable(obj), sort_keys=True, indent=2) + "\n"


def emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# verify

def cmd_verify(args) -> int:
    opts = S.SuiteOptions(n=args.n, k=args.k, seed=args.seed, domain=args.domain, r=args.r,
                          trials=args.trials, order=_order(args.order))
    try:
        checks = S.build_checks(args.suite, opts)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    records = S.run_checks(checks)
    failed = [r for r in records if not r["pass"]]
    cfg = RunConfig("verify", suite=args.suite, domain={"name": args.domain, "r": args.r}, n=args.n, k=args.k,
                    seed=args.seed, trials=args.trials, order=None if opts.order is None else list(asdict(opts.order).values()))
    report = {
        "config": asdict(cfg),
        "version": __version__,
        "records": records,
        "summary": {"checks": len(records), "passed": len(records) - len(failed), "failed": len(failed)},
    }
    emit(dumps(report), args.out)
    return EXIT_OK if not failed else EXIT_FAIL


# quotient

def parse_sweep(text: str) -> tuple[str, np.ndarray]:
    """``r=start:stop[:log|lin[:count]]`` → parameter name and values."""
    try:
        name, body = text.split("=", 1)
        parts = body.split(":")
        start, stop = float(parts[0]), float(parts[1])
        scale = parts[2] if len(parts) > 2 else "log"
        count = int(parts[3]) if len(parts) > 3 else 20
    except (ValueError, IndexError):
        raise UsageError(f"bad sweep {text!r}; expected r=start:stop[:log|lin[:count]]") from None
    if name != "r":
        raise UsageError(f"only r can be swept, got {name!r}")
    if scale not in ("log", "lin") or count < 2:
        raise UsageError(f"bad sweep scale/count in {text!r}")
    if scale == "log":
        if start <= 0 or stop <= 0:
            raise UsageError("log sweep needs positive endpoints")
        return name, np.geomspace(start, stop, count)
    return name, np.linspace(start, stop, count)


def cmd_quotient(args) -> int:
    order = _order(args.order)
    cfg = RunConfig("quotient", example=args.example, n=args.n, k=args.k, m=args.m, sweep=args.sweep,
                    domain={"r": args.r}, order=None if order is None else list(asdict(order).values()),
                    format="csv" if args.sweep else "json")
    if args.example == "sinbump":
        if args.sweep:
            raise UsageError("--sweep applies to the annulus example only")
        if args.m < 1:
            raise UsageError("--m must be >= 1")
        rep = v.maximizing_sequence_report(args.n, args.k, args.m, order)
        emit(dumps({"config": asdict(cfg), "report": rep.record(), "quotient": rep.quotient}), args.out)
        return EXIT_OK
    n, k = args.n, args.k
    if not 1 <= k < n:
        raise UsageError(f"annulus example needs 1 <= k < n, got k={k}, n={n}")
    if args.sweep:
        _, rs = parse_sweep(args.sweep)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "quotient", "asymptote"])
        try:
            for r in rs:
                w.writerow([repr(float(r)), repr(float(v.annulus_quotient_closed_form(n, k, r))),
                            repr(float(v.annulus_asymptote(n, k, r)))])
        except DomainError as exc:
            raise UsageError(str(exc)) from None
        emit(buf.getvalue(), args.out)
        return EXIT_OK
    try:
        exact = v.annulus_quotient_closed_form(n, k, args.r)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    rep = v.shell_quotient(n, k, args.r, order)
    check = v.IdentityResidual("annulus-blowup-closed-form", rep.quotient, exact, v.INTEGRAL_TOL,
                               details={"n": n, "k": k, "r": args.r})
    emit(dumps({"config": asdict(cfg), "closed_form": exact, "asymptote": v.annulus_asymptote(n, k, args.r),
                "report": rep.record(), "quotient": rep.quotient, "records": [check.record()]}), args.out)
    return EXIT_OK if check.passed else EXIT_FAIL


# curvature

def cmd_curvature(args) -> int:
    try:
        d = geo.make_domain(args.domain, args.n, k=args.k, r=args.r)
    except DomainError as exc:
        raise UsageError(str(exc)) from None
    rng = np.random.default_rng(args.seed)
    n = d.n
    points = []
    per = max(1, args.samples // len(d.faces))
    for face in d.faces:
        X = face.chart.sample(per, rng)
        _, _, _, gam = geo.face_frames(face, X)
        for x, g in zip(X, gam):
            points.append({"face": face.name, "x": x, "gamma": g})
    gam = np.array([p["gamma"] for p in points])
    table = []
    for k in range(1, n):
        sums = np.sort(gam, axis=1)[:, :k].sum(axis=1)
        i = int(np.argmin(sums))
        table.append({"k": k, "min_sum": float(sums[i]), "k_convex": bool(sums[i] >= -args.tol),
                      "witness": points[i]["x"], "witness_face": points[i]["face"]})
    cfg = RunConfig("curvature", domain={"name": args.domain, "r": args.r, "k": args.k}, n=n, seed=args.seed,
                    samples=args.samples, tolerances={"convexity": args.tol})
    emit(dumps({"config": asdict(cfg), "domain": d.label, "points": points, "convexity": table}), args.out)
    return EXIT_OK


# parser

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="gaffney-lab", description="Exterior calculus identities and Gaffney quotients.")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run identity suites and emit a JSON report")
    pv.add_argument("--suite", default="all", choices=S.SUITES + ("all",))
    pv.add_argument("--n", type=int, default=3)
    pv.add_argument("--k", type=int, default=None)
    pv.add_argument("--seed", type=int, default=0)
    pv.add_argument("--domain", choices=geo.CATALOG, default=None)
    pv.add_argument("--r", type=float, default=None, help="inner radius for annulus/shell domains")
    pv.add_argument("--trials", type=int, default=50, help="random fields per falsification run")
    pv.add_argument("--order", default=None, help="quadrature order 'radial,angular,box'")
    pv.add_argument("--out", default=None)
    pv.set_defaults(func=cmd_verify)

    pq = sub.add_parser("quotient", help="evaluate Gaffney quotients of the worked examples")
    pq.add_argument("--example", choices=("annulus", "sinbump"), default="annulus")
    pq.add_argument("--n", type=int, default=3)
    pq.add_argument("--k", type=int, default=1)
    pq.add_argument("--r", type=float, default=0.1)
    pq.add_argument("--m", type=float, default=40.0)
    pq.add_argument("--sweep", default=None, help="r=start:stop[:log|lin[:count]], emits CSV")
    pq.add_argument("--order", default=None)
    pq.add_argument("--out", default=None)
    pq.set_defaults(func=cmd_quotient)

    pc = sub.add_parser("curvature", help="principal curvatures and k-convexity of a catalog domain")
    pc.add_argument("--domain", choices=geo.CATALOG, required=True)
    pc.add_argument("--n", type=int, default=3)
    pc.add_argument("--k", type=int, default=None, help="shell parameter k")
    pc.add_argument("--r", type=float, default=None)
    pc.add_argument("--samples", type=int, default=200)
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--tol", type=float, default=1e-9)
    pc.add_argument("--out", default=None)
    pc.set_defaults(func=cmd_curvature)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, DomainError) as exc:
        print(f"gaffney-lab: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

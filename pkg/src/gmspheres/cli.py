"""Command-line front end: ``gm-spheres verify|trace|orbit-eq|normal-form|degree``.

Exit status is 0 when the report passes, 1 when a check fails or a numeric
error occurs and 2 on usage errors.
"""
from __future__ import annotations

import argparse
import sys
import time

import numpy as np

from .bundle import BundlePoint, normal_form, star_orbit_residual
from .config import ENV_TOL, TOL_EXTERNAL, env_tolerance
from .errors import GMError, PreconditionError
from .powermaps import degree_check, decompose
from .suites import (
    DESCRIPTIONS,
    REGISTRY,
    Check,
    Report,
    SuiteConfig,
    UsageError,
    emit_report,
    run_suite,
    sample_rngs,
    trace_geodesic,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _positive(kind):
    def parse(text):
        value = kind(text)
        if not value > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return value

    return parse


def _point(n, flat) -> BundlePoint:
    flat = np.asarray(flat, dtype=float)
    x = BundlePoint(n, flat[:8].reshape(2, 4), flat[8:].reshape(2, 4))
    try:
        x.validate(TOL_EXTERNAL)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from None
    return x


def _tol(args, default):
    if args.tol is not None:
        return args.tol
    env = env_tolerance()
    return env if env is not None else default


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gm-spheres", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    suites = "\n".join(f"  {name:20s}{DESCRIPTIONS[name]}" for name in REGISTRY)
    v = sub.add_parser(
        "verify",
        help="run a verification suite",
        description="Run one verification suite and print or write its JSON report.\n\nsuites:\n" + suites,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    v.add_argument("--suite", required=True, choices=sorted(REGISTRY), metavar="NAME")
    v.add_argument("--n", type=int, default=None, help="sphere index (d for the Milnor/Brieskorn suites)")
    v.add_argument("--nu", type=_positive(float), default=1.0)
    v.add_argument("--samples", type=_positive(int), default=100)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--tol", type=_positive(float), default=None, help=f"overrides per-check tolerances and ${ENV_TOL}")
    v.add_argument("--step", type=_positive(float), default=1e-3)
    v.add_argument("--out", default=None, help="JSON report path (default: stdout)")

    t = sub.add_parser("trace", help="export a lifted geodesic as CSV")
    t.add_argument("--n", type=int, default=1)
    t.add_argument("--p", nargs=3, type=float, required=True, help="imaginary part: i j k")
    t.add_argument("--w", nargs=4, type=float, required=True, help="quaternion: re i j k")
    t.add_argument("--t-max", type=float, default=2 * np.pi)
    t.add_argument("--step", type=_positive(float), default=1e-2)
    t.add_argument("--out", required=True)

    o = sub.add_parser("orbit-eq", help="decide whether two points of E_n share a star orbit")
    o.add_argument("--n", type=int, default=1)
    o.add_argument("--x", nargs=16, type=float, required=True, help="u1 u2 v1 v2, four quaternions")
    o.add_argument("--y", nargs=16, type=float, required=True)
    o.add_argument("--tol", type=_positive(float), default=None)
    o.add_argument("--out", default=None)

    f = sub.add_parser("normal-form", help="normal form (s, t) of a point of E_n")
    f.add_argument("--n", type=int, default=1)
    f.add_argument("--point", nargs=16, type=float, required=True, help="u1 u2 v1 v2, four quaternions")
    f.add_argument("--tol", type=_positive(float), default=None)
    f.add_argument("--out", default=None)

    d = sub.add_parser("degree", help="signed preimage count of the power map")
    d.add_argument("--n", type=int, required=True)
    d.add_argument("--y", nargs=8, type=float, default=None, help="regular value u1 u2; random values if omitted")
    d.add_argument("--samples", type=_positive(int), default=10)
    d.add_argument("--seed", type=int, default=0)
    d.add_argument("--step", type=_positive(float), default=1e-6, help="finite-difference step")
    d.add_argument("--out", default=None)
    return parser


def _report(name, params, checks, start) -> Report:
    return Report(name, params, checks, all(c.passed for c in checks), (time.perf_counter() - start) * 1000.0)


def _cmd_verify(args) -> Report:
    cfg = SuiteConfig(args.suite, args.n, args.nu, args.samples, args.seed, args.tol, args.step)
    return run_suite(cfg)


def _cmd_orbit_eq(args) -> Report:
    start = time.perf_counter()
    x, y = _point(args.n, args.x), _point(args.n, args.y)
    q, defect, res = star_orbit_residual(x, y)
    residual = float(res + defect)
    tol = _tol(args, 1e-9)
    check = Check("star-orbit", residual <= tol, residual, tol, {"q": q.tolist()})
    return _report("orbit-eq", {"n": args.n}, [check], start)


def _cmd_normal_form(args) -> Report:
    start = time.perf_counter()
    nf = normal_form(_point(args.n, args.point))
    tol = _tol(args, 1e-9)
    w = nf.witness
    witness = {
        "s": nf.s,
        "t": nf.t,
        "q1": w.q1.tolist(),
        "q2": w.q2.tolist(),
        "q3": w.q3.tolist(),
        "degenerate": sorted(k for k, flag in nf.degenerate.items() if flag),
    }
    check = Check("normal-form", nf.residual <= tol, nf.residual, tol, witness)
    return _report("normal-form", {"n": args.n}, [check], start)


def _cmd_degree(args) -> Report:
    start = time.perf_counter()
    if args.y is not None:
        y = np.asarray(args.y).reshape(1, 2, 4)
        if abs(np.linalg.norm(y) - 1.0) > TOL_EXTERNAL:
            raise UsageError("y must be a unit vector")
    else:
        ys = []
        for rng in sample_rngs(args.seed, args.samples):
            while True:
                c = rng.standard_normal((2, 4))
                c /= np.linalg.norm(c)
                if np.sin(float(decompose(c).t)) > 1e-3:
                    ys.append(c)
                    break
        y = np.array(ys)
    degrees = [degree_check(args.n, v, args.step) for v in y]
    wrong = sum(d != args.n for d in degrees)
    check = Check("signed-preimage-count", wrong == 0, float(wrong), 0.0, {"degrees": degrees})
    params = {"n": args.n, "samples": len(y), "seed": args.seed, "step": args.step}
    return _report("degree", params, [check], start)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "trace":
            p = np.concatenate([[0.0], args.p])
            rows = trace_geodesic(args.n, p, args.w, args.t_max, args.step, args.out)
            print(f"wrote {rows} rows to {args.out}")
            return EXIT_OK
        handler = {
            "verify": _cmd_verify,
            "orbit-eq": _cmd_orbit_eq,
            "normal-form": _cmd_normal_form,
            "degree": _cmd_degree,
        }[args.command]
        report = handler(args)
        text = emit_report(report, args.out)
        if args.out is None:
            sys.stdout.write(text)
        return EXIT_OK if report.passed else EXIT_FAIL
    except (UsageError, PreconditionError, OSError) as exc:
        print(f"gm-spheres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GMError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"gm-spheres: numeric error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        # e.g. a malformed GM_SPHERES_TOL or a negative seed
        print(f"gm-spheres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

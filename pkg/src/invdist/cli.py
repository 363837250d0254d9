"""Command-line front door.

Exit codes: 0 pass, 1 suite failure, 2 configuration error, 3 numeric error.
"""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import reporting
from .ball import has_exact_backend, kobayashi_exact, royden_exact
from .bounds import kobayashi_interval, royden_interval
from .domains import LocalModelS9, load_domain, parse_vector
from .errors import ConfigurationError, InvdistError
from .estimators import a_quantity, cc_proxy, g_balogh_bonk, h_quantities
from .geometry import boundary_frame
from .harness import SUITES, SuiteConfig, calibrate_theorem1, s9_levels, verify_suite
from .sampling import REGIMES, SampleRegime


def _emit(rows, summary, name, fmt, out=None):
    if out:
        reporting.write_report(out, name, rows, summary)
    if fmt == "json":
        sys.stdout.write(reporting.to_json(summary))
    else:
        sys.stdout.write(reporting.rows_to_csv(rows, name))


def _cmd_frame(args):
    dom = load_domain(args.config)
    z = parse_vector(args.point)
    f = boundary_frame(dom, z)
    rec = {"point": z, "delta": f.delta, "signed_delta": f.signed_delta,
           "projection": f.projection, "outer_normal": f.outer_normal,
           "levi_min": f.levi_min, "unique_projection": f.unique_projection}
    _emit([rec], rec, "frame", args.format)
    return 0


def _cmd_dist(args):
    dom = load_domain(args.config)
    z, w = parse_vector(args.z), parse_vector(args.w)
    if args.backend == "exact-ball":
        if not has_exact_backend(dom):
            raise ConfigurationError(f"exact-ball backend unavailable for {dom.family}")
        k = float(kobayashi_exact(dom, z, w))
        rec = {"z": z, "w": w, "backend": args.backend, "lower": k, "upper": k}
    else:
        iv = kobayashi_interval(dom, z, w, segments=args.segments)
        rec = {"z": z, "w": w, "backend": args.backend, "lower": iv.lower, "upper": iv.upper}
    _emit([rec], rec, "dist", args.format)
    return 0


def _cmd_royden(args):
    dom = load_domain(args.config)
    z, v = parse_vector(args.point), parse_vector(args.vector)
    iv = royden_interval(dom, z, v)
    rec = {"point": z, "vector": v, "lower": iv.lower, "upper": iv.upper}
    if has_exact_backend(dom):
        rec["exact"] = float(royden_exact(dom, z, v))
    _emit([rec], rec, "royden", args.format)
    return 0


def _cmd_estimate(args):
    dom = load_domain(args.config)
    z, w = parse_vector(args.z), parse_vector(args.w)
    q = args.quantity
    if q == "A":
        rec = {"A": a_quantity(dom, z, w)}
    elif q == "g":
        rec = {"g": g_balogh_bonk(dom, z, w)}
    elif q == "h":
        h, hr = h_quantities(dom, z, w)
        rec = {"h": h, "h_real": hr}
    else:
        rec = {"cc": cc_proxy(dom, z, w)}
    rec = {"z": z, "w": w, "quantity": q, **rec}
    _emit([rec], rec, "estimate", args.format)
    return 0


def _regimes(args):
    kinds = [k.strip() for k in args.regimes.split(",") if k.strip()]
    n = max(1, args.samples // max(1, len(kinds)))
    return [SampleRegime(k, (args.delta_min, args.delta_max), n, args.seed + i)
            for i, k in enumerate(kinds)]


def _cmd_calibrate(args):
    dom = load_domain(args.config)
    rep = calibrate_theorem1(dom, args.backend, _regimes(args))
    summary = rep.to_summary()
    _emit(rep.rows, summary, "calibration", args.format, args.out)
    ok = 0 < rep.c_emp <= rep.C_emp < np.inf
    return 0 if ok else 1


def _suite_config(args):
    return SuiteConfig(samples=args.samples, seed=args.seed, delta_min=args.delta_min,
                       delta_max=args.delta_max)


def _cmd_verify(args):
    dom = load_domain(args.config)
    rep = verify_suite(dom, args.suite, _suite_config(args))
    _emit(rep.rows, rep.to_summary(), f"verify_{args.suite}", args.format, args.out)
    return 0 if rep.passed else 1


def _cmd_example_s9(args):
    res = s9_levels(args.levels, args.delta_exponent)
    rows = res.pop("rows")
    summary = {"domain": LocalModelS9().describe(), **res}
    _emit(rows, summary, "example_s9", args.format, args.out)
    return 0 if res["halving"] else 1


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=300)
    common.add_argument("--delta-min", type=float, default=1e-4)
    common.add_argument("--delta-max", type=float, default=0.9)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    p = argparse.ArgumentParser(prog="invdist", description=__doc__,
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("frame", parents=[common], help="boundary frame at a point")
    s.add_argument("config")
    s.add_argument("--point", required=True)
    s.set_defaults(func=_cmd_frame)

    s = sub.add_parser("dist", parents=[common], help="Kobayashi distance or bracket")
    s.add_argument("config")
    s.add_argument("--z", required=True)
    s.add_argument("--w", required=True)
    s.add_argument("--backend", choices=("exact-ball", "interval"), default="interval")
    s.add_argument("--segments", type=int, default=32)
    s.set_defaults(func=_cmd_dist)

    s = sub.add_parser("royden", parents=[common], help="Kobayashi-Royden metric bracket")
    s.add_argument("config")
    s.add_argument("--point", required=True)
    s.add_argument("--vector", required=True)
    s.set_defaults(func=_cmd_royden)

    s = sub.add_parser("estimate", parents=[common], help="boundary-distance estimators")
    s.add_argument("config")
    s.add_argument("--quantity", choices=("A", "g", "h", "cc"), required=True)
    s.add_argument("--z", required=True)
    s.add_argument("--w", required=True)
    s.set_defaults(func=_cmd_estimate)

    s = sub.add_parser("calibrate", parents=[common], help="empirical sandwich constants")
    s.add_argument("config")
    s.add_argument("--regimes", default="Transversal,Tangential,Mixed",
                   help=f"comma list from {', '.join(REGIMES)}")
    s.add_argument("--backend", choices=("exact-ball", "interval", "bergman"), default="exact-ball")
    s.add_argument("--out")
    s.set_defaults(func=_cmd_calibrate)

    s = sub.add_parser("verify", parents=[common], help="run a verification suite")
    s.add_argument("config")
    s.add_argument("--suite", choices=SUITES, required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_verify)

    s = sub.add_parser("example-s9", parents=[common], help="the non-convex local model sequence")
    s.add_argument("--levels", type=int, default=4)
    s.add_argument("--delta-exponent", type=float, default=4.0)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_example_s9)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvdistError as exc:
        sys.stderr.write(f"invdist: {type(exc).__name__}: {exc}\n")
        return exc.exit_code
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"invdist: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())

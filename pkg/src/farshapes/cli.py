"""Command-line front end.

Subcommands: info, distance, farthest, maximize, check, plot, g4.
Shapes and coefficients are passed as JSON files; outputs are JSON (floats
serialized with 17 significant digits, keys sorted) or CSV plot data with
columns series,theta,x,y.

Exit codes: 0 ok, 2 malformed input JSON, 3 convexity violation,
4 coefficient sign violation.  The environment variable SHAPES_SEED
overrides --seed, so scripted runs stay reproducible.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import farthest as far
from . import quad_functional as qf
from . import support_core as sc
from . import weingarten as wg
from .shapes import (ConvexityError, InvalidMeasureError, InvalidShapeError, Segment,
                     shape_from_dict, shape_to_dict)

EXIT_BAD_JSON = 2
EXIT_NONCONVEX = 3
EXIT_BAD_COEFFS = 4


def _fmt(x):
    if isinstance(x, bool):
        return x
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        return float("%.17g" % float(x))
    if isinstance(x, dict):
        return {k: _fmt(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_fmt(v) for v in x]
    return x


def emit_json(payload, out=None):
    text = json.dumps(_fmt(payload), sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise SystemExit2("cannot read %s file %r: %s" % (what, path, exc))
    except json.JSONDecodeError as exc:
        raise SystemExit2("malformed %s JSON in %r: line %d column %d: %s"
                          % (what, path, exc.lineno, exc.colno, exc.msg))


class SystemExit2(Exception):
    pass


def load_shape(path, require_convex=True):
    data = _load_json(path, "shape")
    try:
        shape = shape_from_dict(data)
    except (InvalidShapeError, TypeError, ValueError) as exc:
        raise SystemExit2("invalid shape in %r: %s" % (path, exc))
    if require_convex:
        sc.check_convex(shape)
    return shape


def load_coeffs(path):
    data = _load_json(path, "coefficients")
    coeffs = qf.QuadCoeffs.from_dict(data)
    coeffs.validate()
    return coeffs


def _seed(args):
    env = os.environ.get("SHAPES_SEED")
    return int(env) if env else args.seed


def _write_plot_csv(path, series):
    with open(path, "w") as fh:
        fh.write("series,theta,x,y\n")
        for name, shape, n in series:
            thetas, pts = sc.boundary_points(shape, n)
            for t, (x, y) in zip(thetas, pts):
                fh.write("%s,%.17g,%.17g,%.17g\n" % (name, t, x, y))


def cmd_info(args):
    shape = load_shape(args.shape)
    mm = sc.min_max_h(shape)
    measure = wg.curvature_of(shape)
    per_res, st_res = sc.class_a_residuals(shape)
    margin, tol = sc.convexity_margin(shape)
    emit_json({
        "perimeter": sc.perimeter(shape),
        "steiner": list(sc.steiner(shape)),
        "min_h": mm.min, "max_h": mm.max,
        "argmin_h": mm.argmin, "argmax_h": mm.argmax,
        "curvature_support_size": len(measure.support_angles()),
        "class_a_perimeter_residual": per_res,
        "class_a_steiner_residual": st_res,
        "convexity_margin": margin, "convexity_tol": tol,
    }, args.out)
    return 0


def cmd_distance(args):
    h1 = load_shape(args.shape1)
    h2 = load_shape(args.shape2)
    out = {}
    if args.metric in ("hausdorff", "both"):
        out["hausdorff"] = sc.hausdorff_distance(h1, h2)
    if args.metric in ("l2", "both"):
        out["l2"] = sc.l2_distance(h1, h2)
    emit_json(out, args.out)
    return 0


def _auto_normalize(shape):
    per_res, st_res = sc.class_a_residuals(shape)
    if abs(per_res) > 1e-6 or st_res > 1e-6:
        sys.stderr.write("warning: input is not class-A normalized "
                         "(perimeter residual %.3e, steiner %.3e); normalizing\n"
                         % (per_res, st_res))
        return sc.normalize_to_class_A(shape)
    return shape


def cmd_farthest(args):
    shape = _auto_normalize(load_shape(args.shape))
    results = {}
    if args.metric in ("hausdorff", "both"):
        results["hausdorff"] = far.farthest_hausdorff(shape).to_dict()
    if args.metric in ("l2", "both"):
        results["l2"] = far.farthest_l2(shape).to_dict()
    emit_json(results, args.out)
    if args.plot:
        series = [("body", shape, 720)]
        if "l2" in results:
            series.append(("segment_l2", Segment(results["l2"]["alpha_star"]), 720))
        if "hausdorff" in results:
            series.append(("segment_hausdorff",
                           Segment(results["hausdorff"]["alpha_star"]), 720))
        _write_plot_csv(args.plot, series)
    return 0


def cmd_maximize(args):
    coeffs = load_coeffs(args.coeffs)
    seed = _seed(args)
    cone = qf.maximize_over_cone(coeffs, n=args.n, restarts=args.restarts, seed=seed)
    cont = qf.maximize_over_triangles(coeffs, restarts=args.restarts_continuous, seed=seed)
    gap = abs(cone.value - cont.value)
    payload = {"cone": cone.to_dict(), "continuous": cont.to_dict(),
               "value_gap": gap, "solver_disagreement": bool(gap > 1e-3)}
    if payload["solver_disagreement"]:
        sys.stderr.write("warning: solver values differ by %.3e\n" % gap)
    emit_json(payload, args.out)
    return 0


def cmd_check(args):
    shape = _auto_normalize(load_shape(args.shape))
    emit_json(far.sharp_inequality_report(shape), args.out)
    return 0


def cmd_plot(args):
    shape = load_shape(args.shape)
    _write_plot_csv(args.out, [("body", shape, args.n)])
    return 0


def cmd_g4(args):
    taus = np.linspace(0.0, np.pi, args.samples)
    vals = wg.g4(taus)
    with open(args.out, "w") as fh:
        fh.write("tau,g4\n")
        for t, v in zip(taus, vals):
            fh.write("%.17g,%.17g\n" % (t, v))
    # locate the minimum set by scan plus golden refinement
    minima = []
    for i in np.where(vals <= vals.min() + 1e-9)[0]:
        lo = taus[max(0, i - 1)]
        hi = taus[min(args.samples - 1, i + 1)]
        if hi > lo:
            x, _ = sc._golden_extremum(lambda t: float(wg.g4(t)), lo, hi, maximize=False)
        else:
            x = taus[i]
        if not any(abs(x - m) < 1e-4 for m in minima):
            minima.append(float(x))
    emit_json({"min_value": float(vals.min()), "minima": sorted(minima),
               "csv": args.out})
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="farshapes",
                                description="Support-function toolkit for planar "
                                            "convex bodies")
    sub = p.add_subparsers(dest="command", required=True)

    q = sub.add_parser("info", help="perimeter, Steiner point, extrema, curvature support")
    q.add_argument("shape")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_info)

    q = sub.add_parser("distance", help="distance between two shapes")
    q.add_argument("shape1")
    q.add_argument("shape2")
    q.add_argument("--metric", choices=["hausdorff", "l2", "both"], default="both")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_distance)

    q = sub.add_parser("farthest", help="farthest needle from a body")
    q.add_argument("shape")
    q.add_argument("--metric", choices=["hausdorff", "l2", "both"], default="both")
    q.add_argument("--out")
    q.add_argument("--plot", help="also write boundary CSV here")
    q.set_defaults(fn=cmd_farthest)

    q = sub.add_parser("maximize", help="maximize a quadratic functional over class A")
    q.add_argument("coeffs")
    q.add_argument("--n", type=int, default=256)
    q.add_argument("--restarts", type=int, default=10)
    q.add_argument("--restarts-continuous", type=int, default=50)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out")
    q.set_defaults(fn=cmd_maximize)

    q = sub.add_parser("check", help="sharp-inequality residual report")
    q.add_argument("shape")
    q.add_argument("--out")
    q.set_defaults(fn=cmd_check)

    q = sub.add_parser("plot", help="boundary points CSV")
    q.add_argument("shape")
    q.add_argument("--n", type=int, default=720)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_plot)

    q = sub.add_parser("g4", help="scan the four-term kernel window on [0, pi]")
    q.add_argument("--samples", type=int, default=10000)
    q.add_argument("--out", required=True)
    q.set_defaults(fn=cmd_g4)

    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SystemExit2 as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_BAD_JSON
    except ConvexityError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_NONCONVEX
    except qf.InvalidCoefficientsError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_BAD_COEFFS
    except (InvalidShapeError, InvalidMeasureError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_BAD_JSON


if __name__ == "__main__":
    sys.exit(main())

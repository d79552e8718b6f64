"""Command line entry point: ``tightspan <subcommand> --op ...``.

Every run writes one JSON report (or CSV for sweeps) containing the inputs,
seed, tolerances and verdicts. Exit status: 0 when all asserted properties
hold, 1 when a property fails, 2 for usage errors, 3 for I/O errors, 4 for
schema errors, 5 for precondition violations, 6 for non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import datetime as _dt
import io
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .errors import ConvergenceError, PreconditionError, SchemaError

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_SCHEMA = 4
EXIT_PRECONDITION = 5
EXIT_CONVERGENCE = 6


class UsageError(Exception):
    pass


def _floats(text: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.replace(" ", "").split(",") if t], dtype=float)
    except ValueError:
        raise UsageError(f"expected comma separated numbers, got {text!r}") from None


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path} is not valid JSON: {exc.msg}") from None


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


# ---------------------------------------------------------------------------
# subcommands; each returns (passed, result dict, tolerances dict, csv rows or None)


def _load_space(args):
    from .metric_core import FiniteMetricSpace, random_tree_metric
    if args.input:
        return FiniteMetricSpace.from_dict(_read_json(args.input))
    if getattr(args, "random_tree", None):
        return random_tree_metric(np.random.default_rng(args.seed), args.random_tree)
    raise UsageError("this operation needs --input with a metric space JSON file")


def cmd_span_finite(args):
    from . import tight_span_finite as tsf
    from .metric_core import TOL_METRIC, cycle_graph

    tol = {"tol_metric": TOL_METRIC}
    if args.op == "vertices":
        if args.k is None:
            raise UsageError("--op vertices needs --k")
        signs, values, dists = tsf.circular_vertex_family(args.k)
        X = cycle_graph(2 * args.k)
        minimal = [tsf.is_minimal(X, h) for h in values]
        res = {"k": args.k, "labels": list(X.labels), "signs": signs, "vertices": values,
               "minimal": minimal, "distinct": int(len(np.unique(values, axis=0))),
               "sup_distances": dists}
        return all(minimal), res, tol, None
    X = _load_space(args)
    if args.values is None:
        raise UsageError(f"--op {args.op} needs --values")
    f = _floats(args.values)
    res = {"labels": list(X.labels), "function": f}
    if args.op == "membership":
        ok = tsf.in_delta(X, f)
        res.update(in_delta=ok, worst_pair_slack=float(tsf.pair_slack(X, f).min()))
        return ok, res, tol, None
    if args.op == "minimal":
        ok = tsf.is_minimal(X, f)
        res.update(minimal=ok, residual=tsf.minimality_residual(X, f))
        return ok, res, tol, None
    if args.op == "project":
        g = tsf.project_to_span(X, f)
        ok = bool(np.all(g <= f + tsf.PROJECT_MINIMAL_TOL)) and tsf.is_minimal(X, g, tsf.PROJECT_MINIMAL_TOL)
        res.update(projection=g, residual=tsf.minimality_residual(X, g))
        tol.update(step_tol=tsf.PROJECT_STEP_TOL, minimal_tol=tsf.PROJECT_MINIMAL_TOL,
                   max_iter=tsf.PROJECT_MAX_ITER)
        return ok, res, tol, None
    raise UsageError(f"unknown op {args.op}")


def _circle_input(args, N):
    from . import circle_span as cs
    if args.input:
        obj = _read_json(args.input)
        if isinstance(obj, dict) and "intervals" in obj:
            return cs.IntervalSubset.from_dict(obj)
        F = cs.grid_function_from_dict(obj)
        return F
    theta = 0.0 if args.kuratowski is None else args.kuratowski
    return cs.kuratowski_grid(theta, N)


def _function_rows(F):
    return [("angle", "value")] + list(zip(F.angles.tolist(), F.values.tolist()))


def cmd_circle(args):
    from . import circle_span as cs
    N = args.grid
    obj = _circle_input(args, N)
    tg = cs.tol_grid(N)
    tol = {"tol_grid": tg}
    if args.op == "hA":
        if not isinstance(obj, cs.IntervalSubset):
            raise UsageError("--op hA needs an IntervalSubset JSON input")
        f = cs.h_A(obj, N)
        ok = cs.in_F(f, tol=0.0 + 1e-9)
        return ok, {"measure": obj.measure(), "in_F": ok, "function": f.to_dict()}, tol, _function_rows(f)
    if isinstance(obj, cs.IntervalSubset):
        obj = cs.h_A(obj, N)
    f = obj.restrict() if isinstance(obj, cs.CircleGridFunction) else obj
    F = obj if isinstance(obj, cs.CircleGridFunction) else None
    if args.op == "membership":
        ok = cs.in_F(f)
        res = {"in_F": ok}
        if ok:
            F = F or cs.extend_to_circle(f)
            res["in_E"] = cs.in_E(F)
            res.update(cs.e_residuals(F))
            ok = ok and res["in_E"]
        return ok, res, tol, None
    if args.op == "extreme":
        ok = cs.is_extreme(f)
        tol["tol_slope"] = cs.TOL_SLOPE
        return ok, {"extreme": ok, "max_slope_defect": float(np.abs(np.abs(cs.slopes(f)) - 1).max())}, tol, None
    if args.op == "decompose":
        dec = cs.decompose_extreme(f, args.m, seed=args.seed)
        return True, {"samples": args.m, "error": dec.error,
                      "approximation": dec.approximation.to_dict()}, tol, _function_rows(dec.approximation)
    F = F or cs.extend_to_circle(f)
    if args.r is None:
        raise UsageError(f"--op {args.op} needs --r")
    if args.op == "barycenter":
        m = cs.barycenter(F, args.r)
        arc = cs.sublevel_arc(F, args.r)
        return True, {"barycenter": m, "arc_start": arc[0], "arc_length": arc[1]}, tol, None
    if args.op == "homotopy":
        H = cs.homotopy_step(F, args.t, args.r)
        ok = cs.in_E(H) and H.values.min() < args.r + tg
        return ok, {"t": args.t, "in_E": cs.in_E(H), "min_value": float(H.values.min()),
                    "function": H.to_dict()}, tol, _function_rows(H)
    if args.op == "complement":
        v = cs.complement_lemma_check(F, args.r)
        tol["tol_band"] = tg
        return v is not False, {"verdict": "indeterminate" if v is None else bool(v),
                                "min_value": float(F.values.min()),
                                "dist_to_center": float(np.abs(F.values - math.pi / 2).max())}, tol, None
    raise UsageError(f"unknown op {args.op}")


def cmd_mountain(args):
    from . import sphere_mountain as sm
    if args.m < 1 or args.n < 1:
        raise UsageError("--m and --n must be positive")
    P = sm.build_P_mn(args.m, args.n, args.resolution)
    if args.op == "build":
        return True, {"m": args.m, "n": args.n, "points": P.points, "value": float(P.values[0]),
                      "size": len(P)}, {}, None
    if args.op == "extremal":
        sampled = args.n >= 2
        ok = sm.is_pointwise_extremal(P, sampled=sampled)
        return ok, {"m": args.m, "n": args.n, "size": len(P), "pointwise_extremal": ok,
                    "sampled_tolerances": sampled}, {"spacing": sm.sample_spacing(P)}, None
    if args.op == "admissible":
        grid = sm.default_grid(args.n, args.grid_size, args.seed)
        if args.n == 1:
            v = sm.admissible_check(P, grid)
        else:
            v = sm.revolved_admissibility_check(P, np.eye(args.n + 1)[0], grid, seed=args.seed)
        d = v.to_dict()
        d.pop("worst_point", None)
        return v.passed, {"m": args.m, "n": args.n, **d}, {"tol_sphere": v.tol}, None
    raise UsageError(f"unknown op {args.op}")


def _linf_set(args):
    from . import linf_span as ls
    d = args.dim + 1
    if args.shape == "sphere":
        return ls.sphere_sample(d, args.samples, args.seed)
    if args.shape == "ball":
        return ls.ball_sample(d, args.samples, args.seed)
    if args.shape == "box":
        return ls.box_sample(-np.ones(d), np.ones(d), args.samples, args.seed)
    if args.shape == "custom":
        if not args.input:
            raise UsageError("--shape custom needs --input with {\"points\": [[...], ...]}")
        obj = _read_json(args.input)
        if not isinstance(obj, dict) or not isinstance(obj.get("points"), list):
            raise SchemaError('expected an object with a "points" array')
        try:
            pts = np.array(obj["points"], dtype=float)
        except (TypeError, ValueError):
            raise SchemaError("points must be equal-length numeric arrays") from None
        if pts.ndim != 2:
            raise SchemaError("points must be equal-length numeric arrays")
        return ls.SampledLinfSet(pts, None, "custom")
    raise UsageError(f"unknown shape {args.shape}")


def cmd_linf(args):
    from . import linf_span as ls
    if args.op == "witness":
        if args.lam is None:
            raise UsageError("--op witness needs --lambda")
        w = ls.witness_point(args.dim, args.lam)
        res = w.to_dict()
        res["lambda_max"] = ls.witness_lambda_max(args.dim)
        return w.valid, res, {"tol": 1e-9}, None
    if args.op == "coincidence":
        rep = ls.s2_coincidence_sweep(args.count, args.seed)
        return rep.passed, rep.to_dict(), {"accept_tol": rep.accept_tol, "tol_cone": ls.TOL_CONE}, None
    X = _linf_set(args)
    tol = {"tol_cone": ls.TOL_CONE, "sample_tol": X.sample_tol(), "sample_spacing": X.spacing()}
    if args.op == "convexity":
        v = ls.convexity_sweep(X, args.count, args.seed)
        return v.passed, v.to_dict(), tol, None
    if args.point is None:
        raise UsageError(f"--op {args.op} needs --point")
    p = _floats(args.point)
    if len(p) != X.dim:
        raise PreconditionError(f"point has dimension {len(p)}, the set lives in dimension {X.dim}")
    if args.op == "surrounding":
        exact = X.shape is not None
        cones = []
        for i in range(X.dim):
            for s in (1, -1):
                cones.append({"axis": i, "sign": s,
                              "meets": bool(ls.cones_meet(p[None, :], i, s, X, exact)[0])})
        ok = all(c["meets"] for c in cones)
        return ok, {"point": p, "surrounding": ok, "exact": exact, "cones": cones}, tol, None
    if args.op == "minimal":
        r = ls.minimality_residual(p, X)
        ok = r <= X.sample_tol()
        return ok, {"point": p, "minimal": ok, "residual": r}, tol, None
    raise UsageError(f"unknown op {args.op}")


def cmd_vr(args):
    from . import vr_filtration as vr
    from .metric_core import four_point_delta
    if args.op == "label":
        if args.r is None:
            raise UsageError("--op label needs --r")
        return True, {"r": args.r, "label": vr.s1_homotopy_label(args.r)}, {"label_tol": vr.LABEL_TOL}, None
    X = _load_space(args)
    closed = args.strict == "closed"
    if args.op == "treecheck":
        delta = four_point_delta(X)
        ok = vr.is_tree_like(X)
        return ok, {"tree_like": ok, "delta": delta}, {"tol_metric": 1e-9}, None
    if args.op == "components":
        if args.scale is None:
            rows = vr.component_sweep(X, closed=closed)
            return True, {"strict": args.strict, "sweep": rows}, {}, \
                [("scale", "components")] + rows
        c = vr.component_count(vr.ScaleGraph(X, args.scale, closed))
        return True, {"scale": args.scale, "strict": args.strict, "components": c}, {}, \
            [("scale", "components"), (args.scale, c)]
    raise UsageError(f"unknown op {args.op}")


def thread_count() -> int:
    raw = os.environ.get("TIGHTSPAN_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"TIGHTSPAN_THREADS must be an integer, got {raw!r}") from None


def cmd_verify(args):
    from . import acceptance
    which = None
    if args.suite != "all":
        try:
            which = {int(t) for t in args.suite.split(",")}
        except ValueError:
            raise UsageError("--suite is 'all' or a comma separated list of criterion numbers") from None
        if not which <= {c.number for c in acceptance.CRITERIA}:
            raise UsageError("unknown criterion number in --suite")
    results = acceptance.run_all(args.seed, which, threads=thread_count())
    for r in results:
        print(r.line(), file=sys.stderr)
    ok = all(r.passed for r in results)
    rows = [("criterion", "passed")] + [(r.number, int(r.passed)) for r in results]
    return ok, {"criteria": [r.to_dict(timing=not args.no_timestamp) for r in results]}, {}, rows


COMMANDS = {
    "span-finite": cmd_span_finite,
    "circle": cmd_circle,
    "mountain": cmd_mountain,
    "linf": cmd_linf,
    "vr": cmd_vr,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", "-o", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--no-timestamp", action="store_true",
                        help="omit the timestamp and timings so reports are reproducible")

    p = argparse.ArgumentParser(prog="tightspan", description="Tight span computations and checks.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("span-finite", parents=[common], help="Delta(X) / E(X) for finite spaces")
    s.add_argument("--op", choices=("membership", "minimal", "project", "vertices"), required=True)
    s.add_argument("--input", help="metric space JSON {\"labels\": [...], \"dist\": [[...]]}")
    s.add_argument("--values", help="function values, comma separated, in label order")
    s.add_argument("--k", type=int, help="half the cycle length for --op vertices")

    s = sub.add_parser("circle", parents=[common], help="grid model of E(S^1)")
    s.add_argument("--op", choices=("membership", "hA", "extreme", "decompose", "barycenter",
                                    "homotopy", "complement"), required=True)
    s.add_argument("--grid", type=int, default=360, help="cells on [0, pi]")
    s.add_argument("--r", type=float)
    s.add_argument("--t", type=float, default=0.5)
    s.add_argument("--m", type=int, default=2000, help="samples for --op decompose")
    s.add_argument("--input", help="GridFunction or IntervalSubset JSON")
    s.add_argument("--kuratowski", type=float,
                   help="use d(theta, .) as the input function (default when no --input: theta = 0)")

    s = sub.add_parser("mountain", parents=[common], help="mountain ranges on spheres")
    s.add_argument("--op", choices=("admissible", "extremal", "build"), required=True)
    s.add_argument("--m", type=int, default=1)
    s.add_argument("--n", type=int, default=1)
    s.add_argument("--resolution", type=int, default=128)
    s.add_argument("--grid-size", type=int, default=2000)

    s = sub.add_parser("linf", parents=[common], help="sup-norm cone geometry")
    s.add_argument("--op", choices=("surrounding", "minimal", "witness", "coincidence", "convexity"),
                   required=True)
    s.add_argument("--dim", type=int, default=2, help="sphere dimension n (points live in R^{n+1})")
    s.add_argument("--shape", choices=("sphere", "ball", "box", "custom"), default="sphere")
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--samples", type=int, default=5000, help="size of the sample of X")
    s.add_argument("--count", type=int, default=200, help="points or trials in sweeps")
    s.add_argument("--point", help="comma separated coordinates")
    s.add_argument("--input", help="custom sample JSON {\"points\": [[...], ...]}")

    s = sub.add_parser("vr", parents=[common], help="Rips components and S^1 homotopy labels")
    s.add_argument("--op", choices=("components", "treecheck", "label"), required=True)
    s.add_argument("--input", help="metric space JSON")
    s.add_argument("--random-tree", type=int, help="use a random weighted tree on this many nodes")
    s.add_argument("--scale", type=float, help="Rips scale (omit for a sweep over all critical scales)")
    s.add_argument("--strict", choices=("open", "closed"), default="open")
    s.add_argument("--r", type=float, help="thickening radius for --op label")

    s = sub.add_parser("verify", parents=[common], help="run the acceptance suite")
    s.add_argument("--suite", default="all", help="'all' or comma separated criterion numbers")
    return p


def _render(args, passed, result, tolerances, rows) -> str:
    if args.format == "csv":
        if rows is None:
            raise UsageError(f"{args.command} --op {getattr(args, 'op', '')} has no CSV output")
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for k, row in enumerate(rows):
            if k == 0:
                w.writerow(row)
            else:
                w.writerow([f"{v:.12g}" if isinstance(v, float) else v for v in row])
        return buf.getvalue()
    report = {
        "command": args.command,
        "op": getattr(args, "op", None),
        "seed": args.seed,
        "tolerances": tolerances,
        "passed": bool(passed),
        "result": result,
        "version": __version__,
    }
    if not args.no_timestamp:
        report["timestamp"] = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return json.dumps(_plain(report), sort_keys=True, indent=2) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        passed, result, tolerances, rows = COMMANDS[args.command](args)
        text = _render(args, passed, result, tolerances, rows)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except PreconditionError as exc:
        print(f"precondition violated: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ConvergenceError as exc:
        print(f"did not converge: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK if passed else EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface.

Every subcommand takes a set-function config (``--config``, JSON with a
``kind`` key, see :func:`subnorm.setfn.from_config`) except ``study``, whose
``--config`` holds study parameters. Vectors and matrices are CSV files.
Indices in outputs are 1-based.

Exit codes: 0 success, 1 numerical or diagnostic failure, 2 bad arguments or
config. With ``--json`` a machine-readable result goes to standard output.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields
from pathlib import Path

import numpy as np

from . import analysis, experiments, lovasz, sfm, solvers
from .csvio import read_matrix, read_vector, to_json, write_json, write_matrix, write_rows, write_vector
from .linalg import LinAlgError, RngStream
from .prox import ProxError, prox
from .setfn import CapabilityError, ModularShift, SetFunctionError, load_config

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _positive(text):
    x = float(text)
    if not x > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return x


def _row(text):
    try:
        p, n, k = (int(v) for v in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"rows are given as p,n,k, got {text!r}") from exc
    return p, n, k


def _function(args):
    if not args.config:
        raise UsageError("--config is required")
    return load_config(args.config)


def _check_dim(F, v, name):
    if v.size != F.p:
        raise UsageError(f"{name} has {v.size} entries but the set function has p={F.p}")
    return v


def _emit(args, obj, text):
    print(to_json(obj) if args.json else text)


def _support(A):
    return sorted(int(k) + 1 for k in A)


# -- subcommands -------------------------------------------------------------


def cmd_norm(args):
    F = _function(args)
    ctx = lovasz.NormContext(F)
    if args.action == "extreme-points":
        pts = lovasz.extreme_points(ctx)
        if args.out_dir:
            write_matrix(Path(args.out_dir) / "extreme_points.csv", pts, [f"w{k + 1}" for k in range(F.p)])
        _emit(args, {"count": len(pts), "points": pts}, "\n".join(",".join(f"{x:.12g}" for x in v) for v in pts))
        return EXIT_OK
    if not args.vector:
        raise UsageError(f"norm {args.action} needs --vector")
    v = _check_dim(F, read_vector(args.vector), "--vector")
    if args.action == "eval":
        val = lovasz.omega(ctx, v)
    else:
        val = lovasz.dual_norm(ctx, v, method=args.method)
    _emit(args, {"value": val}, f"{val:.12g}")
    return EXIT_OK


def cmd_prox(args):
    F = _function(args)
    z = _check_dim(F, read_vector(args.z), "--z")
    res = prox(lovasz.NormContext(F), z, args.lam, tol=args.tol, method=args.method)
    if args.out_dir:
        write_vector(Path(args.out_dir) / "w.csv", res.w, ["w"])
        write_json(Path(args.out_dir) / "prox.json", res.to_dict())
    _emit(args, res.to_dict(), "\n".join(f"{x:.12g}" for x in res.w))
    return EXIT_OK


def cmd_sfm(args):
    F = _function(args)
    z = _check_dim(F, read_vector(args.z), "--z") if args.z else np.zeros(F.p)
    res = sfm.minimize(ModularShift(F, z, scale=args.lam), method=args.method, which=args.which, tol=args.tol)
    out = res.to_dict()
    _emit(args, out, f"argmin {out['argmin']}\nvalue {res.value:.12g}\ngap {res.gap:.3e}")
    return EXIT_OK


def _data(args):
    X = read_matrix(args.X)
    y = read_vector(args.y)
    return solvers.LeastSquaresProblem(X, y)


def cmd_solve(args):
    F = _function(args)
    prob = _data(args)
    _check_dim(F, np.zeros(prob.p), "X")
    ctx = lovasz.NormContext(F)
    opts = solvers.SolverOptions(max_iter=args.max_iter, rel_tol=args.tol)
    fn = {"fista": solvers.fista, "ista": solvers.ista, "subgradient": solvers.subgradient_descent}[args.method]
    tr = fn(prob, ctx, args.lam, opts)
    summary = {
        "method": tr.method,
        "lam": args.lam,
        "objective": tr.final_objective,
        "iterations": tr.iterations,
        "reason": tr.reason,
        "support": _support(np.flatnonzero(tr.w)),
    }
    if args.method != "subgradient" and (F.p <= 12 or lovasz.dual_norm_closed_form(ctx, tr.w) is not None):
        dual, comp = solvers.optimality_residuals(prob, ctx, tr.w, args.lam)
        summary["optimality"] = {"dual_feasibility": dual, "complementarity": comp}
    if args.out_dir:
        out = Path(args.out_dir)
        write_vector(out / "w.csv", tr.w, ["w"])
        write_rows(out / "trace.csv", tr.rows(), ["iteration", "time", "objective", "best"])
        write_json(out / "summary.json", summary)
    _emit(args, summary, f"objective {tr.final_objective:.12g} after {tr.iterations} iterations ({tr.reason})")
    return EXIT_OK


def cmd_path(args):
    F = _function(args)
    prob = _data(args)
    _check_dim(F, np.zeros(prob.p), "X")
    ctx = lovasz.NormContext(F)
    if args.lambdas:
        grid, lam_max = np.sort(read_vector(args.lambdas))[::-1], None
    else:
        lam_max = solvers.lambda_max(prob, ctx)
        grid = solvers.default_lambda_grid(lam_max, args.n_lambdas, args.ratio)
    path = solvers.regularization_path(prob, ctx, grid, solvers.SolverOptions(rel_tol=args.tol), lam_max=lam_max)
    rows = [(pt.lam, pt.objective, len(pt.support), pt.iterations, " ".join(map(str, _support(pt.support)))) for pt in path]
    summary = {"points": len(path), "lambdas": [pt.lam for pt in path], "sizes": [len(pt.support) for pt in path]}
    if args.out_dir:
        out = Path(args.out_dir)
        write_rows(out / "path.csv", rows, ["lam", "objective", "size", "iterations", "support"])
        write_matrix(out / "w.csv", np.array([pt.w for pt in path]), [f"w{k + 1}" for k in range(prob.p)])
        write_json(out / "summary.json", summary)
    _emit(args, summary, "\n".join(f"{r[0]:.6g}\t{r[2]}\t{r[4]}" for r in rows))
    return EXIT_OK


def cmd_analyze(args):
    F = _function(args)
    stream = RngStream(args.seed)
    if args.action in ("recovery", "consistency"):
        X = read_matrix(args.X)
        y = read_vector(args.y) if args.y else np.zeros(X.shape[0])
        prob = solvers.LeastSquaresProblem(X, y)
        w_star = _check_dim(F, read_vector(args.w_star), "--w-star")
        if args.lam is None:
            raise UsageError(f"analyze {args.action} needs --lam")
        if args.action == "recovery":
            report = analysis.support_recovery_condition(prob, F, w_star, args.sigma, args.lam).to_dict()
        else:
            report = analysis.consistency_bounds(prob, F, w_star, args.lam, args.samples, stream).to_dict()
    elif args.action == "concentration":
        Q = read_matrix(args.Q)
        clipped, raw = analysis.concentration_bound(F, Q, args.t)
        report = {"t": args.t, "bound": clipped, "raw_bound": raw}
        if args.draws:
            report["empirical"] = analysis.empirical_tail(F, Q, args.t, args.draws, stream)
    else:
        report = analysis.verify_stable_patterns(F, args.trials, args.n, stream, args.ratio).to_dict()
    if args.out_dir:
        write_json(Path(args.out_dir) / f"{args.action}.json", report)
    print(to_json(report))
    return EXIT_OK


STUDIES = {
    "optimizers": (experiments.BenchmarkConfig, experiments.run_optimizer_benchmark),
    "tradeoff": (experiments.TradeoffConfig, experiments.run_tradeoff_study),
    "table1": (experiments.PriorComparisonConfig, experiments.run_prior_comparison),
    "path-shape": (experiments.PathShapeConfig, experiments.run_path_shape_study),
}


def _study_config(args):
    cls, _ = STUDIES[args.study]
    values = {}
    if args.config:
        with open(args.config) as fh:
            values = json.load(fh)
        if not isinstance(values, dict):
            raise UsageError("study config must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown study config keys: {', '.join(sorted(unknown))}")
    if args.reps is not None:
        values["reps"] = args.reps
    if args.seed is not None:
        values["seed"] = args.seed
    if args.rows:
        if args.study != "table1":
            raise UsageError("--rows applies to table1 only")
        values["rows"] = args.rows
    if "rows" in values:
        values["rows"] = tuple(tuple(int(v) for v in r) for r in values["rows"])
    return cls(**values)


def cmd_study(args):
    cfg = _study_config(args)
    res = STUDIES[args.study][1](cfg)
    if args.out_dir:
        res.write(args.out_dir)
    summary = res.to_dict()
    if args.study == "table1":
        text = "\n".join(
            f"{r['p']} {r['n']} {r['k']}: submodular {r['submodular']:.1f}, "
            f"l2 {r['l2_vs_submodular']:+.1f}, l1 {r['l1_vs_submodular']:+.1f}, greedy {r['greedy_vs_submodular']:+.1f}"
            for r in res.results
        )
    else:
        text = to_json({k: v for k, v in res.summary.items() if k != "envelopes"})
    _emit(args, summary, text)
    return EXIT_OK


# -- parser -----------------------------------------------------------------


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="set-function config (JSON); study parameters for `study`")
    common.add_argument("--out-dir", help="directory for output files")
    common.add_argument("--json", action="store_true", help="print JSON to standard output")
    common.add_argument("--tol", type=_positive, default=1e-9, help="numerical tolerance")

    ap = argparse.ArgumentParser(prog="subnorm", description="Submodular sparsity-inducing norms")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("norm", parents=[common], help="evaluate a norm, its dual or its extreme points")
    p.add_argument("action", choices=["eval", "dual", "extreme-points"])
    p.add_argument("--vector", help="CSV vector")
    p.add_argument("--method", default="auto", choices=["auto", "brute", "tight", "dinkelbach", "closed"])
    p.set_defaults(func=cmd_norm)

    p = sub.add_parser("prox", parents=[common], help="proximal operator of lam * Omega")
    p.add_argument("--z", required=True, help="CSV vector")
    p.add_argument("--lam", type=float, required=True)
    p.add_argument("--method", default="auto", choices=["auto", "mnp", "split"])
    p.set_defaults(func=cmd_prox)

    p = sub.add_parser("sfm", parents=[common], help="minimise lam * F(A) - z(A)")
    p.add_argument("action", choices=["minimize"])
    p.add_argument("--z", help="CSV vector (default zero)")
    p.add_argument("--lam", type=_positive, default=1.0)
    p.add_argument("--method", default="auto", choices=["auto", "brute", "mnp"])
    p.add_argument("--which", default="minimal", choices=["minimal", "maximal"])
    p.set_defaults(func=cmd_sfm, tol=sfm.DEFAULT_TOL)

    for name, func, help_ in (
        ("solve", cmd_solve, "regularized least squares at one lam"),
        ("path", cmd_path, "warm-started regularization path"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--X", required=True, help="CSV design matrix")
        p.add_argument("--y", required=True, help="CSV response")
        if name == "solve":
            p.add_argument("--lam", type=_positive, required=True)
            p.add_argument("--method", default="fista", choices=["fista", "ista", "subgradient"])
            p.add_argument("--max-iter", type=int, default=10000)
        else:
            p.add_argument("--lambdas", help="CSV grid (default: log grid from lam_max)")
            p.add_argument("--n-lambdas", type=int, default=50)
            p.add_argument("--ratio", type=_positive, default=1e-3)
        p.set_defaults(func=func, tol=1e-10)

    p = sub.add_parser("analyze", parents=[common], help="recovery theory diagnostics")
    p.add_argument("action", choices=["recovery", "consistency", "concentration", "patterns"])
    p.add_argument("--X", help="CSV design matrix")
    p.add_argument("--y", help="CSV response (optional)")
    p.add_argument("--w-star", help="CSV true weights")
    p.add_argument("--sigma", type=_positive, default=1.0)
    p.add_argument("--lam", type=_positive)
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--Q", help="CSV covariance for concentration")
    p.add_argument("--t", type=_positive, default=1.0)
    p.add_argument("--draws", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=12)
    p.add_argument("--ratio", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("study", parents=[common], help="run a synthetic study")
    p.add_argument("study", choices=sorted(STUDIES))
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--rows", type=_row, action="append", help="table1 row p,n,k (repeatable)")
    p.set_defaults(func=cmd_study)
    return ap


def _needs(args):
    for name in ("X", "y", "z", "w_star", "Q", "vector", "lambdas"):
        path = getattr(args, name, None)
        if path and not Path(path).exists():
            raise UsageError(f"file not found: {path}")
    if args.command == "analyze":
        if args.action in ("recovery", "consistency") and not (args.X and args.w_star):
            raise UsageError(f"analyze {args.action} needs --X and --w-star")
        if args.action == "concentration" and not args.Q:
            raise UsageError("analyze concentration needs --Q")


def main(argv=None):
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    if getattr(args, "lam", None) is not None and not args.lam > 0:
        print("error: --lam must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        _needs(args)
        return args.func(args)
    except (ProxError, sfm.MnpNotConverged, sfm.SFMError, LinAlgError, CapabilityError, FloatingPointError, AssertionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(to_json({"error": str(exc), "kind": type(exc).__name__}))
        return EXIT_NUMERIC
    except (UsageError, SetFunctionError, ValueError, KeyError, TypeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        if args.json:
            print(to_json({"error": str(exc), "kind": type(exc).__name__}))
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

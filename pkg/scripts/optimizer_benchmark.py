"""Subgradient descent, ISTA and FISTA on the square-root cardinality norm.

Example::

    python3 scripts/optimizer_benchmark.py --reps 10 --budget 5 --out-dir results/optimizers
"""
import argparse
import time

from subnorm.experiments import BenchmarkConfig, run_optimizer_benchmark


def main():
    d = BenchmarkConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=d.p)
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--k", type=int, default=d.k)
    ap.add_argument("--reps", type=int, default=d.reps)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--budget", type=float, default=d.budget, help="seconds per method and replication")
    ap.add_argument("--gap", type=float, default=d.gap)
    ap.add_argument("--out-dir", default="results/optimizers")
    args = ap.parse_args()
    cfg = BenchmarkConfig(
        p=args.p, n=args.n, k=args.k, reps=args.reps, seed=args.seed, budget=args.budget, gap=args.gap
    )
    t0 = time.perf_counter()
    res = run_optimizer_benchmark(cfg)
    res.write(args.out_dir)
    print(f"{'rep':>3} {'subgradient':>12} {'ista':>8} {'fista':>8}   (iterations to relative gap {cfg.gap:g})")
    for rep in range(cfg.reps):
        hit = {r["method"]: r["iterations_to_gap"] for r in res.results if r["rep"] == rep}
        cells = ["-" if hit[m] is None else str(hit[m]) for m in ("subgradient", "ista", "fista")]
        print(f"{rep:>3} {cells[0]:>12} {cells[1]:>8} {cells[2]:>8}")
    s = res.summary
    print(f"fista < ista < subgradient in {s['ordered_runs']} of {s['runs']} runs")
    print(f"elapsed {time.perf_counter() - t0:.0f} s; results in {args.out_dir}")


if __name__ == "__main__":
    main()

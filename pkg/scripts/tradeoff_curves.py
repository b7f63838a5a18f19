"""Residual against penalty for the convex path, greedy selection and thresholded OLS.

Example::

    python3 scripts/tradeoff_curves.py --n 20 --reps 10 --out-dir results/tradeoff_n20
"""
import argparse
import time

import numpy as np

from subnorm.experiments import TradeoffConfig, run_tradeoff_study


def main():
    d = TradeoffConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=d.p)
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--k", type=int, default=d.k)
    ap.add_argument("--reps", type=int, default=d.reps)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--rel-tol", type=float, default=d.rel_tol)
    ap.add_argument("--out-dir", default="results/tradeoff")
    args = ap.parse_args()
    cfg = TradeoffConfig(p=args.p, n=args.n, k=args.k, reps=args.reps, seed=args.seed, rel_tol=args.rel_tol)
    t0 = time.perf_counter()
    res = run_tradeoff_study(cfg)
    res.write(args.out_dir)
    frac = np.asarray(res.summary["fraction_below"])
    for r in res.results:
        print(
            f"rep {r['rep']}: convex envelope at or below greedy on {100 * r['fraction_below']:.0f}% of levels, "
            f"median relative difference {r['median_relative_difference']:.3f}"
        )
    print(f"seeds with at least 70% of levels: {int(np.sum(frac >= 0.7))} of {cfg.reps}")
    print(f"pooled median relative difference {res.summary['median_relative_difference']:.3f}")
    print(f"elapsed {time.perf_counter() - t0:.0f} s; results in {args.out_dir}")


if __name__ == "__main__":
    main()

"""Prediction errors of the spectral norm against l1, ridge and greedy.

Example::

    python3 scripts/table1.py --rows 120,20,4 --rows 120,120,80 --reps 10 --out-dir results/table1
"""
import argparse
import time

from subnorm.experiments import TABLE1_ROWS, PriorComparisonConfig, run_prior_comparison


def _row(text):
    p, n, k = (int(v) for v in text.split(","))
    return p, n, k


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--rows", type=_row, action="append", help="p,n,k (repeatable); default: all twelve rows")
    ap.add_argument("--reps", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--rel-tol", type=float, default=PriorComparisonConfig.rel_tol)
    ap.add_argument("--out-dir", default="results/table1")
    args = ap.parse_args()
    cfg = PriorComparisonConfig(
        rows=tuple(args.rows or TABLE1_ROWS), reps=args.reps, seed=args.seed, rel_tol=args.rel_tol
    )
    t0 = time.perf_counter()
    res = run_prior_comparison(cfg)
    res.write(args.out_dir)
    print(f"{'p':>4} {'n':>4} {'k':>3} {'submod':>12} {'l2-sub':>12} {'l1-sub':>12} {'greedy-sub':>12}")
    for r in res.results:
        cells = [f"{r['submodular']:6.1f} ± {r['submodular_stderr']:3.1f}"]
        for m in ("l2", "l1", "greedy"):
            star = "*" if r[f"{m}_significant"] else " "
            cells.append(f"{r[f'{m}_vs_submodular']:5.1f} ± {r[f'{m}_vs_submodular_stderr']:3.1f}{star}")
        print(f"{r['p']:>4} {r['n']:>4} {r['k']:>3} " + " ".join(f"{c:>12}" for c in cells))
    print(f"elapsed {time.perf_counter() - t0:.0f} s; results in {args.out_dir}")


if __name__ == "__main__":
    main()

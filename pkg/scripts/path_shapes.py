"""Support sizes along the path for the range norm and the range norm plus l1.

Example::

    python3 scripts/path_shapes.py --reps 10 --out-dir results/path_shapes
"""
import argparse
import time

from subnorm.experiments import PathShapeConfig, run_path_shape_study


def main():
    d = PathShapeConfig()
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=d.p)
    ap.add_argument("--n", type=int, default=d.n)
    ap.add_argument("--k", type=int, default=d.k)
    ap.add_argument("--weight", type=float, default=d.cardinality_weight, help="coefficient of |A| in the mixed function")
    ap.add_argument("--reps", type=int, default=d.reps)
    ap.add_argument("--seed", type=int, default=d.seed)
    ap.add_argument("--out-dir", default="results/path_shapes")
    args = ap.parse_args()
    cfg = PathShapeConfig(
        p=args.p, n=args.n, k=args.k, cardinality_weight=args.weight, reps=args.reps, seed=args.seed
    )
    t0 = time.perf_counter()
    res = run_path_shape_study(cfg)
    res.write(args.out_dir)
    for rep in range(cfg.reps):
        sizes = {
            f: [c["size"] for c in res.curves if c["rep"] == rep and c["function"] == f] for f in ("range", "mixed")
        }
        for f, s in sizes.items():
            # first few distinct sizes show how the support grows
            steps = [v for i, v in enumerate(s) if i == 0 or v != s[i - 1]][:8]
            print(f"rep {rep} {f:>5}: " + " -> ".join(map(str, steps)))
    s = res.summary
    print(f"range all at once in {s['range_all_at_once']} of {s['runs']}; mixed gradual in {s['mixed_gradual']} of {s['runs']}")
    print(f"elapsed {time.perf_counter() - t0:.0f} s; results in {args.out_dir}")


if __name__ == "__main__":
    main()

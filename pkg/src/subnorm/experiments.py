"""Synthetic studies for structured sparse regression.

The data recipe: a Gaussian design with unit-norm columns, a random support
``J`` of size ``k`` carrying standard normal weights, and Gaussian noise
scaled to unit signal-to-noise ratio, ``y = X w* + n^{-1/2} ||X w*|| eps``.

Three studies build on it:

- :func:`run_optimizer_benchmark` races subgradient descent, ISTA and FISTA
  on ``F(A) = |A|^{1/2}``;
- :func:`run_tradeoff_study` traces residual against ``F(Supp)`` for the
  convex path, greedy forward selection and thresholded least squares;
- :func:`run_path_shape_study` contrasts the entry pattern of the range
  norm with that of the range norm plus a multiple of ``|A|``;
- :func:`run_prior_comparison` tabulates prediction errors of the spectral
  norm ``F(A) = tr (X_A^T X_A)^{1/2}`` against l1, ridge and greedy, each at
  its best regularization level.

Replications run on independent seeds derived from ``(seed, key...)``. They
run in a thread pool when the ``SUBNORM_THREADS`` environment variable is
above 1, and results are always sorted by replication before reduction.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
import scipy.stats

from .csvio import write_json, write_rows
from .linalg import LinAlgError, RngStream, gaussian, lstsq, normalize_columns
from .lovasz import NormContext
from .setfn import Cardinality, ConcaveCardinality, RangePlusConstant, Spectral, SumFunction
from .solvers import (
    LeastSquaresProblem,
    SolverOptions,
    default_lambda_grid,
    fista,
    ista,
    lambda_max,
    regularization_path,
    subgradient_descent,
)

__all__ = [
    "SyntheticProblem",
    "CurvePoint",
    "StudyResult",
    "BenchmarkConfig",
    "TradeoffConfig",
    "PathShapeConfig",
    "PriorComparisonConfig",
    "TABLE1_ROWS",
    "generate",
    "prediction_error",
    "refit",
    "greedy_forward_selection",
    "ols_threshold_path",
    "convex_path_curve",
    "lower_envelope",
    "run_optimizer_benchmark",
    "run_tradeoff_study",
    "run_path_shape_study",
    "run_prior_comparison",
]

THREADS_ENV = "SUBNORM_THREADS"
RIDGE_JITTER = 1e-10
TABLE1_ROWS = tuple((120, n, k) for n in (120, 20) for k in (80, 40, 20, 10, 6, 4))


@dataclass
class SyntheticProblem:
    p: int
    n: int
    k: int
    seed: int
    X: np.ndarray
    w_star: np.ndarray
    support: tuple
    y: np.ndarray
    # noise standard deviation n^{-1/2} ||X w*||
    noise_scale: float

    @property
    def signal(self):
        return self.X @ self.w_star

    def least_squares(self):
        return LeastSquaresProblem(self.X, self.y)


def generate(p, n, k, seed=0):
    """Draw one problem; the same ``(p, n, k, seed)`` gives identical arrays."""
    p, n, k = int(p), int(n), int(k)
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive")
    if not 0 <= k <= p:
        raise ValueError(f"need 0 <= k <= p, got k={k}, p={p}")
    stream = RngStream(int(seed))
    X = normalize_columns(gaussian(stream, (n, p)))
    J = np.sort(stream.permutation(p)[:k])
    w = np.zeros(p)
    w[J] = stream.normal(k)
    signal = X @ w
    sigma = float(np.linalg.norm(signal)) / np.sqrt(n)
    y = signal + sigma * stream.normal(n)
    return SyntheticProblem(p, n, k, int(seed), X, w, tuple(J.tolist()), y, sigma)


def prediction_error(problem, w):
    """``100 ||X (w - w*)||^2 / ||X w*||^2``, the error relative to the signal energy."""
    d = problem.X @ (np.asarray(w, dtype=float) - problem.w_star)
    energy = float(problem.signal @ problem.signal)
    if energy <= 0:
        raise ValueError("prediction error is undefined for a zero signal")
    return 100.0 * float(d @ d) / energy


def refit(X, y, support, jitter=RIDGE_JITTER):
    """Least squares on the columns in ``support``, zero elsewhere.

    A ridge term ``jitter * I`` keeps rank-deficient supports solvable.
    """
    X = np.asarray(X, dtype=float)
    A = np.asarray(sorted(support), dtype=np.int64)
    w = np.zeros(X.shape[1])
    if A.size:
        XA = X[:, A]
        w[A] = np.linalg.solve(XA.T @ XA + jitter * np.eye(A.size), XA.T @ y)
    return w


def _residual(X, y, w):
    r = y - X @ w
    return float(r @ r) / len(y)


@dataclass
class CurvePoint:
    support: tuple
    residual: float
    penalty: float

    @property
    def size(self):
        return len(self.support)


def _point(problem, F, support, jitter=RIDGE_JITTER):
    A = tuple(sorted(int(i) for i in support))
    w = refit(problem.X, problem.y, A, jitter)
    pen = float(F(list(A))) if A else 0.0
    return CurvePoint(A, _residual(problem.X, problem.y, w), pen)


def greedy_forward_selection(problem, F, max_size=None, jitter=RIDGE_JITTER):
    """Forward selection by largest decrease of the refitted residual.

    Candidates are scored against the orthogonal complement of the current
    span, which equals refitting least squares for every candidate. Returns
    one :class:`CurvePoint` per size, starting from the empty set.
    """
    X, y = problem.X, problem.y
    n, p = X.shape
    max_size = min(n, p) if max_size is None else min(int(max_size), p)
    basis = np.zeros((n, 0))
    r = y.astype(float).copy()
    chosen = []
    points = [CurvePoint((), float(r @ r) / n, 0.0)]
    for _ in range(max_size):
        P = X - basis @ (basis.T @ X)
        P -= basis @ (basis.T @ P)
        norms = np.einsum("ij,ij->j", P, P)
        gain = (P.T @ r) ** 2 / (norms + jitter)
        gain[chosen] = -np.inf
        j = int(np.argmax(gain))
        chosen.append(j)
        if norms[j] > jitter:
            q = P[:, j] / np.sqrt(norms[j])
            r -= q * (q @ r)
            basis = np.column_stack([basis, q])
        A = tuple(sorted(chosen))
        points.append(CurvePoint(A, float(r @ r) / n, float(F(list(A)))))
    return points


def ols_threshold_path(problem, F, jitter=RIDGE_JITTER):
    """Supports ``{|w_ols| >= c}`` for every distinct magnitude ``c``, each refitted.

    With ``n < p`` (or a rank-deficient design) the minimum-norm least
    squares solution stands in for OLS.
    """
    X, y = problem.X, problem.y
    try:
        w = lstsq(X, y)
    except LinAlgError:
        w = np.linalg.lstsq(X, y, rcond=None)[0]
    a = np.abs(w)
    points = [_point(problem, F, (), jitter)]
    for c in np.unique(a)[::-1]:
        points.append(_point(problem, F, np.flatnonzero(a >= c), jitter))
    return points


def convex_path_curve(problem, F, lambdas=None, opts=None, stop_size=None, jitter=RIDGE_JITTER, lam_max=None):
    """Refitted residual and penalty for each distinct support along the path.

    ``stop_size`` ends the path once a support reaches that size.
    """
    ls = problem.least_squares()
    stop = None if stop_size is None else (lambda pt: len(pt.support) >= stop_size)
    path = regularization_path(ls, NormContext(F), lambdas, opts, stop=stop, lam_max=lam_max)
    seen, points = set(), [_point(problem, F, (), jitter)]
    seen.add(frozenset())
    for pt in path:
        if pt.support not in seen:
            seen.add(pt.support)
            points.append(_point(problem, F, pt.support, jitter))
    return points


def lower_envelope(points, levels):
    """Smallest residual among points with penalty ``<= c``, for each level ``c``."""
    pen = np.array([q.penalty for q in points])
    res = np.array([q.residual for q in points])
    out = np.full(len(levels), np.inf)
    for i, c in enumerate(levels):
        ok = pen <= c * (1.0 + 1e-12)
        if ok.any():
            out[i] = res[ok].min()
    return out


@dataclass
class StudyResult:
    """Tidy per-method rows, plot-ready curves and a summary with the config echoed."""

    study: str
    config: dict
    replications: int
    results: list = field(default_factory=list)
    curves: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "study": self.study,
            "config": self.config,
            "replications": self.replications,
            "summary": self.summary,
        }

    def write(self, out_dir):
        out = Path(out_dir)
        for name, rows in (("results.csv", self.results), ("curves.csv", self.curves)):
            header = list(rows[0].keys()) if rows else []
            write_rows(out / name, [[_cell(r[h]) for h in header] for r in rows], header)
        write_json(out / "summary.json", self.to_dict())
        return out


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, (tuple, list, frozenset, set)):
        return " ".join(str(int(i) + 1) for i in sorted(x))
    return x


def _threads():
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def _map(fn, items):
    items = list(items)
    threads = _threads()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _seed(base, *key):
    return int(np.random.SeedSequence([int(base), *[int(k) for k in key]]).generate_state(1)[0])


def _stats(x):
    x = np.asarray(x, dtype=float)
    se = float(x.std(ddof=1) / np.sqrt(x.size)) if x.size > 1 else float("nan")
    return float(x.mean()), se


# -- optimizer benchmark --------------------------------------------------


@dataclass
class BenchmarkConfig:
    p: int = 200
    n: int = 200
    k: int = 20
    seed: int = 0
    reps: int = 10
    # lam overrides lam_ratio * lam_max when given
    lam: float | None = None
    lam_ratio: float = 0.1
    # wall-clock seconds per method and replication
    budget: float = 5.0
    max_iter: int = 1_000_000
    # relative objective gap counted as "reached"
    gap: float = 1e-4
    # runs stop once this relative gap is reached
    stop_gap: float = 1e-7
    reference_iter: int = 100_000


def _benchmark_rep(cfg, rep):
    prob = generate(cfg.p, cfg.n, cfg.k, _seed(cfg.seed, rep))
    ls = prob.least_squares()
    ctx = NormContext(ConcaveCardinality.from_function(cfg.p, np.sqrt))
    lam = cfg.lam if cfg.lam is not None else cfg.lam_ratio * lambda_max(ls, ctx)
    ref = fista(ls, ctx, lam, SolverOptions(max_iter=cfg.reference_iter, rel_tol=1e-15, opt_tol=1e-10))
    f_star = ref.final_objective
    opts = SolverOptions(
        max_iter=cfg.max_iter,
        rel_tol=0.0,
        opt_tol=None,
        max_time=cfg.budget,
        target=f_star + cfg.stop_gap * abs(f_star),
    )
    target = f_star + cfg.gap * abs(f_star)
    rows, curves = [], []
    for name, fn in (("subgradient", subgradient_descent), ("ista", ista), ("fista", fista)):
        tr = fn(ls, ctx, lam, opts)
        hit = tr.iterations_to(target)
        f_star = min(f_star, tr.final_objective)
        rows.append(
            {
                "rep": rep,
                "method": name,
                "lam": lam,
                "iterations_to_gap": hit,
                "iterations": tr.iterations,
                "final_objective": tr.final_objective,
                "time": tr.times[-1],
                "reason": tr.reason,
            }
        )
        for it, t, f, b in tr.rows():
            curves.append({"rep": rep, "method": name, "iteration": it, "time": t, "objective": f, "best": b})
    for r in rows:
        r["reference_objective"] = f_star
        r["relative_gap"] = (r["final_objective"] - f_star) / abs(f_star)
    return rows, curves


def run_optimizer_benchmark(config=None):
    """Iterations each method needs to reach a relative objective gap of ``config.gap``.

    Every method gets the same wall-clock budget; the reference optimum comes
    from a long FISTA run (or the best value any method found).
    """
    cfg = config or BenchmarkConfig()
    out = sorted(_map(lambda r: (r, _benchmark_rep(cfg, r)), range(cfg.reps)), key=lambda t: t[0])
    rows = [row for _, (rs, _) in out for row in rs]
    curves = [c for _, (_, cs) in out for c in cs]

    def count(rep, method):
        v = next(r["iterations_to_gap"] for r in rows if r["rep"] == rep and r["method"] == method)
        return np.inf if v is None else v

    ordered = [count(r, "fista") < count(r, "ista") < count(r, "subgradient") for r in range(cfg.reps)]
    summary = {
        "ordered_runs": int(sum(ordered)),
        "runs": cfg.reps,
        "ordering": [bool(o) for o in ordered],
    }
    return StudyResult("optimizers", asdict(cfg), cfg.reps, rows, curves, summary)


# -- relaxation trade-off -------------------------------------------------


@dataclass
class TradeoffConfig:
    p: int = 120
    n: int = 20
    k: int = 40
    seed: int = 0
    reps: int = 10
    n_lambdas: int = 30
    lambda_ratio: float = 1e-2
    # penalty levels at which the lower envelopes are compared
    levels: int = 50
    rel_tol: float = 1e-6
    max_iter: int = 2000


def _tradeoff_rep(cfg, rep):
    prob = generate(cfg.p, cfg.n, cfg.k, _seed(cfg.seed, rep))
    F = Spectral(X=prob.X)
    ls = prob.least_squares()
    lam_max = lambda_max(ls, NormContext(F))
    grid = default_lambda_grid(lam_max, cfg.n_lambdas, cfg.lambda_ratio)
    opts = SolverOptions(max_iter=cfg.max_iter, rel_tol=cfg.rel_tol, opt_tol=None)
    # past min(n, p) variables the refit interpolates, so the curve is flat at zero
    curves = {
        "convex": convex_path_curve(prob, F, grid, opts, stop_size=min(cfg.n, cfg.p), lam_max=lam_max),
        "greedy": greedy_forward_selection(prob, F),
        "ols_threshold": ols_threshold_path(prob, F),
    }
    conv, greedy = curves["convex"], curves["greedy"]
    lo = min(q.penalty for q in conv + greedy if q.penalty > 0)
    hi = min(max(q.penalty for q in conv), max(q.penalty for q in greedy))
    levels = np.linspace(lo, max(hi, lo), cfg.levels)
    env_c, env_g = lower_envelope(conv, levels), lower_envelope(greedy, levels)
    scale = float(prob.y @ prob.y) / prob.n
    below = env_c <= env_g + 1e-9 * scale
    rel = np.abs(env_c - env_g) / np.maximum(env_g, 1e-12 * scale)
    rows = [
        {
            "rep": rep,
            "fraction_below": float(below.mean()),
            "median_relative_difference": float(np.median(rel)),
            "convex_points": len(conv),
            "greedy_points": len(greedy),
        }
    ]
    pts = [
        {"rep": rep, "method": m, "size": q.size, "penalty": q.penalty, "residual": q.residual, "support": q.support}
        for m, qs in curves.items()
        for q in qs
    ]
    env = [
        {"rep": rep, "level": float(c), "convex_envelope": float(a), "greedy_envelope": float(b)}
        for c, a, b in zip(levels, env_c, env_g)
    ]
    return rows, pts, env, rel


def run_tradeoff_study(config=None):
    """Residual against penalty for the convex path, greedy and thresholded OLS.

    Per replication the lower envelopes of the convex and greedy curves are
    compared at ``config.levels`` penalty values spanning the range both
    curves cover.
    """
    cfg = config or TradeoffConfig()
    out = sorted(_map(lambda r: (r, _tradeoff_rep(cfg, r)), range(cfg.reps)), key=lambda t: t[0])
    rows = [x for _, (rs, _, _, _) in out for x in rs]
    curves = [x for _, (_, ps, _, _) in out for x in ps]
    envelopes = [x for _, (_, _, es, _) in out for x in es]
    rel = np.concatenate([r for _, (_, _, _, r) in out])
    summary = {
        "fraction_below": [r["fraction_below"] for r in rows],
        "median_relative_difference": float(np.median(rel)),
        "envelopes": envelopes,
    }
    return StudyResult("tradeoff", asdict(cfg), cfg.reps, rows, curves, summary)


# -- entry pattern of the range norm ---------------------------------------


@dataclass
class PathShapeConfig:
    p: int = 20
    n: int = 40
    # length of the contiguous true support, centred in 1..p
    k: int = 4
    # noise standard deviation relative to n^{-1/2} ||X w*||
    noise: float = 0.1
    # weight of |A| in the mixed function
    cardinality_weight: float = 20.0
    seed: int = 0
    reps: int = 10
    n_lambdas: int = 100
    lambda_ratio: float = 1e-2
    rel_tol: float = 1e-8


def path_shape_functions(p, cardinality_weight):
    rng = RangePlusConstant(p)
    return {"range": rng, "mixed": SumFunction([rng, Cardinality(p)], [1.0, cardinality_weight])}


def _path_shape_rep(cfg, rep):
    stream = RngStream(_seed(cfg.seed, rep))
    X = normalize_columns(gaussian(stream, (cfg.n, cfg.p)))
    start = (cfg.p - cfg.k) // 2
    J = frozenset(range(start, start + cfg.k))
    w = np.zeros(cfg.p)
    w[start : start + cfg.k] = np.where(stream.uniform(size=cfg.k) < 0.5, -1.0, 1.0) * (1.0 + stream.uniform(size=cfg.k))
    signal = X @ w
    y = signal + cfg.noise * float(np.linalg.norm(signal)) / np.sqrt(cfg.n) * stream.normal(cfg.n)
    ls = LeastSquaresProblem(X, y)
    opts = SolverOptions(rel_tol=cfg.rel_tol)
    rows, curves = [], []
    for name, F in path_shape_functions(cfg.p, cfg.cardinality_weight).items():
        ctx = NormContext(F)
        lam_max = lambda_max(ls, ctx)
        grid = default_lambda_grid(lam_max, cfg.n_lambdas, cfg.lambda_ratio)
        path = regularization_path(ls, ctx, grid, opts, lam_max=lam_max)
        sizes = np.array([len(q.support) for q in path])
        entered = sizes[sizes > 0]
        rows.append(
            {
                "rep": rep,
                "function": name,
                "first_entry_size": int(entered[0]) if entered.size else 0,
                "largest_step": int(np.max(np.diff(sizes))) if sizes.size > 1 else 0,
                "recovers_support": any(q.support == J for q in path),
            }
        )
        curves += [
            {"rep": rep, "function": name, "lam": q.lam, "size": len(q.support), "support": q.support} for q in path
        ]
    return rows, curves


def run_path_shape_study(config=None):
    """Support sizes along the path for the range norm and the mixed norm.

    The range function charges ``p - 1`` for the first variable and at most
    ``p - 1`` more for all the others, so its path tends to jump from the
    empty set to a long interval. Adding ``c |A|`` makes that first gap
    relatively small and lets variables enter a few at a time. Per
    replication the summary flags an all-at-once entry (first nonempty
    support of at least ``2 k`` variables) and a gradual one (first
    nonempty support no larger than ``k`` and the true block visited).
    """
    cfg = config or PathShapeConfig()
    out = sorted(_map(lambda r: (r, _path_shape_rep(cfg, r)), range(cfg.reps)), key=lambda t: t[0])
    rows = [x for _, (rs, _) in out for x in rs]
    curves = [x for _, (_, cs) in out for x in cs]
    by = {(r["rep"], r["function"]): r for r in rows}
    all_at_once = [by[r, "range"]["first_entry_size"] >= 2 * cfg.k for r in range(cfg.reps)]
    gradual = [
        by[r, "mixed"]["first_entry_size"] <= cfg.k and by[r, "mixed"]["recovers_support"] for r in range(cfg.reps)
    ]
    summary = {
        "range_all_at_once": int(sum(all_at_once)),
        "mixed_gradual": int(sum(gradual)),
        "runs": cfg.reps,
    }
    return StudyResult("path_shape", asdict(cfg), cfg.reps, rows, curves, summary)


# -- prediction table -------------------------------------------------------


@dataclass
class PriorComparisonConfig:
    rows: tuple = TABLE1_ROWS
    reps: int = 10
    seed: int = 0
    n_lambdas: int = 30
    lambda_ratio: float = 1e-3
    # ridge grid: largest eigenvalue of X^T X / n times 10 down to this ratio
    ridge_ratio: float = 1e-5
    # stop a penalized path after this many grid points without improvement
    patience: int = 3
    rel_tol: float = 1e-6
    max_iter: int = 2000
    alpha: float = 0.05


METHODS = ("submodular", "l2", "l1", "greedy")


def _oracle_path(prob, ctx, grid, opts, patience, lam_max=None):
    """Best prediction error along a warm-started path, stopping once it stalls."""
    state = {"best": np.inf, "lam": None, "since": 0}

    def stop(pt):
        err = prediction_error(prob, pt.w)
        if err < state["best"]:
            state.update(best=err, lam=pt.lam, since=0)
        else:
            state["since"] += 1
        return patience is not None and state["since"] >= patience

    regularization_path(prob.least_squares(), ctx, grid, opts, stop=stop, lam_max=lam_max)
    return state["best"], state["lam"]


def _ridge_oracle(prob, ratio, n_points):
    ls = prob.least_squares()
    ev, V = np.linalg.eigh(ls.Q)
    ev = np.maximum(ev, 0.0)
    c = V.T @ ls.r
    grid = 10.0 * ev.max() * np.logspace(0.0, np.log10(ratio), n_points)
    errs = [prediction_error(prob, V @ (c / (ev + lam))) for lam in grid]
    i = int(np.argmin(errs))
    return errs[i], float(grid[i])


def _greedy_oracle(prob):
    F = Cardinality(prob.p)
    errs = [prediction_error(prob, refit(prob.X, prob.y, q.support)) for q in greedy_forward_selection(prob, F)]
    i = int(np.argmin(errs))
    return errs[i], i


def _table1_rep(cfg, row, rep):
    p, n, k = row
    prob = generate(p, n, k, _seed(cfg.seed, p, n, k, rep))
    ls = prob.least_squares()
    opts = SolverOptions(max_iter=cfg.max_iter, rel_tol=cfg.rel_tol, opt_tol=None)
    out = {}
    for name, F in (("submodular", Spectral(X=prob.X)), ("l1", Cardinality(p))):
        ctx = NormContext(F)
        lam_max = lambda_max(ls, ctx)
        grid = default_lambda_grid(lam_max, cfg.n_lambdas, cfg.lambda_ratio)
        out[name] = _oracle_path(prob, ctx, grid, opts, cfg.patience, lam_max)
    out["l2"] = _ridge_oracle(prob, cfg.ridge_ratio, cfg.n_lambdas)
    out["greedy"] = _greedy_oracle(prob)
    return out


def run_prior_comparison(config=None):
    """Prediction error of each method at its oracle regularization level.

    Errors are ``100 ||X (w - w*)||^2 / ||X w*||^2``. Differences to the
    submodular method are paired by replication; the one-sided paired t-test
    asks whether the other method is worse.
    """
    cfg = config or PriorComparisonConfig()
    rows = [tuple(int(v) for v in r) for r in cfg.rows]
    jobs = [(row, rep) for row in rows for rep in range(cfg.reps)]
    done = sorted(_map(lambda j: (j, _table1_rep(cfg, *j)), jobs), key=lambda t: (rows.index(t[0][0]), t[0][1]))
    curves, results = [], []
    for row in rows:
        reps = [res for (r, _), res in done if r == row]
        err = {m: np.array([res[m][0] for res in reps]) for m in METHODS}
        for rep, res in enumerate(reps):
            for m in METHODS:
                curves.append({"p": row[0], "n": row[1], "k": row[2], "rep": rep, "method": m,
                               "error": res[m][0], "parameter": res[m][1]})
        mean, se = _stats(err["submodular"])
        line = {"p": row[0], "n": row[1], "k": row[2], "submodular": mean, "submodular_stderr": se}
        for m in METHODS[1:]:
            d_mean, d_se = _stats(err[m] - err["submodular"])
            if len(reps) > 1 and np.any(err[m] != err["submodular"]):
                pval = float(scipy.stats.ttest_rel(err[m], err["submodular"], alternative="greater").pvalue)
            else:
                pval = float("nan")
            line[f"{m}_vs_submodular"] = d_mean
            line[f"{m}_vs_submodular_stderr"] = d_se
            line[f"{m}_pvalue"] = pval
            line[f"{m}_significant"] = bool(pval < cfg.alpha)
        results.append(line)
    config_echo = asdict(cfg)
    config_echo["rows"] = [list(r) for r in rows]
    summary = {"table": results}
    return StudyResult("table1", config_echo, cfg.reps, results, curves, summary)

"""Solvers for ``min_w (1/2n) ||y - X w||^2 + lam Omega(w)``.

Proximal gradient (ISTA), its accelerated variant (FISTA), subgradient
descent and warm-started regularization paths. All solvers return a
:class:`SolverTrace` with per-iteration objective values and wall-clock
times.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .linalg import power_iteration
from .lovasz import _ctx, dual_norm, dual_norm_closed_form, omega, subgradient
from .prox import ProxWorkspace, prox
from .setfn import BRUTE_FORCE_MAX_P

__all__ = [
    "LeastSquaresProblem",
    "SolverOptions",
    "SolverTrace",
    "PathPoint",
    "objective",
    "optimality_residuals",
    "ista",
    "fista",
    "subgradient_descent",
    "lambda_max",
    "default_lambda_grid",
    "regularization_path",
]


class LeastSquaresProblem:
    """Design ``X`` (n x p) and response ``y`` with cached ``Q = X^T X / n``, ``r = X^T y / n``.

    ``L`` is the largest eigenvalue of ``Q`` (power-iteration estimate).
    """

    def __init__(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float).ravel()
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError(f"inconsistent shapes X{X.shape}, y{y.shape}")
        self.X, self.y = X, y
        self.n, self.p = X.shape
        self.Q = X.T @ X / self.n
        self.r = X.T @ y / self.n
        self.yy = float(y @ y) / self.n
        self._L = None

    @property
    def L(self):
        if self._L is None:
            self._L = power_iteration(self.Q)
        return self._L

    def loss(self, w):
        res = self.y - self.X @ w
        return 0.5 * float(res @ res) / self.n

    def gradient(self, w):
        return self.Q @ w - self.r


@dataclass
class SolverOptions:
    max_iter: int = 1000
    rel_tol: float = 1e-10
    # wall-clock budget in seconds; None means unlimited
    max_time: float | None = None
    step: float | None = None
    backtrack: bool = True
    # subgradient step scale a in a / sqrt(k); None picks the default rule
    step_scale: float | None = None
    # when the objective stalls, also require the optimality residuals to be
    # below opt_tol; skipped if the dual norm is expensive or opt_tol is None
    opt_tol: float | None = 1e-7
    # see subnorm.prox.prox; "auto" uses a closed form when available
    prox_method: str = "auto"
    mnp_tol: float = 1e-14
    # stop as soon as the (best) objective is <= target
    target: float | None = None
    # FISTA only: reset the momentum whenever the objective goes up
    restart: bool = False


@dataclass
class SolverTrace:
    method: str
    lam: float
    objectives: list = field(default_factory=list)
    times: list = field(default_factory=list)
    w: np.ndarray | None = None
    reason: str = ""
    iterations: int = 0
    best_objectives: list = field(default_factory=list)

    @property
    def final_objective(self):
        return self.best_objectives[-1] if self.best_objectives else self.objectives[-1]

    def iterations_to(self, target):
        """First iteration whose (best-so-far) objective is ``<= target``, else ``None``."""
        vals = self.best_objectives or self.objectives
        hit = np.flatnonzero(np.asarray(vals) <= target)
        return int(hit[0]) if hit.size else None

    def rows(self):
        best = self.best_objectives or self.objectives
        return [(k, t, f, b) for k, (t, f, b) in enumerate(zip(self.times, self.objectives, best))]


def objective(problem, ctx, w, lam):
    """``(1/2n) ||y - X w||^2 + lam Omega(w)``."""
    return problem.loss(w) + lam * omega(ctx, w)


def optimality_residuals(problem, ctx, w, lam, dual_method="auto"):
    """Relative dual-feasibility excess and complementarity gap of ``w``.

    At a minimiser ``g = r - Q w`` satisfies ``Omega*(g) <= lam`` and
    ``g @ w = lam Omega(w)``.
    """
    g = problem.r - problem.Q @ w
    lo = lam * omega(ctx, w)
    dual = max(0.0, dual_norm(ctx, g, method=dual_method) - lam) / lam
    comp = abs(float(g @ w) - lo) / (1.0 + lo)
    return dual, comp


def _prox_step(problem, ctx, v, lam, L, ws, opts):
    """Prox-gradient step from ``v`` with backtracking on ``L`` (doubling)."""
    fv = problem.loss(v)
    grad = problem.gradient(v)
    while True:
        w = prox(
            ctx, v - grad / L, lam / L, workspace=ws, check=False,
            method=opts.prox_method, mnp_tol=opts.mnp_tol,
        ).w
        d = w - v
        if not opts.backtrack or problem.loss(w) <= fv + grad @ d + 0.5 * L * (d @ d) + 1e-15 * max(1.0, abs(fv)):
            return w, L
        L *= 2.0


def _converged(prev, cur, rel_tol):
    return abs(prev - cur) <= rel_tol * max(abs(cur), 1e-300)


def _cheap_dual(ctx):
    return dual_norm_closed_form(ctx, np.zeros(ctx.p)) is not None or ctx.p <= BRUTE_FORCE_MAX_P


def _proximal(problem, ctx, lam, opts, w0, accelerated, workspace):
    if not lam > 0:
        raise ValueError("lam must be positive")
    ctx = _ctx(ctx)
    opts = opts or SolverOptions()
    L = 1.0 / opts.step if opts.step else problem.L
    if not L > 0:
        raise ValueError("Lipschitz constant must be positive")
    ws = workspace if workspace is not None else ProxWorkspace()
    w = np.zeros(problem.p) if w0 is None else np.array(w0, dtype=float)
    trace = SolverTrace(method="fista" if accelerated else "ista", lam=lam)
    t0 = time.perf_counter()
    f = objective(problem, ctx, w, lam)
    trace.objectives.append(f)
    trace.times.append(0.0)
    v, t = w.copy(), 1.0
    verify = opts.opt_tol is not None and _cheap_dual(ctx)
    trace.reason = "max_iter"
    for k in range(1, opts.max_iter + 1):
        base = v if accelerated else w
        w_new, L = _prox_step(problem, ctx, base, lam, L, ws, opts)
        f_new = objective(problem, ctx, w_new, lam)
        if not accelerated:
            assert f_new <= f + 1e-12 * max(1.0, abs(f)), "ISTA objective increased"
        elif opts.restart and f_new > f:
            v, t = w_new.copy(), 1.0
        else:
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            v = w_new + ((t - 1.0) / t_new) * (w_new - w)
            t = t_new
        trace.objectives.append(f_new)
        trace.times.append(time.perf_counter() - t0)
        trace.iterations = k
        done = _converged(f, f_new, opts.rel_tol)
        w, f = w_new, f_new
        if done and verify:
            res = optimality_residuals(problem, ctx, w, lam)
            done = max(res) <= opts.opt_tol
        if done:
            trace.reason = "rel_tol"
            break
        if opts.target is not None and f <= opts.target:
            trace.reason = "target"
            break
        if opts.max_time is not None and trace.times[-1] >= opts.max_time:
            trace.reason = "max_time"
            break
    trace.w = w
    return trace


def ista(problem, ctx, lam, opts=None, w0=None, workspace=None):
    """Proximal gradient with step ``1/L``; the objective is monotone (asserted)."""
    return _proximal(problem, ctx, lam, opts, w0, False, workspace)


def fista(problem, ctx, lam, opts=None, w0=None, workspace=None):
    """Accelerated proximal gradient with momentum ``t_{k+1} = (1 + sqrt(1 + 4 t_k^2)) / 2``."""
    return _proximal(problem, ctx, lam, opts, w0, True, workspace)


def subgradient_descent(problem, ctx, lam, opts=None, w0=None):
    """Subgradient method with steps ``a / sqrt(k)``; the best iterate is returned.

    The default ``a = objective(0) / (1 + Omega*(r))`` is a scale heuristic
    and can be overridden through ``opts.step_scale``.
    """
    ctx = _ctx(ctx)
    opts = opts or SolverOptions()
    w = np.zeros(problem.p) if w0 is None else np.array(w0, dtype=float)
    a = opts.step_scale
    if a is None:
        a = objective(problem, ctx, np.zeros(problem.p), lam) / (1.0 + dual_norm(ctx, problem.r))
    trace = SolverTrace(method="subgradient", lam=lam)
    t0 = time.perf_counter()
    f = objective(problem, ctx, w, lam)
    best, best_w = f, w.copy()
    trace.objectives.append(f)
    trace.best_objectives.append(best)
    trace.times.append(0.0)
    trace.reason = "max_iter"
    for k in range(1, opts.max_iter + 1):
        g = problem.gradient(w) + lam * subgradient(ctx, w)
        w = w - (a / np.sqrt(k)) * g
        f = objective(problem, ctx, w, lam)
        if f < best:
            best, best_w = f, w.copy()
        trace.objectives.append(f)
        trace.best_objectives.append(best)
        trace.times.append(time.perf_counter() - t0)
        trace.iterations = k
        if opts.target is not None and best <= opts.target:
            trace.reason = "target"
            break
        if opts.max_time is not None and trace.times[-1] >= opts.max_time:
            trace.reason = "max_time"
            break
    trace.w = best_w
    return trace


def lambda_max(problem, ctx):
    """Smallest ``lam`` for which ``w = 0`` is optimal: ``Omega*(r)``."""
    return dual_norm(_ctx(ctx), problem.r)


def default_lambda_grid(lam_max, n_points=50, ratio=1e-3):
    return lam_max * np.logspace(0.0, np.log10(ratio), n_points)


@dataclass
class PathPoint:
    lam: float
    w: np.ndarray
    support: frozenset
    objective: float
    iterations: int


def regularization_path(problem, ctx, lambdas=None, opts=None, support_tol=1e-8, stop=None, lam_max=None):
    """Warm-started FISTA over a decreasing grid of ``lam``.

    The default grid has 50 log-spaced values from ``Omega*(r)`` down to
    ``Omega*(r) / 1000``. ``stop(point)`` may return True to end the path
    early. Grid values at or above ``lam_max`` (computed for the default
    grid, or passed in) return ``w = 0`` without iterating; the prox there is
    degenerate and slow to certify.
    """
    ctx = _ctx(ctx)
    if lambdas is None:
        lam_max = lambda_max(problem, ctx)
        lambdas = default_lambda_grid(lam_max)
    lambdas = np.asarray(lambdas, dtype=float)
    if np.any(lambdas <= 0) or np.any(np.diff(lambdas) > 0):
        raise ValueError("lambda grid must be positive and nonincreasing")
    ws = ProxWorkspace()
    w = np.zeros(problem.p)
    out = []
    for lam in lambdas:
        if lam_max is not None and lam >= lam_max and not w.any():
            obj, iters = objective(problem, ctx, w, lam), 0
        else:
            tr = fista(problem, ctx, lam, opts, w0=w, workspace=ws)
            w, obj, iters = tr.w, tr.objectives[-1], tr.iterations
        pt = PathPoint(
            lam=float(lam),
            w=w.copy(),
            support=frozenset(np.flatnonzero(np.abs(w) > support_tol).tolist()),
            objective=obj,
            iterations=iters,
        )
        out.append(pt)
        if stop is not None and stop(pt):
            break
    return out

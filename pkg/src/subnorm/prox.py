"""Proximal operator of ``lam * Omega``.

Minimising ``0.5 ||w - z||^2 + lam Omega(w)`` reduces to a minimum-norm-point
problem over the base polytope of ``G(A) = F(A) - |z|(A) / lam``. The
negative part of that point gives the solution, ``|w| = lam * max(-t, 0)``,
and the signs of ``z`` are reattached afterwards.

:func:`prox_bruteforce` is an independent oracle for small ``p``. On the cone
of vectors sorted by a fixed permutation, ``Omega`` is linear. Minimising
over that cone is an isotonic regression. Taking the best cone over all
``p!`` permutations gives the exact solution.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import sfm
from .lovasz import NormContext, _ctx, dual_norm, omega
from .setfn import (
    Cardinality,
    CapabilityError,
    ConcaveCardinality,
    ModularShift,
    Restriction,
    WeightedCardinality,
    subset_bits,
)

__all__ = [
    "ProxResult",
    "ProxError",
    "ProxWorkspace",
    "prox",
    "prox_closed_form",
    "prox_bruteforce",
    "prox_support",
    "prox_by_levelsets",
    "kkt_residuals",
    "soft_threshold",
]

BRUTE_PROX_MAX_P = 10
# relative duality gap at which the support-finding minimisation may stop
SPLIT_GAP = 1e-12


class ProxError(RuntimeError):
    """KKT residuals of a computed proximal point exceed tolerance."""

    def __init__(self, msg, residuals):
        super().__init__(msg)
        self.residuals = residuals


@dataclass
class ProxResult:
    w: np.ndarray
    support: frozenset
    s: np.ndarray
    kkt: tuple
    method: str
    iterations: int = 0

    def to_dict(self):
        return {
            "w": self.w,
            "support": sorted(k + 1 for k in self.support),
            "s": self.s,
            "kkt": {"dual_feasibility": self.kkt[0], "complementarity": self.kkt[1]},
            "method": self.method,
            "iterations": self.iterations,
        }


class ProxWorkspace:
    """Warm-start store for repeated prox calls on one set function.

    The corral of the last min-norm-point run is kept as vertices of ``B(F)``,
    or of ``B(F_S)`` when the run was restricted to the ground set ``S``.
    Those are valid vertices for every later shift of the same function.
    """

    def __init__(self):
        self.corral = None
        self.weights = None
        self.ground = None
        # corral of the support-finding minimisation, as vertices of B(F)
        self.split_corral = None
        self.split_weights = None
        self.calls = 0
        self.major_iterations = 0

    def init_for(self, u, ground=None):
        if self.corral is None or not _same_ground(self.ground, ground):
            return None
        return self.corral - u, self.weights

    def store(self, state, u, ground=None):
        self.corral = state.corral + u
        self.weights = state.weights.copy()
        self.ground = None if ground is None else np.array(ground)
        self.calls += 1
        self.major_iterations += state.major_iterations


def _same_ground(a, b):
    if a is None or b is None:
        return a is None and b is None
    return len(a) == len(b) and bool(np.all(a == b))


def soft_threshold(z, lam):
    z = np.asarray(z, dtype=float)
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


def kkt_residuals(ctx, z, w, lam, dual_method="auto"):
    """``(dual, comp)``: relative excess of ``Omega*(z - w)`` over ``lam`` and the
    complementarity gap ``|(z - w) @ w - lam Omega(w)| / (1 + lam Omega(w))``."""
    ctx = _ctx(ctx)
    r = np.asarray(z, dtype=float) - w
    lo = lam * omega(ctx, w)
    dual = max(0.0, dual_norm(ctx, r, method=dual_method) - lam) / lam
    comp = abs(float(r @ w) - lo) / (1.0 + lo)
    return dual, comp


def _check(ctx, z, w, lam, tol, check):
    if check is False or (check == "auto" and ctx.p > 12):
        return (np.nan, np.nan)
    res = kkt_residuals(ctx, z, w, lam)
    if res[0] > tol or res[1] > tol:
        raise ProxError(f"KKT residuals {res[0]:.3e}, {res[1]:.3e} exceed {tol:.1e}", res)
    return res


def _pava_nonincreasing(c):
    """Nonincreasing least-squares fit of a 1-d array (pool adjacent violators)."""
    vals, sizes = [], []
    for x in c:
        vals.append(float(x))
        sizes.append(1)
        while len(vals) > 1 and vals[-2] < vals[-1]:
            n = sizes[-2] + sizes[-1]
            v = (vals[-2] * sizes[-2] + vals[-1] * sizes[-1]) / n
            vals.pop()
            sizes.pop()
            vals[-1], sizes[-1] = v, n
    return np.repeat(vals, sizes)


def prox_closed_form(ctx, z, lam):
    """Proximal point for modular ``F`` and concave functions of cardinality.

    A weighted ``F`` gives soft thresholding at ``lam * weights``. For
    ``F(A) = h(|A|)`` the norm is an ordered weighted l1 norm and the prox
    is an isotonic fit of the sorted ``|z|`` shifted by the gains of ``h``.
    Returns ``None`` for other families.
    """
    ctx = _ctx(ctx)
    F = ctx.F
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    if isinstance(F, WeightedCardinality):
        w_abs = np.maximum(a - lam * F.weights, 0.0)
    elif isinstance(F, (Cardinality, ConcaveCardinality)):
        order = np.argsort(-a, kind="stable")
        gains = np.diff(F.chain(order))
        w_abs = np.empty_like(a)
        w_abs[order] = np.maximum(_pava_nonincreasing(a[order] - lam * gains), 0.0)
    else:
        return None
    return np.sign(z) * np.minimum(w_abs, a)


def _mnp_abs(F, u, lam, a, mnp_tol, workspace, ground=None):
    """``|w|`` from the min-norm point of ``B(F - u)``."""
    init = workspace.init_for(u, ground) if workspace is not None else None
    t, state = sfm.min_norm_point(ModularShift(F, u), tol=mnp_tol, init=init)
    if workspace is not None:
        workspace.store(state, u, ground)
    return np.minimum(lam * np.maximum(-t, 0.0), a), state.major_iterations


def prox(ctx, z, lam, tol=1e-9, mnp_tol=1e-14, workspace=None, check="auto", method="auto"):
    """Proximal point of ``lam * Omega`` at ``z``.

    ``method``:

    - ``"mnp"``: one min-norm-point run over the whole ground set;
    - ``"split"``: first find a minimiser ``S`` of ``lam F - |z|`` (it
      contains the support), then run min-norm-point for the restriction
      ``F_S``, which gives the same point and skips the coordinates that end
      at zero;
    - ``"auto"``: :func:`prox_closed_form` when the family has one, else
      ``"split"``.

    ``check`` verifies the KKT conditions (``"auto"``: only when the dual norm
    is cheap, ``p <= 12``). Pass a :class:`ProxWorkspace` to warm start
    successive calls.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    if method not in ("mnp", "split", "auto"):
        raise ValueError(f"unknown prox method {method!r}")
    ctx = _ctx(ctx)
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    w = prox_closed_form(ctx, z, lam) if method == "auto" else None
    if w is not None:
        name, iters = "closed-form", 0
    elif method == "mnp":
        w_abs, iters = _mnp_abs(ctx.F, a / lam, lam, a, mnp_tol, workspace)
        w = np.sign(z) * w_abs
        name = "min-norm-point"
    else:
        G = ModularShift(ctx.F, a, scale=lam)
        init = None
        if workspace is not None and workspace.split_corral is not None:
            init = (lam * workspace.split_corral - a, workspace.split_weights)
        res = sfm.minimize(
            G, method="mnp", which="maximal", init=init, gap_stop=SPLIT_GAP * (1.0 + float(a.sum()))
        )
        if workspace is not None:
            workspace.split_corral = (res.state.corral + a) / lam
            workspace.split_weights = res.state.weights.copy()
        S = np.array(sorted(res.argmin), dtype=np.int64)
        w = np.zeros(ctx.p)
        iters = res.iterations
        if S.size:
            FS = Restriction(ctx.F, S)
            w_abs, it = _mnp_abs(FS, a[S] / lam, lam, a[S], mnp_tol, workspace, ground=S)
            w[S] = np.sign(z[S]) * w_abs
            iters += it
        name = "split-min-norm-point"
    kkt = _check(ctx, z, w, lam, tol, check)
    return ProxResult(
        w=w,
        support=frozenset(np.flatnonzero(w != 0).tolist()),
        s=(z - w) / lam,
        kkt=kkt,
        method=name,
        iterations=iters,
    )


def _isotonic_nonincreasing(c):
    """Row-wise nonincreasing least-squares fit of ``c`` (shape ``(N, p)``).

    Uses ``v_i = min_{j <= i} max_{k >= i} mean(c[j..k])``.
    """
    N, p = c.shape
    S = np.concatenate([np.zeros((N, 1)), np.cumsum(c, axis=1)], axis=1)
    j = np.arange(p)[:, None]
    k = np.arange(p)[None, :]
    length = np.where(k >= j, k - j + 1, 1)
    avg = (S[:, None, 1:] - S[:, :p, None]) / length
    avg = np.where(k >= j, avg, -np.inf)
    # suffix max over k, then prefix min over j
    suf = np.flip(np.maximum.accumulate(np.flip(avg, axis=2), axis=2), axis=2)
    suf = np.where(k >= j, suf, np.inf)
    pre = np.minimum.accumulate(suf, axis=1)
    return pre[:, np.arange(p), np.arange(p)]


def prox_bruteforce(ctx, z, lam, chunk=20000):
    """Exact proximal point by enumerating all orderings (test oracle, ``p <= 10``)."""
    if not lam > 0:
        raise ValueError("lam must be positive")
    ctx = _ctx(ctx)
    p = ctx.p
    if p > BRUTE_PROX_MAX_P:
        raise CapabilityError(f"brute-force prox is limited to p <= {BRUTE_PROX_MAX_P}")
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    table = ctx.F.table()
    weights = (1 << np.arange(p)).astype(np.int64)
    best_val, best_v, best_perm = np.inf, None, None
    perms_iter = itertools.permutations(range(p))
    while True:
        block = np.array(list(itertools.islice(perms_iter, chunk)), dtype=np.int64)
        if block.size == 0:
            break
        prefix = np.cumsum(weights[block], axis=1)
        vals = table[prefix]
        gains = np.diff(np.concatenate([np.zeros((len(block), 1)), vals], axis=1), axis=1)
        ap = a[block]
        v = np.maximum(_isotonic_nonincreasing(ap - lam * gains), 0.0)
        obj = 0.5 * np.sum((v - ap) ** 2, axis=1) + lam * np.sum(gains * v, axis=1)
        i = int(np.argmin(obj))
        if obj[i] < best_val:
            best_val, best_v, best_perm = float(obj[i]), v[i], block[i]
    w_abs = np.zeros(p)
    w_abs[best_perm] = best_v
    w = np.sign(z) * np.minimum(w_abs, a)
    kkt = kkt_residuals(ctx, z, w, lam)
    return ProxResult(
        w=w,
        support=frozenset(np.flatnonzero(np.abs(w) > 0).tolist()),
        s=(z - w) / lam,
        kkt=kkt,
        method="brute-force-support",
    )


def prox_support(ctx, z, lam, method="auto"):
    """Support of the proximal point from a single submodular minimisation.

    It is the minimal minimiser of ``A -> lam F(A) - |z|(A)``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    ctx = _ctx(ctx)
    G = ModularShift(ctx.F, np.abs(np.asarray(z, dtype=float)), scale=lam)
    return sfm.minimize(G, method=method, which="minimal").argmin


def prox_by_levelsets(ctx, z, lam, alphas, method="auto"):
    """Approximate proximal point from one minimisation per level ``alpha``.

    ``{k : |w_k| > alpha}`` is the minimal minimiser of
    ``lam F(A) - (|z| - alpha)(A)``. Each coordinate is rounded down to the
    largest grid level below it, so the error is at most the grid spacing
    provided the grid reaches ``max |z|``.
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    ctx = _ctx(ctx)
    alphas = np.asarray(alphas, dtype=float)
    if np.any(alphas <= 0) or np.any(np.diff(alphas) <= 0):
        raise ValueError("alpha grid must be positive and strictly increasing")
    z = np.asarray(z, dtype=float)
    a = np.abs(z)
    w_abs = np.zeros(ctx.p)
    prev = None
    for alpha in alphas:
        G = ModularShift(ctx.F, a - alpha, scale=lam)
        S = sfm.minimize(G, method=method, which="minimal").argmin
        if prev is not None and not S <= prev:
            raise RuntimeError(f"level sets are not nested at alpha={alpha:g}")
        w_abs[list(S)] = alpha
        prev = S
    return np.sign(z) * w_abs

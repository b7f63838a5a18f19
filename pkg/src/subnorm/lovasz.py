"""Lovász extension and the polyhedral norm ``Omega(w) = f(|w|)``.

The extension is evaluated by sorting ``w`` in decreasing order and weighting
each entry by the marginal gain of ``F`` along that order. Ties are broken by
ascending index. The value does not depend on the tie-break, but the greedy
maximiser (and hence the returned subgradient) does. It is one valid choice
among several.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import sfm
from .setfn import (
    BRUTE_FORCE_MAX_P,
    Cardinality,
    CapabilityError,
    ConcaveCardinality,
    ModularShift,
    SetFunctionError,
    stable_inseparable_sets,
    WeightedCardinality,
    subset_bits,
)

__all__ = [
    "NormContext",
    "OrderedEvaluation",
    "lovasz_extension",
    "omega",
    "greedy_maximizer",
    "dual_norm",
    "dual_norm_bruteforce",
    "dual_norm_dinkelbach",
    "dual_norm_closed_form",
    "subgradient",
    "extreme_points",
    "is_extreme_point",
]

EXTREMALITY_MAX_P = 4


@dataclass
class OrderedEvaluation:
    perm: np.ndarray
    gains: np.ndarray
    value: float


class NormContext:
    """A set function plus lazily cached structure used by the norm routines."""

    def __init__(self, F):
        self.F = F
        self.p = F.p
        self.singleton_values = F.singletons()
        if np.any(self.singleton_values <= 0):
            raise SetFunctionError("the norm needs F > 0 on every singleton")
        self._structure = None
        self._tight_matrix = None

    @property
    def structure(self):
        if self._structure is None:
            self._structure = stable_inseparable_sets(self.F)
        return self._structure

    @property
    def tight_sets(self):
        return self.structure.stable_inseparable_sets

    def tight_matrix(self):
        """Rows ``1_A / F(A)`` over stable inseparable ``A``; ``Omega*(s) = max(M @ |s|)``."""
        if self._tight_matrix is None:
            rows = []
            for A in self.tight_sets:
                r = np.zeros(self.p)
                r[list(A)] = 1.0
                rows.append(r / self.F(A))
            self._tight_matrix = np.array(rows)
        return self._tight_matrix

    def omega(self, w):
        return omega(self, w)

    def dual(self, s):
        return dual_norm(self, s)


def _ctx(ctx):
    return ctx if isinstance(ctx, NormContext) else NormContext(ctx)


def lovasz_extension(ctx, w):
    """Evaluate ``f(w)`` for ``w >= 0``."""
    ctx = _ctx(ctx)
    w = np.asarray(w, dtype=float)
    if np.any(w < 0):
        raise ValueError("the Lovász extension is evaluated on nonnegative vectors")
    perm = np.argsort(-w, kind="stable")
    gains = np.diff(ctx.F.chain(perm))
    return OrderedEvaluation(perm=perm, gains=gains, value=float(w[perm] @ gains))


def omega(ctx, w):
    """``Omega(w) = f(|w|)``; only prefixes up to the support size are evaluated."""
    ctx = _ctx(ctx)
    a = np.abs(np.asarray(w, dtype=float))
    nnz = int(np.count_nonzero(a))
    if nnz == 0:
        return 0.0
    perm = np.argsort(-a, kind="stable")
    gains = np.diff(ctx.F.chain(perm, upto=nnz))
    return float(a[perm[:nnz]] @ gains)


def greedy_maximizer(ctx, w):
    """Greedy vertex ``s`` of the submodular polyhedron maximising ``s @ |w|``."""
    ctx = _ctx(ctx)
    a = np.abs(np.asarray(w, dtype=float))
    perm = np.argsort(-a, kind="stable")
    s = np.empty(ctx.p)
    s[perm] = np.diff(ctx.F.chain(perm))
    return s


def subgradient(ctx, w):
    """An element of the subdifferential of ``Omega`` at ``w``.

    Signs of ``w`` are attached to the greedy maximiser; components where
    ``w`` is zero keep their (nonnegative) greedy gains.
    """
    w = np.asarray(w, dtype=float)
    s = greedy_maximizer(ctx, w)
    return np.where(w < 0, -s, s)


def dual_norm_bruteforce(ctx, s, tight_only=False):
    """``max_A ||s_A||_1 / F(A)`` by enumeration (all subsets or stable inseparable ones)."""
    ctx = _ctx(ctx)
    a = np.abs(np.asarray(s, dtype=float))
    if ctx.p > BRUTE_FORCE_MAX_P:
        raise CapabilityError(f"brute-force dual norm is limited to p <= {BRUTE_FORCE_MAX_P}")
    if tight_only:
        return float(np.max(ctx.tight_matrix() @ a))
    t = ctx.F.table()
    bits = subset_bits(ctx.p)
    return float(np.max((bits[1:] @ a) / t[1:]))


def dual_norm_dinkelbach(ctx, s, sfm_method="auto", tol=1e-12, max_iter=1000):
    """Dual norm by Dinkelbach's parametric iteration.

    Starting from the best singleton ratio ``t``, repeatedly minimise
    ``t F(A) - |s|(A)``; a negative minimum gives a set with a larger ratio.
    """
    ctx = _ctx(ctx)
    a = np.abs(np.asarray(s, dtype=float))
    if not np.any(a):
        return 0.0
    # best singleton, or best prefix of |s| sorted descending
    order = np.argsort(-a, kind="stable")
    prefix = ctx.F.chain(order)[1:]
    t = max(float(np.max(a / ctx.singleton_values)), float(np.max(np.cumsum(a[order]) / prefix)))
    scale = 1.0 + float(a.sum())
    V = None
    for _ in range(max_iter):
        # vertices of B(tF - a) are t v - a for vertices v of B(F), so the
        # previous corral carries over to the next t
        init = None if V is None else (t * V[0] - a, V[1])
        res = sfm.minimize(
            ModularShift(ctx.F, a, scale=t), method=sfm_method, init=init, gap_stop=0.5 * tol * scale
        )
        V = ((res.state.corral + a) / t, res.state.weights)
        if res.value >= -tol * scale or not res.argmin:
            return t
        A = list(res.argmin)
        t_new = float(a[A].sum() / ctx.F(A))
        if t_new <= t:
            return t
        t = t_new
    raise RuntimeError("Dinkelbach iteration did not terminate")


def dual_norm_closed_form(ctx, s):
    """Dual norm for functions of cardinality and modular functions.

    For ``F(A) = h(|A|)`` the best set of each size holds the largest
    entries of ``|s|``; for a modular ``F`` the best set is a singleton.
    Returns ``None`` for other families.
    """
    ctx = _ctx(ctx)
    F = ctx.F
    a = np.abs(np.asarray(s, dtype=float))
    if isinstance(F, WeightedCardinality):
        return float(np.max(a / F.weights))
    if isinstance(F, (Cardinality, ConcaveCardinality)):
        h = F.chain(np.arange(F.p))
        return float(np.max(np.cumsum(np.sort(a)[::-1]) / h[1:]))
    return None


def dual_norm(ctx, s, method="auto"):
    """``Omega*(s) = max over nonempty A of ||s_A||_1 / F(A)``.

    ``method``: ``"brute"`` (all subsets), ``"tight"`` (stable inseparable
    sets), ``"dinkelbach"``, ``"closed"`` (cardinality-based and modular
    ``F``), or ``"auto"`` (closed form when available, else brute force when
    ``p <= 12``, else Dinkelbach).
    """
    ctx = _ctx(ctx)
    if method in ("auto", "closed"):
        val = dual_norm_closed_form(ctx, s)
        if val is not None:
            return val
        if method == "closed":
            raise CapabilityError(f"no closed-form dual norm for {type(ctx.F).__name__}")
        method = "brute" if ctx.p <= BRUTE_FORCE_MAX_P else "dinkelbach"
    if method == "brute":
        return dual_norm_bruteforce(ctx, s)
    if method == "tight":
        return dual_norm_bruteforce(ctx, s, tight_only=True)
    if method == "dinkelbach":
        return dual_norm_dinkelbach(ctx, s)
    raise ValueError(f"unknown dual-norm method {method!r}")


def _dual_ball_generators(ctx):
    """Sign patterns of greedy vertices of the polyhedron, including partial orders."""
    import itertools

    F, p = ctx.F, ctx.p
    rows = set()
    for r in range(1, p + 1):
        for order in itertools.permutations(range(p), r):
            vals = F.chain(np.array(list(order) + [k for k in range(p) if k not in order]), upto=r)
            g = np.zeros(p)
            g[list(order)] = np.diff(vals)
            for signs in itertools.product((-1.0, 1.0), repeat=p):
                rows.add(tuple(np.round(g * np.array(signs), 15)))
    return np.array(sorted(rows))


def is_extreme_point(ctx, v, gens=None, tol=1e-10):
    """Rank certificate that ``v`` is a vertex of the unit ball of ``Omega``.

    The ball is cut out by ``g @ w <= 1`` over the dual-ball generators. A
    feasible ``v`` is a vertex iff the constraints tight at ``v`` span R^p.
    """
    ctx = _ctx(ctx)
    if gens is None:
        gens = _dual_ball_generators(ctx)
    vals = gens @ v
    if vals.max() > 1 + tol:
        return False
    tight = gens[np.abs(vals - 1.0) <= tol]
    return tight.shape[0] > 0 and np.linalg.matrix_rank(tight, tol=1e-9) == ctx.p


def extreme_points(ctx, certify=None):
    """All ``sigma / F(A)`` with ``A`` stable inseparable and ``sigma`` a sign vector on ``A``.

    For ``p <= 4`` each point is certified to be a vertex (``certify`` forces
    or disables this).
    """
    import itertools

    ctx = _ctx(ctx)
    if ctx.p > BRUTE_FORCE_MAX_P:
        raise CapabilityError(f"extreme-point enumeration is limited to p <= {BRUTE_FORCE_MAX_P}")
    pts = []
    for A in sorted(ctx.tight_sets, key=lambda A: (len(A), sorted(A))):
        idx = sorted(A)
        fa = ctx.F(idx)
        for signs in itertools.product((1.0, -1.0), repeat=len(idx)):
            v = np.zeros(ctx.p)
            v[idx] = np.array(signs) / fa
            pts.append(v)
    pts = np.array(pts)
    if certify is None:
        certify = ctx.p <= EXTREMALITY_MAX_P
    if certify:
        gens = _dual_ball_generators(ctx)
        bad = [v for v in pts if not is_extreme_point(ctx, v, gens)]
        if bad:
            raise AssertionError(f"{len(bad)} candidate points are not vertices of the unit ball")
    return pts

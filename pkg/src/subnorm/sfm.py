"""Submodular function minimisation.

Small ground sets are minimised by enumeration. Larger ones go through Wolfe's
minimum-norm-point algorithm over the base polytope
``B(G) = {s : s(A) <= G(A) for all A, s(V) = G(V)}``. The negative entries of
the minimum-norm point mark a minimiser. The same point certifies optimality:
``min_A G(A) = sum_k min(0, s_k)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .setfn import BRUTE_FORCE_MAX_P, CapabilityError, subset_bits

__all__ = [
    "MnpState",
    "MinimizationResult",
    "MnpNotConverged",
    "SFMError",
    "base_vertex",
    "linear_oracle",
    "min_norm_point",
    "wolfe",
    "minimize",
    "brute_force_minimize",
]

# relative Wolfe-gap tolerance; the point error scales like its square root
DEFAULT_TOL = 1e-14
# corral entries equal after rounding at this relative level count as duplicates
DEDUP_TOL = 1e-13
JITTER = 1e-12


class MnpNotConverged(RuntimeError):
    """Wolfe's method hit its iteration cap; ``state`` holds the best iterate."""

    def __init__(self, msg, state):
        super().__init__(msg)
        self.state = state


class SFMError(RuntimeError):
    """The duality gap of a minimisation result exceeds its tolerance."""

    def __init__(self, msg, candidates):
        super().__init__(msg)
        self.candidates = candidates


@dataclass
class MnpState:
    """Iterate of Wolfe's algorithm: ``x = weights @ corral``."""

    x: np.ndarray
    corral: np.ndarray
    weights: np.ndarray
    major_iterations: int = 0
    minor_iterations: int = 0
    gap: float = np.inf
    tol: float = DEFAULT_TOL
    converged: bool = False
    norms: list = field(default_factory=list)


@dataclass
class MinimizationResult:
    argmin: frozenset
    value: float
    certificate: np.ndarray
    gap: float
    iterations: int
    method: str
    # final Wolfe state (corral and weights), usable as a warm start
    state: object = field(default=None, repr=False)

    def to_dict(self):
        return {
            "argmin": sorted(k + 1 for k in self.argmin),
            "value": self.value,
            "gap": self.gap,
            "iterations": self.iterations,
            "method": self.method,
        }


def base_vertex(G, perm):
    """Greedy vertex of ``B(G)`` for the ordering ``perm``."""
    perm = np.asarray(perm, dtype=np.int64)
    s = np.empty(G.p)
    s[perm] = np.diff(G.chain(perm))
    return s


def linear_oracle(G, d):
    """Vertex of ``B(G)`` minimising ``d @ s`` (sort ``d`` ascending, ties by index)."""
    return base_vertex(G, np.argsort(np.asarray(d, dtype=float), kind="stable"))


def _affine_minimizer(V):
    """Weights ``a`` with ``sum(a) = 1`` minimising ``||a @ V||``."""
    m = V.shape[0]
    if m == 1:
        return np.ones(1)
    gram = V @ V.T
    M = np.zeros((m + 1, m + 1))
    M[:m, :m] = gram
    M[:m, m] = 1.0
    M[m, :m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        sol = np.linalg.solve(M, rhs)
        if np.all(np.isfinite(sol)):
            return sol[:m]
    except np.linalg.LinAlgError:
        pass
    M[:m, :m] += JITTER * max(1.0, np.trace(gram)) * np.eye(m)
    sol = np.linalg.lstsq(M, rhs, rcond=None)[0]
    return sol[:m]


def _minor_cycles(V, a, state):
    """Move the convex weights ``a`` to the min-norm point of ``conv(V)``.

    Wolfe's minor cycles: step towards the affine minimiser of the corral
    and drop vertices whose weight hits zero.
    """
    while True:
        state.minor_iterations += 1
        alpha = _affine_minimizer(V)
        if alpha.min() > -1e-12:
            a = np.maximum(alpha, 0.0)
            a /= a.sum()
            keep = a > 0
            return V[keep], a[keep]
        neg = alpha < a
        theta = min(1.0, float(np.min(a[neg] / (a[neg] - alpha[neg])))) if neg.any() else 1.0
        a = theta * alpha + (1.0 - theta) * a
        a[a < 1e-15] = 0.0
        keep = a > 0
        V, a = V[keep], a[keep]
        a /= a.sum()


def wolfe(lmo, corral, weights=None, tol=DEFAULT_TOL, max_major=None, stop=None):
    """Minimum-norm point of the polytope whose linear oracle is ``lmo``.

    ``lmo(x)`` must return the vertex minimising ``x @ v``. ``corral`` holds
    starting vertices (rows) and ``weights`` their convex weights. Stops when
    Wolfe's gap ``||x||^2 - x @ v`` falls below ``tol`` times the squared
    vertex scale, or as soon as ``stop(x, v)`` returns True.
    """
    V = np.atleast_2d(np.asarray(corral, dtype=float)).copy()
    p = V.shape[1]
    a = np.full(V.shape[0], 1.0 / V.shape[0]) if weights is None else np.asarray(weights, float).copy()
    if max_major is None:
        max_major = 100 * p * p + 10
    state = MnpState(x=a @ V, corral=V, weights=a, tol=tol)
    if V.shape[0] > 1:
        # a warm-start corral carries weights tuned for another polytope
        V, a = _minor_cycles(V, a, state)
    x = a @ V
    best = float(x @ x)
    state.norms.append(best)
    for major in range(max_major):
        v = lmo(x)
        xx = float(x @ x)
        scale = max(float(v @ v), float(np.max(np.einsum("ij,ij->i", V, V))), 1e-300)
        gap = xx - float(x @ v)
        state.gap = gap
        state.major_iterations = major + 1
        if gap <= tol * scale or (stop is not None and stop(x, v)):
            state.converged = True
            break
        if np.any(np.max(np.abs(V - v), axis=1) <= DEDUP_TOL * np.sqrt(scale)):
            # x is optimal on the corral, so the oracle repeating a corral
            # vertex means only round-off is left
            state.converged = gap <= np.sqrt(tol) * scale
            break
        V, a = _minor_cycles(np.vstack([V, v]), np.append(a, 0.0), state)
        x = a @ V
        xx_new = float(x @ x)
        # norm is monotone across major cycles up to round-off
        assert xx_new <= best + 1e-9 * scale, "min-norm-point norm increased"
        state.norms.append(xx_new)
        if xx_new >= best - 1e-16 * scale:
            # no decrease: round-off floor reached before the gap test fired
            state.gap = xx_new - float(x @ lmo(x))
            state.converged = state.gap <= np.sqrt(tol) * scale
            break
        best = xx_new
    state.x, state.corral, state.weights = x, V, a
    if not state.converged:
        raise MnpNotConverged(
            f"min-norm-point did not converge in {state.major_iterations} major cycles (gap {state.gap:.3e})",
            state,
        )
    return x, state


def _level_gap(x, v):
    """Duality gap ``min_k G(level set k) - x^-(V)`` for the greedy vertex ``v`` at ``x``."""
    vals = np.cumsum(v[np.argsort(x, kind="stable")])
    return min(0.0, float(vals.min())) - float(np.minimum(x, 0.0).sum())


def min_norm_point(G, tol=DEFAULT_TOL, max_major=None, init=None, gap_stop=None):
    """Projection of the origin onto ``B(G)`` by Wolfe's method.

    ``init`` optionally gives ``(corral, weights)`` of vertices of ``B(G)`` to
    warm start from; by default the identity-order greedy vertex is used.
    ``gap_stop`` ends the run once the level sets of the iterate certify a
    minimiser of ``G`` within that absolute gap; the point itself may then
    be inexact.
    """
    if init is None:
        corral, weights = base_vertex(G, np.arange(G.p))[None, :], None
    else:
        corral, weights = init
    stop = None if gap_stop is None else (lambda x, v: _level_gap(x, v) <= gap_stop)
    return wolfe(lambda d: linear_oracle(G, d), corral, weights, tol=tol, max_major=max_major, stop=stop)


def _sweep(G, x, which):
    """Best level set ``{k : x_k <= c}`` of an approximate min-norm point.

    One chain call along ``argsort(x)`` evaluates every level set, so the
    rounding does not depend on a threshold for near-zero entries.
    """
    order = np.argsort(x, kind="stable")
    vals = G.chain(order)
    best = float(vals.min())
    tol = 1e-12 * max(1.0, float(np.abs(vals).max()))
    ok = np.flatnonzero(vals <= best + tol)
    m = int(ok.max() if which == "maximal" else ok.min())
    A = np.zeros(G.p, dtype=bool)
    A[order[:m]] = True
    return A, float(vals[m])


def _threshold_candidates(x, scale):
    delta = 1e-9 * max(1.0, scale)
    return [x < 0, x <= 0, x < -delta, x <= delta]


def brute_force_minimize(G, which="minimal", rtol=1e-10):
    """Enumerate all subsets; returns ``(mask, value)``.

    ``which`` selects the minimal (intersection of all minimisers) or maximal
    (union) minimiser; both are minimisers for submodular ``G``.
    """
    if G.p > BRUTE_FORCE_MAX_P:
        raise CapabilityError(f"brute-force minimisation is limited to p <= {BRUTE_FORCE_MAX_P}")
    t = G.table()
    bits = subset_bits(G.p)
    best = float(t.min())
    tol = rtol * max(1.0, abs(best), float(np.abs(t).max()) * 1e-2)
    near = bits[t <= best + tol]
    if which == "maximal":
        A = near.any(axis=0)
    elif which == "minimal":
        A = near.all(axis=0)
    else:
        A = bits[int(np.argmin(t))].copy()
    val = G(A)
    if val > best + tol:
        A = bits[int(np.argmin(t))].copy()
        val = best
    return A, val


def minimize(G, method="auto", tol=DEFAULT_TOL, which="minimal", gap_tol=1e-6, init=None, gap_stop=None):
    """Minimise a submodular ``G`` and certify the result.

    ``method`` is ``"brute"``, ``"mnp"`` or ``"auto"`` (brute force up to
    ``p = 12``). The certificate always comes from the min-norm point, which
    ``init`` and ``gap_stop`` are passed to (see :func:`min_norm_point`).
    With ``gap_stop`` the returned set is a minimiser up to that gap but not
    necessarily the minimal or maximal one.
    """
    x, state = min_norm_point(G, tol=tol, init=init, gap_stop=gap_stop)
    if method == "auto":
        method = "brute" if G.p <= BRUTE_FORCE_MAX_P else "mnp"
    if method == "brute":
        A, val = brute_force_minimize(G, which)
    elif method == "mnp":
        A, val = _sweep(G, x, which)
    else:
        raise ValueError(f"unknown method {method!r}")
    cert = float(np.minimum(x, 0.0).sum())
    gap = val - cert
    if gap > gap_tol * (1.0 + abs(val)):
        cands = [frozenset(np.flatnonzero(m).tolist()) for m in _threshold_candidates(x, 1.0)]
        raise SFMError(f"duality gap {gap:.3e} above tolerance", cands)
    return MinimizationResult(
        argmin=frozenset(np.flatnonzero(A).tolist()),
        value=float(val),
        certificate=x,
        gap=float(gap),
        iterations=state.major_iterations,
        method=method,
        state=state,
    )

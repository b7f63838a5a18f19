"""Support-recovery and consistency quantities for structured norms.

Notation: ``J`` is a set of indices, ``Jc`` its complement, ``Omega_J`` the
norm of the restriction ``F_J`` and ``Omega^J`` the norm of the contraction
``F^J(A) = F(A | J) - F(J)`` on ``Jc``. For every ``w``,

    Omega(w) >= Omega_J(w_J) + Omega^J(w_Jc) >= Omega_J(w_J) + rho(J) Omega_Jc(w_Jc),

with equality in the first step when ``min_J |w| >= max_Jc |w|``.
``Omega^J`` is a norm exactly when ``J`` is stable.

The equivalence constant ``c(J) = sup Omega_J(w) / ||w||_2`` is a support
function of the polytope ``P(F_J)`` evaluated over the Euclidean unit ball,
so it is the largest Euclidean norm of a vertex of that polytope. The
vertices are the greedy gain vectors, one per ordering of ``J``.
"""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import LinAlgError, RngStream, solve_spd, sym_eig
from .lovasz import NormContext, dual_norm, omega
from .setfn import (
    TABLE_MAX_P,
    CapabilityError,
    Contraction,
    Restriction,
    as_mask,
    is_stable,
    smallest_stable_superset,
    stable_inseparable_sets,
    subset_bits,
)

__all__ = [
    "RecoveryReport",
    "ConsistencyBound",
    "PatternReport",
    "rho",
    "equivalence_constant",
    "restricted_norm",
    "contracted_norm",
    "decompose_norm",
    "support_recovery_condition",
    "restricted_eigenvalue",
    "consistency_bounds",
    "concentration_bound",
    "empirical_tail",
    "verify_stable_patterns",
]

RHO_MAX_COMPLEMENT = 16
EQUIV_EXACT_MAX = 8


def _lovasz_abs(F, w):
    """``f(|w|)`` straight from the chain; no positivity requirement on ``F``."""
    a = np.abs(np.asarray(w, dtype=float))
    nnz = int(np.count_nonzero(a))
    if nnz == 0:
        return 0.0
    perm = np.argsort(-a, kind="stable")
    return float(a[perm[:nnz]] @ np.diff(F.chain(perm, upto=nnz)))


def restricted_norm(F, J, wJ):
    """``Omega_J`` evaluated on a vector indexed like ``sorted(J)``."""
    return _lovasz_abs(Restriction(F, J), wJ)


def contracted_norm(F, J, wJc):
    """``Omega^J`` evaluated on a vector indexed like the complement of ``J``."""
    return _lovasz_abs(Contraction(F, J), wJc)


def rho(F, J):
    """``min over nonempty B in Jc of (F(B | J) - F(J)) / F(B)``.

    Exhaustive over subsets of the complement (``|Jc| <= 16``). The ratio of
    two submodular functions has no parametric submodular reduction, so no
    larger cases are attempted. Returns 1 when ``Jc`` is empty, and 0 when
    ``J`` is not stable.
    """
    Jmask = as_mask(J, F.p)
    Jc = np.flatnonzero(~Jmask)
    if len(Jc) == 0:
        return 1.0
    if len(Jc) > RHO_MAX_COMPLEMENT:
        raise CapabilityError(f"rho is limited to |Jc| <= {RHO_MAX_COMPLEMENT}")
    bits = subset_bits(len(Jc))[1:]
    if F.p <= TABLE_MAX_P:
        t = F.table()
        weights = 1 << Jc.astype(np.int64)
        jint = int(np.sum(1 << np.flatnonzero(Jmask).astype(np.int64)))
        b = bits.astype(np.int64) @ weights
        num = t[b | jint] - t[jint]
        den = t[b]
    else:
        C = Contraction(F, Jmask)
        num = np.array([C(m) for m in bits])
        den = np.empty(len(bits))
        for i, m in enumerate(bits):
            big = np.zeros(F.p, dtype=bool)
            big[Jc[m]] = True
            den[i] = F(big)
    return float(max(0.0, np.min(num / den)))


def _gain_vectors(F, J):
    """All greedy gain vectors of ``F_J`` (one row per ordering of ``J``)."""
    R = Restriction(F, J)
    m = R.p
    t = R.table()
    perms = np.array(list(itertools.permutations(range(m))), dtype=np.int64)
    prefix = np.cumsum((1 << perms), axis=1)
    vals = t[prefix]
    gains = np.diff(np.concatenate([np.zeros((len(perms), 1)), vals], axis=1), axis=1)
    out = np.empty_like(gains)
    np.put_along_axis(out, perms, gains, axis=1)
    return out


def equivalence_constant(F, J, exact_max=EQUIV_EXACT_MAX):
    """``c(J) = sup Omega_J(w_J) / ||w_J||_2``.

    Exact (largest Euclidean norm over greedy vertices) when ``|J| <= 8``;
    otherwise the bound ``|J|^(1/2) max_k F({k})``.
    """
    idx = np.flatnonzero(as_mask(J, F.p))
    if len(idx) == 0:
        return 0.0
    if len(idx) > exact_max:
        return float(np.sqrt(len(idx)) * F.singletons().max())
    return float(np.max(np.linalg.norm(_gain_vectors(F, idx), axis=1)))


def decompose_norm(F, J, w, rtol=1e-12):
    """Both sides of ``Omega(w) >= Omega_J(w_J) + Omega^J(w_Jc)``.

    Returns ``(lhs, rhs, ordered)``; ``ordered`` is True when
    ``min_J |w| >= max_Jc |w|``, in which case equality holds.
    """
    w = np.asarray(w, dtype=float)
    Jmask = as_mask(J, F.p)
    lhs = _lovasz_abs(F, w)
    if not Jmask.any():
        return lhs, lhs, True
    if Jmask.all():
        return lhs, lhs, True
    rhs = restricted_norm(F, Jmask, w[Jmask]) + contracted_norm(F, Jmask, w[~Jmask])
    a = np.abs(w)
    ordered = bool(a[Jmask].min() >= a[~Jmask].max())
    assert lhs >= rhs - rtol * max(1.0, lhs), "decomposition inequality violated"
    if ordered:
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, lhs), "decomposition equality violated"
    return lhs, rhs, ordered


# ---------------------------------------------------------------------------
# concentration


def concentration_bound(F, Q, t):
    """Upper bound on ``P(Omega*(z) > t)`` for ``z ~ N(0, Q)``.

    ``sum over stable inseparable A of 2^|A| exp(-t^2 F(A)^2 / (2 1^T Q_AA 1))``.
    Returns ``(clipped, raw)`` with the clipped value in ``[0, 1]``.
    """
    Q = np.asarray(Q, dtype=float)
    rep = stable_inseparable_sets(F)
    raw = 0.0
    for A in rep.stable_inseparable_sets:
        idx = sorted(A)
        var = float(Q[np.ix_(idx, idx)].sum())
        if var <= 0:
            continue
        raw += 2.0 ** len(idx) * np.exp(-(t * t) * F(idx) ** 2 / (2.0 * var))
    return min(1.0, raw), raw


def _dual_norms_many(F, Z, chunk=4096):
    """``Omega*`` of every row of ``Z`` by enumerating all subsets."""
    bits = subset_bits(F.p)[1:].astype(float)
    inv = 1.0 / F.table()[1:]
    out = np.empty(Z.shape[0])
    for i in range(0, Z.shape[0], chunk):
        out[i : i + chunk] = np.max((np.abs(Z[i : i + chunk]) @ bits.T) * inv, axis=1)
    return out


def empirical_tail(F, Q, t, draws, stream):
    """Monte-Carlo estimate of ``P(Omega*(z) > t)`` for ``z ~ N(0, Q)``."""
    Q = np.asarray(Q, dtype=float)
    ev, V = sym_eig(Q, vectors=True)
    root = V * np.sqrt(np.maximum(ev, 0.0))
    Z = stream.normal((draws, F.p)) @ root.T
    d = _dual_norms_many(F, Z)
    return float(np.mean(d > t))


# ---------------------------------------------------------------------------
# support recovery


@dataclass
class RecoveryReport:
    J: list
    stable: bool
    rho: float
    c: float
    kappa: float
    irrepresentability: float
    eta: float
    nu: float
    lam: float
    lam_threshold: float
    sigma: float
    n: int
    t: float
    failure_bound: float
    condition_holds: bool
    notes: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["J"] = [k + 1 for k in self.J]
        return d


def _irrepresentability(F, Q, J):
    Jmask = as_mask(J, F.p)
    if Jmask.all():
        return 0.0
    jj = np.flatnonzero(Jmask)
    jc = np.flatnonzero(~Jmask)
    B = solve_spd(Q[np.ix_(jj, jj)], Q[np.ix_(jj, jc)])
    R = Restriction(F, jj)
    col_norms = np.array([_lovasz_abs(R, B[:, i]) for i in range(len(jc))])
    return dual_norm(NormContext(Contraction(F, Jmask)), col_norms)


def support_recovery_condition(problem, F, w_star, sigma, lam):
    """Evaluate the sufficient condition for exact support recovery.

    ``J`` is the smallest stable set containing the support of ``w_star``.
    The condition holds when ``kappa = lambda_min(Q_JJ) > 0``, the
    irrepresentability value is ``<= 1 - eta`` with ``eta > 0``, and
    ``lam <= kappa nu / (2 c(J))``. The failure probability is then at most
    three times the concentration bound at ``t = lam eta rho sqrt(n) / (2 sigma)``.
    """
    w_star = np.asarray(w_star, dtype=float)
    supp = np.flatnonzero(w_star != 0)
    if supp.size == 0:
        raise ValueError("w_star has empty support")
    Q = problem.Q
    J = sorted(smallest_stable_superset(F, supp))
    notes = []
    stable = is_stable(F, J)
    r = rho(F, J)
    c = equivalence_constant(F, J)
    nu = float(np.min(np.abs(w_star[supp])))
    kappa = float(sym_eig(Q[np.ix_(J, J)])[0])
    v = np.inf
    if kappa > 1e-12 * max(1.0, float(np.abs(Q).max())):
        try:
            v = _irrepresentability(F, Q, J)
        except LinAlgError:
            pass
    if not np.isfinite(v):
        kappa = 0.0
        notes.append("Q_JJ is singular")
    eta = 1.0 - v
    thr = kappa * nu / (2.0 * c) if c > 0 else np.inf
    holds = bool(kappa > 0 and eta > 0 and lam <= thr)
    t = lam * eta * r * np.sqrt(problem.n) / (2.0 * sigma) if eta > 0 else 0.0
    fb = min(1.0, 3.0 * concentration_bound(F, Q, t)[1]) if F.p <= 12 else np.nan
    return RecoveryReport(
        J=J,
        stable=stable,
        rho=r,
        c=c,
        kappa=kappa,
        irrepresentability=float(v),
        eta=float(eta),
        nu=nu,
        lam=float(lam),
        lam_threshold=float(thr),
        sigma=float(sigma),
        n=problem.n,
        t=float(t),
        failure_bound=float(fb),
        condition_holds=holds,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# consistency


def _in_cone(F, Jmask, d, slack=3.0):
    return contracted_norm(F, Jmask, d[~Jmask]) <= slack * restricted_norm(F, Jmask, d[Jmask]) * (1 + 1e-12)


def restricted_eigenvalue(F, Q, J, samples, stream, descent_steps=50):
    """Sampled estimate of ``min d^T Q d / ||d_J||^2`` over the cone
    ``Omega^J(d_Jc) <= 3 Omega_J(d_J)``.

    Random cone directions are followed by a short randomised descent from the
    best one. The estimate can only overshoot the true minimum. Returns
    ``(estimate, lower)`` where ``lower = lambda_min(Q)`` is a certified lower
    bound (possibly 0).
    """
    Q = np.asarray(Q, dtype=float)
    Jmask = as_mask(J, F.p)
    if Jmask.all():
        ev = float(sym_eig(Q)[0])
        return ev, ev
    lower = max(0.0, float(sym_eig(Q)[0]))

    def ratio(d):
        return float(d @ Q @ d) / float(d[Jmask] @ d[Jmask])

    best, best_d = np.inf, None
    for _ in range(samples):
        d = np.zeros(F.p)
        d[Jmask] = stream.normal(int(Jmask.sum()))
        out = stream.normal(int((~Jmask).sum()))
        budget = 3.0 * restricted_norm(F, Jmask, d[Jmask])
        scale = contracted_norm(F, Jmask, out)
        if scale > 0:
            d[~Jmask] = out * (budget / scale) * float(stream.uniform()) ** 0.5
        val = ratio(d)
        if val < best:
            best, best_d = val, d
    step = 0.5
    for _ in range(descent_steps):
        cand = best_d + step * np.linalg.norm(best_d) * stream.normal(F.p) / np.sqrt(F.p)
        if cand[Jmask].any() and _in_cone(F, Jmask, cand):
            val = ratio(cand)
            if val < best:
                best, best_d = val, cand
                continue
        step *= 0.8
    return best, lower


@dataclass
class ConsistencyBound:
    J: list
    rho: float
    c: float
    kappa: float
    kappa_lower: float
    lam: float
    omega_bound: float
    prediction_bound: float
    event_threshold: float

    def to_dict(self):
        d = asdict(self)
        d["J"] = [k + 1 for k in self.J]
        return d


def consistency_bounds(problem, F, w_star, lam, sample_count=200, stream=None):
    """Error bounds ``24 c^2 lam / (kappa rho^2)`` on ``Omega(w_hat - w_star)`` and
    ``36 c^2 lam^2 / (kappa rho^2)`` on the prediction error.

    They hold on the event ``Omega*(X^T eps / n) <= lam rho / 2``
    (``event_threshold``). ``kappa`` is the sampled restricted-eigenvalue
    estimate, which overshoots, so the bounds computed from it may be too
    small; ``kappa_lower`` gives the certified fallback.
    """
    stream = stream or RngStream(0)
    w_star = np.asarray(w_star, dtype=float)
    J = sorted(smallest_stable_superset(F, np.flatnonzero(w_star != 0)))
    r = rho(F, J)
    c = equivalence_constant(F, J)
    kappa, lower = restricted_eigenvalue(F, problem.Q, J, sample_count, stream)
    k = c * c / (kappa * r * r) if kappa > 0 and r > 0 else np.inf
    return ConsistencyBound(
        J=J,
        rho=r,
        c=c,
        kappa=kappa,
        kappa_lower=lower,
        lam=float(lam),
        omega_bound=24.0 * k * lam,
        prediction_bound=36.0 * k * lam * lam,
        event_threshold=lam * r / 2.0,
    )


# ---------------------------------------------------------------------------
# allowed sparsity patterns


@dataclass
class PatternReport:
    trials: int
    violations: int
    supports: dict
    offending: list

    def to_dict(self):
        return {
            "trials": self.trials,
            "violations": self.violations,
            "supports": {",".join(str(k + 1) for k in sorted(A)): c for A, c in self.supports.items()},
            "offending": self.offending,
        }


def verify_stable_patterns(F, trials, n, stream, lam_ratio=None, threshold=1e-8):
    """Solve random regularized least-squares problems and check that every
    support is a stable set.

    Each trial draws a Gaussian design (``n >= p`` so ``X^T X`` is
    invertible) and a Gaussian response. ``lam`` is ``lam_ratio`` times the
    smallest value giving ``w = 0``; by default the ratio is drawn uniformly
    in ``(0.05, 0.95)`` per trial so that many patterns appear.
    """
    from .solvers import LeastSquaresProblem, SolverOptions, fista, lambda_max

    p = F.p
    if n < p:
        raise ValueError("pattern check needs n >= p")
    ctx = NormContext(F)
    stable = set(stable_inseparable_sets(F).stable_sets) if p <= 12 else None
    opts = SolverOptions(max_iter=20000, rel_tol=1e-12, opt_tol=1e-9)
    supports, offending = {}, []
    for i in range(trials):
        X = stream.normal((n, p))
        y = stream.normal(n)
        prob = LeastSquaresProblem(X, y)
        ratio = lam_ratio if lam_ratio is not None else float(stream.uniform(0.05, 0.95))
        lam = ratio * lambda_max(prob, ctx)
        w = fista(prob, ctx, lam, opts).w
        A = frozenset(np.flatnonzero(np.abs(w) > threshold).tolist())
        supports[A] = supports.get(A, 0) + 1
        ok = A in stable if stable is not None else is_stable(F, sorted(A))
        if not ok:
            offending.append({"trial": i, "lam": lam, "support": sorted(k + 1 for k in A),
                              "w": w.tolist(), "X": X.tolist(), "y": y.tolist()})
    return PatternReport(trials=trials, violations=len(offending), supports=supports, offending=offending)

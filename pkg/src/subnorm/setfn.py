"""Set functions on a ground set ``{0, ..., p-1}`` and their combinatorial structure.

A :class:`SetFunction` maps subsets to reals with ``F(empty) = 0``. The built-in
families are nondecreasing and submodular and are validated when constructed.
Subsets may be passed either as iterables of indices or as boolean masks of
length ``p``.

Two evaluation paths exist. ``F(A)`` evaluates a single set, and
``F.chain(perm)`` evaluates all prefixes of a permutation at once. The greedy
algorithm and everything built on it only use ``chain``, so families override
it with vectorised code.

Stability is tested one element at a time. If ``F(A + k) = F(A)`` fails for
every single ``k``, then no larger superset can keep ``F`` constant either.
Suppose ``F(B) = F(A)`` for some ``B > A``. Monotonicity then gives
``F(A + k) <= F(B)`` for each ``k`` in ``B - A``. Submodularity gives
``sum_k [F(A + k) - F(A)] >= F(B) - F(A) = 0``. Monotonicity makes every term
nonnegative, so every term is zero.

Separability is tested with binary splits only. Submodularity and
``F(empty) = 0`` make ``F`` subadditive on disjoint sets, so any partition
with ``F(A) = sum F(B_i)`` can be grouped into ``B_1`` and ``A - B_1`` with
equality.
"""
from __future__ import annotations

import itertools
import json
import threading
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

__all__ = [
    "CapabilityError",
    "SetFunctionError",
    "SetFunction",
    "Cardinality",
    "WeightedCardinality",
    "ConcaveCardinality",
    "GroupCover",
    "RangePlusConstant",
    "IntervalCount",
    "Power",
    "LogShift",
    "Spectral",
    "SumFunction",
    "FromCallable",
    "ModularShift",
    "Restriction",
    "Contraction",
    "StructureReport",
    "as_mask",
    "subset_table",
    "subset_bits",
    "is_submodular",
    "is_nondecreasing",
    "is_stable",
    "is_separable",
    "stable_inseparable_sets",
    "smallest_stable_superset",
    "restrict",
    "contract",
    "from_config",
    "load_config",
]

# Hard caps for exhaustive enumeration.
BRUTE_FORCE_MAX_P = 12
TABLE_MAX_P = 16


class SetFunctionError(ValueError):
    """Invalid set-function parameters or subset arguments."""


class CapabilityError(RuntimeError):
    """An exhaustive routine was asked to run beyond its size cap."""


def as_mask(A, p):
    """Boolean mask of length ``p`` for a subset given as mask or indices."""
    if isinstance(A, np.ndarray) and A.dtype == bool:
        if A.shape != (p,):
            raise SetFunctionError(f"mask has shape {A.shape}, expected ({p},)")
        return A
    idx = np.fromiter((int(k) for k in A), dtype=np.int64)
    if idx.size and (idx.min() < 0 or idx.max() >= p):
        raise SetFunctionError(f"subset {sorted(idx.tolist())} is not contained in 0..{p - 1}")
    mask = np.zeros(p, dtype=bool)
    mask[idx] = True
    return mask


@lru_cache(maxsize=None)
def subset_bits(p):
    """``(2**p, p)`` boolean array; row ``m`` is the subset encoded by ``m``."""
    m = np.arange(1 << p, dtype=np.int64)
    bits = ((m[:, None] >> np.arange(p)) & 1).astype(bool)
    bits.setflags(write=False)
    return bits


def _mask_to_int(mask):
    return int(np.dot(mask.astype(np.int64), 1 << np.arange(mask.size, dtype=np.int64)))


def _tol(scale, rtol=1e-12):
    return rtol * max(1.0, abs(scale))


class SetFunction:
    """Base class. Subclasses implement ``_eval(mask)``.

    Instances are immutable after construction. The lazily built value table
    is guarded by a lock so concurrent readers are safe.
    """

    kind = "generic"

    def __init__(self, p):
        p = int(p)
        if p < 1:
            raise SetFunctionError("ground set must have p >= 1 elements")
        self.p = p
        self._lock = threading.Lock()
        self._table = None
        self.degenerate = False

    def _eval(self, mask):
        raise NotImplementedError

    def __call__(self, A):
        mask = as_mask(A, self.p)
        if not mask.any():
            return 0.0
        return float(self._eval(mask))

    def chain(self, perm, upto=None):
        """``F`` on the prefixes of ``perm``: entry ``k`` is ``F(perm[:k])``.

        Only the first ``upto`` prefixes are computed when given.
        """
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        out = np.zeros(m + 1)
        mask = np.zeros(self.p, dtype=bool)
        for k in range(m):
            mask[perm[k]] = True
            out[k + 1] = self._eval(mask)
        return out

    def singletons(self):
        eye = np.eye(self.p, dtype=bool)
        return np.array([self._eval(eye[k]) for k in range(self.p)])

    def table(self):
        """Values on all ``2**p`` subsets, indexed by bitmask (cached)."""
        if self._table is None:
            if self.p > TABLE_MAX_P:
                raise CapabilityError(f"subset table needs p <= {TABLE_MAX_P}, got {self.p}")
            with self._lock:
                if self._table is None:
                    t = self._build_table()
                    t.setflags(write=False)
                    self._table = t
        return self._table

    def _build_table(self):
        bits = subset_bits(self.p)
        vals = np.zeros(bits.shape[0])
        for m in range(1, bits.shape[0]):
            vals[m] = self._eval(bits[m])
        return vals

    def _validate(self, rtol=1e-12):
        single = self.singletons()
        if np.any(~np.isfinite(single)) or np.any(single <= 0):
            bad = [int(k) for k in np.flatnonzero(~(single > 0))]
            raise SetFunctionError(f"F must be positive on singletons; fails at {bad}")

    def __repr__(self):
        return f"{type(self).__name__}(p={self.p})"


class Cardinality(SetFunction):
    kind = "cardinality"

    def __init__(self, p):
        super().__init__(p)

    def _eval(self, mask):
        return float(mask.sum())

    def chain(self, perm, upto=None):
        m = len(perm) if upto is None else int(upto)
        return np.arange(m + 1, dtype=float)

    def _build_table(self):
        return subset_bits(self.p).sum(axis=1).astype(float)


class WeightedCardinality(SetFunction):
    kind = "weighted_cardinality"

    def __init__(self, weights):
        w = np.asarray(weights, dtype=float).ravel()
        super().__init__(w.size)
        if np.any(w < 0):
            raise SetFunctionError("weights must be nonnegative")
        self.weights = w
        self._validate()

    def _eval(self, mask):
        return float(self.weights[mask].sum())

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        return np.concatenate([[0.0], np.cumsum(self.weights[perm[:m]])])

    def _build_table(self):
        return subset_bits(self.p) @ self.weights


class ConcaveCardinality(SetFunction):
    """``F(A) = h(|A|)`` for a tabulated nondecreasing concave ``h`` with ``h(0) = 0``."""

    kind = "concave_cardinality"

    def __init__(self, h, rtol=1e-12):
        h = np.asarray(h, dtype=float).ravel()
        if h.size < 2:
            raise SetFunctionError("h must be tabulated on 0..p")
        super().__init__(h.size - 1)
        if h[0] != 0.0:
            raise SetFunctionError("h(0) must be 0")
        d = np.diff(h)
        tol = _tol(np.abs(h).max(), rtol)
        if np.any(d < -tol):
            raise SetFunctionError("h must be nondecreasing")
        if np.any(np.diff(d) > tol):
            raise SetFunctionError("h must be concave")
        self.h = h
        self._validate()

    @classmethod
    def from_function(cls, p, fn):
        """Tabulate ``fn`` on ``0..p``, e.g. ``from_function(p, np.sqrt)``."""
        return cls([0.0] + [float(fn(k)) for k in range(1, p + 1)])

    def _eval(self, mask):
        return float(self.h[mask.sum()])

    def chain(self, perm, upto=None):
        m = len(perm) if upto is None else int(upto)
        return self.h[: m + 1].copy()

    def _build_table(self):
        return self.h[subset_bits(self.p).sum(axis=1)]


class GroupCover(SetFunction):
    """``F(A) = sum of d(G)`` over the groups ``G`` that intersect ``A``."""

    kind = "group_cover"

    def __init__(self, p, groups, weights=None):
        super().__init__(p)
        groups = [sorted(set(int(k) for k in g)) for g in groups]
        if weights is None:
            weights = np.ones(len(groups))
        weights = np.asarray(weights, dtype=float).ravel()
        if len(weights) != len(groups):
            raise SetFunctionError("one weight per group is required")
        if np.any(weights < 0):
            raise SetFunctionError("group weights must be nonnegative")
        inc = np.zeros((len(groups), self.p), dtype=bool)
        for i, g in enumerate(groups):
            if not g:
                raise SetFunctionError("groups must be nonempty")
            inc[i] = as_mask(g, self.p)
        self.groups = groups
        self.weights = weights
        self._incidence = inc
        self._validate()

    def _eval(self, mask):
        hit = (self._incidence & mask).any(axis=1)
        return float(self.weights[hit].sum())

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        pos = np.empty(self.p, dtype=np.int64)
        pos[perm] = np.arange(len(perm))
        big = np.where(self._incidence, pos[None, :], self.p)
        first = big.min(axis=1)
        gain = np.bincount(np.minimum(first, self.p), weights=self.weights, minlength=self.p + 1)
        return np.concatenate([[0.0], np.cumsum(gain[:m])])

    def _build_table(self):
        hits = (subset_bits(self.p).astype(np.int64) @ self._incidence.T.astype(np.int64)) > 0
        return hits @ self.weights


class RangePlusConstant(SetFunction):
    """``F(A) = p - 2 + range(A)`` for nonempty ``A``, ``range = max - min + 1``."""

    kind = "range"

    def __init__(self, p):
        super().__init__(p)
        if self.p < 2:
            raise SetFunctionError("range function needs p >= 2 to be positive on singletons")
        self._validate()

    def _eval(self, mask):
        idx = np.flatnonzero(mask)
        return float(self.p - 2 + idx[-1] - idx[0] + 1)

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        pre = perm[:m]
        rng = np.maximum.accumulate(pre) - np.minimum.accumulate(pre) + 1
        return np.concatenate([[0.0], self.p - 2 + rng.astype(float)])


class IntervalCount(SetFunction):
    """``F(A) = |A|`` plus the number of maximal runs of consecutive indices in ``A``."""

    kind = "interval_count"

    def __init__(self, p):
        super().__init__(p)
        self._validate()

    def _eval(self, mask):
        m = mask.astype(np.int8)
        starts = np.count_nonzero(np.diff(np.concatenate([[0], m])) == 1)
        return float(m.sum() + starts)

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        pos = np.full(self.p + 2, np.iinfo(np.int64).max)
        pos[perm + 1] = np.arange(len(perm))
        j = perm[:m] + 1
        t = np.arange(m)
        left = pos[j - 1] < t
        right = pos[j + 1] < t
        # a new element opens an interval, or merges one or two existing ones
        gain = 2 - left.astype(int) - right.astype(int)
        return np.concatenate([[0.0], np.cumsum(gain).astype(float)])


@dataclass(frozen=True)
class Power:
    """Spectral weight ``h(x) = x**q`` with ``0 < q <= 1``."""

    q: float

    def __post_init__(self):
        if not 0.0 < self.q <= 1.0:
            raise SetFunctionError("power exponent must lie in (0, 1]")

    def __call__(self, ev):
        return np.power(ev, self.q)

    def of_singular_values(self, sv):
        return np.power(sv, 2.0 * self.q)


@dataclass(frozen=True)
class LogShift:
    """Spectral weight ``h(x) = log(1 + x / t)``, i.e. ``log(x + t)`` normalised so ``h(0) = 0``."""

    t: float

    def __post_init__(self):
        if not self.t > 0.0:
            raise SetFunctionError("log shift needs t > 0")

    def __call__(self, ev):
        return np.log1p(ev / self.t)

    def of_singular_values(self, sv):
        return np.log1p(sv * sv / self.t)


class Spectral(SetFunction):
    """``F(A) = tr h(Q_AA)`` for a PSD matrix ``Q`` given directly or as ``X^T X``.

    The eigenvalues of ``Q_AA`` are computed as squared singular values of
    the column block ``R[:, A]`` of a factor with ``R^T R = Q``. This avoids
    the loss of accuracy that ``h = sqrt`` suffers near zero eigenvalues.
    Values are cached by subset.
    """

    kind = "spectral"

    def __init__(self, Q=None, X=None, h=Power(0.5), cache=True):
        if (Q is None) == (X is None):
            raise SetFunctionError("give exactly one of Q or X")
        if X is not None:
            X = np.asarray(X, dtype=float)
            if X.ndim != 2:
                raise SetFunctionError("X must be a matrix")
            p = X.shape[1]
            if X.shape[0] > p:
                R = np.linalg.qr(X, mode="r")
            else:
                R = X.copy()
            Q = X.T @ X
        else:
            from .linalg import check_symmetric, clip_psd, sym_eig

            Q = check_symmetric(Q, tol=1e-10)
            p = Q.shape[0]
            ev, V = sym_eig(Q, vectors=True)
            ev = clip_psd(ev)
            R = (V * np.sqrt(ev)).T
        super().__init__(p)
        self.Q = Q
        self.h = h
        self._R = R
        self._cache = {} if cache else None
        self._cache_lock = threading.Lock()
        self._validate()

    def _eval(self, mask):
        if self._cache is not None:
            key = np.packbits(mask).tobytes()
            val = self._cache.get(key)
            if val is None:
                val = self._compute(mask)
                with self._cache_lock:
                    self._cache[key] = val
            return val
        return self._compute(mask)

    def _compute(self, mask):
        sv = np.linalg.svd(self._R[:, mask], compute_uv=False)
        return float(self.h.of_singular_values(sv).sum())

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        out = np.zeros(m + 1)
        if m == 0:
            return out
        # triangularise once; prefix k then lives in the leading k columns
        T = np.linalg.qr(self._R[:, perm[:m]], mode="r")
        r = T.shape[0]
        for k in range(1, min(r, m) + 1):
            sv = np.linalg.svd(T[:k, :k], compute_uv=False)
            out[k] = self.h.of_singular_values(sv).sum()
        if m > r:
            # past the rank the r x r Grams T_k T_k^T stay nonsingular, so
            # their eigenvalues give the singular values without loss
            G = np.cumsum(np.einsum("ik,jk->kij", T, T), axis=0)[r:]
            ev = np.maximum(np.linalg.eigvalsh(G), 0.0)
            out[r + 1 :] = self.h.of_singular_values(np.sqrt(ev)).sum(axis=1)
        return out


class SumFunction(SetFunction):
    """Nonnegative combination ``sum_i c_i F_i`` of set functions on one ground set."""

    kind = "sum"

    def __init__(self, functions, coefs=None):
        functions = list(functions)
        if not functions:
            raise SetFunctionError("need at least one term")
        super().__init__(functions[0].p)
        if coefs is None:
            coefs = np.ones(len(functions))
        coefs = np.asarray(coefs, dtype=float).ravel()
        if len(coefs) != len(functions) or np.any(coefs < 0):
            raise SetFunctionError("need one nonnegative coefficient per term")
        if any(f.p != self.p for f in functions):
            raise SetFunctionError("all terms must share the ground set")
        self.functions = functions
        self.coefs = coefs
        self._validate()

    def _eval(self, mask):
        return float(sum(c * f._eval(mask) for c, f in zip(self.coefs, self.functions)))

    def chain(self, perm, upto=None):
        return sum(c * f.chain(perm, upto) for c, f in zip(self.coefs, self.functions))

    def _build_table(self):
        return sum(c * f.table() for c, f in zip(self.coefs, self.functions))


class FromCallable(SetFunction):
    """Wrap ``fn(frozenset_of_indices) -> float``; no structural checks unless asked."""

    kind = "callable"

    def __init__(self, p, fn, validate=False):
        super().__init__(p)
        self.fn = fn
        if validate:
            self._validate()

    def _eval(self, mask):
        return float(self.fn(frozenset(np.flatnonzero(mask).tolist())))


class ModularShift(SetFunction):
    """``G(A) = scale * F(A) - z(A)``; submodular but generally not monotone."""

    kind = "modular_shift"

    def __init__(self, F, z, scale=1.0):
        super().__init__(F.p)
        z = np.asarray(z, dtype=float).ravel()
        if z.size != F.p:
            raise SetFunctionError("shift vector has the wrong length")
        self.base = F
        self.z = z
        self.scale = float(scale)

    def _eval(self, mask):
        return self.scale * self.base._eval(mask) - float(self.z[mask].sum())

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        base = self.base.chain(perm, m)
        return self.scale * base - np.concatenate([[0.0], np.cumsum(self.z[perm[:m]])])

    def _build_table(self):
        return self.scale * self.base.table() - subset_bits(self.p) @ self.z


class Restriction(SetFunction):
    """``F_J(A) = F(A)`` for ``A`` a subset of ``J``; local index ``i`` is ``J[i]``."""

    kind = "restriction"

    def __init__(self, F, J):
        J = np.flatnonzero(as_mask(J, F.p))
        super().__init__(max(len(J), 1))
        if len(J) == 0:
            raise SetFunctionError("cannot restrict to the empty set")
        self.base = F
        self.J = J
        self._rest = np.setdiff1d(np.arange(F.p), J)
        self.degenerate = bool(np.any(self.singletons() <= 0))

    def _lift(self, mask):
        big = np.zeros(self.base.p, dtype=bool)
        big[self.J[mask]] = True
        return big

    def _eval(self, mask):
        return self.base._eval(self._lift(mask))

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        full = np.concatenate([self.J[perm], self._rest])
        return self.base.chain(full, m)


class Contraction(SetFunction):
    """``F^J(A) = F(A | J) - F(J)`` for ``A`` a subset of the complement of ``J``.

    Local index ``i`` stands for ``Jc[i]``. When ``J`` is not stable the
    contraction vanishes on some singleton; ``degenerate`` is then set.
    """

    kind = "contraction"

    def __init__(self, F, J):
        Jmask = as_mask(J, F.p)
        Jc = np.flatnonzero(~Jmask)
        if len(Jc) == 0:
            raise SetFunctionError("cannot contract by the whole ground set")
        super().__init__(len(Jc))
        self.base = F
        self.J = np.flatnonzero(Jmask)
        self.Jc = Jc
        self._Jmask = Jmask
        self.offset = F(Jmask)
        s = self.singletons()
        self.degenerate = bool(np.any(s <= _tol(self.offset)))

    def _eval(self, mask):
        big = self._Jmask.copy()
        big[self.Jc[mask]] = True
        return self.base._eval(big) - self.offset

    def chain(self, perm, upto=None):
        perm = np.asarray(perm, dtype=np.int64)
        m = len(perm) if upto is None else int(upto)
        full = np.concatenate([self.J, self.Jc[perm]])
        vals = self.base.chain(full, len(self.J) + m)
        return vals[len(self.J):] - self.offset


def restrict(F, J):
    return Restriction(F, J)


def contract(F, J):
    return Contraction(F, J)


# ---------------------------------------------------------------------------
# brute-force structure queries


def _require_small(F, cap=BRUTE_FORCE_MAX_P):
    if F.p > cap:
        raise CapabilityError(f"brute force is limited to p <= {cap}, got p = {F.p}")


def subset_table(F):
    return F.table()


def _pair_margins(F):
    """Second differences ``F(A+i) + F(A+j) - F(A+i+j) - F(A)`` over all ``A, i < j``."""
    t = F.table()
    m = np.arange(1 << F.p, dtype=np.int64)
    out = []
    for i in range(F.p):
        for j in range(i + 1, F.p):
            bi, bj = 1 << i, 1 << j
            base = m[(m & (bi | bj)) == 0]
            out.append(t[base | bi] + t[base | bj] - t[base | bi | bj] - t[base])
    return np.concatenate(out) if out else np.zeros(0)


def is_submodular(F, rtol=1e-10):
    """Exhaustive check of ``F(A) + F(B) >= F(A | B) + F(A & B)``.

    Uses the equivalent diminishing-returns form on pairs of added elements.
    """
    _require_small(F)
    t = F.table()
    tol = _tol(np.abs(t).max(), rtol)
    return bool(np.all(_pair_margins(F) >= -tol))


def is_nondecreasing(F, rtol=1e-10):
    _require_small(F)
    t = F.table()
    tol = _tol(np.abs(t).max(), rtol)
    m = np.arange(1 << F.p, dtype=np.int64)
    for k in range(F.p):
        base = m[(m & (1 << k)) == 0]
        if np.any(t[base | (1 << k)] < t[base] - tol):
            return False
    return True


def is_stable(F, A, rtol=1e-12):
    """True iff adding any single element outside ``A`` strictly increases ``F``."""
    mask = as_mask(A, F.p)
    fa = F(mask)
    tol = _tol(fa, rtol)
    for k in np.flatnonzero(~mask):
        bigger = mask.copy()
        bigger[k] = True
        if F(bigger) <= fa + tol:
            return False
    return True


def is_separable(F, A, rtol=1e-12, cap=BRUTE_FORCE_MAX_P):
    """True iff some proper nonempty ``B`` splits ``A`` with ``F(B) + F(A-B) = F(A)``."""
    mask = as_mask(A, F.p)
    idx = np.flatnonzero(mask)
    if len(idx) > cap:
        raise CapabilityError(f"separability check is limited to |A| <= {cap}")
    if len(idx) < 2:
        return False
    fa = F(mask)
    tol = _tol(fa, rtol)
    first, rest = idx[0], idx[1:]
    # B always contains the first element; B = A is excluded
    for r in range(len(rest)):
        for extra in itertools.combinations(rest, r):
            B = np.zeros(F.p, dtype=bool)
            B[first] = True
            B[list(extra)] = True
            if abs(F(B) + F(mask & ~B) - fa) <= tol:
                return True
    return False


@dataclass
class StructureReport:
    """Stable sets and stable inseparable sets (the faces of the polyhedron)."""

    stable_sets: list
    stable_inseparable_sets: list
    singleton_values: np.ndarray

    def one_based(self):
        return [sorted(k + 1 for k in A) for A in self.stable_inseparable_sets]


def _stable_masks(F, rtol=1e-12):
    t = F.table()
    tol = rtol * np.maximum(1.0, np.abs(t))
    m = np.arange(1 << F.p, dtype=np.int64)
    stable = np.ones(m.size, dtype=bool)
    for k in range(F.p):
        has = (m & (1 << k)) != 0
        flat = ~has & (t[m | (1 << k)] <= t + tol)
        stable &= ~flat
    return stable


def _separable_mask(t, m, rtol=1e-12):
    tol = rtol * max(1.0, abs(t[m]))
    low = m & -m
    rest = m ^ low
    sub = rest
    while True:
        B = sub | low
        if B != m and abs(t[B] + t[m ^ B] - t[m]) <= tol:
            return True
        if sub == 0:
            return False
        sub = (sub - 1) & rest


def stable_inseparable_sets(F, rtol=1e-12):
    """Enumerate all stable sets and the nonempty stable inseparable ones."""
    _require_small(F)
    t = F.table()
    stable = _stable_masks(F, rtol)
    bits = subset_bits(F.p)
    stable_sets, tight = [], []
    for m in np.flatnonzero(stable):
        A = frozenset(np.flatnonzero(bits[m]).tolist())
        stable_sets.append(A)
        if m and not _separable_mask(t, int(m), rtol):
            tight.append(A)
    return StructureReport(stable_sets, tight, F.singletons())


def smallest_stable_superset(F, J, rtol=1e-12):
    """Closure of ``J``: add elements that leave ``F`` unchanged until none remain."""
    mask = as_mask(J, F.p).copy()
    fj = F(mask)
    changed = True
    while changed:
        changed = False
        for k in np.flatnonzero(~mask):
            mask[k] = True
            if F(mask) <= fj + _tol(fj, rtol):
                changed = True
            else:
                mask[k] = False
    return frozenset(np.flatnonzero(mask).tolist())


# ---------------------------------------------------------------------------
# declarative configuration


def _read_matrix(path, base_dir):
    from .csvio import read_matrix

    path = Path(path)
    if not path.is_absolute() and base_dir is not None:
        path = Path(base_dir) / path
    return read_matrix(path)


def _spectral_h(spec):
    if spec is None:
        return Power(0.5)
    if isinstance(spec, dict):
        if "power" in spec:
            return Power(float(spec["power"]))
        if "logshift" in spec:
            return LogShift(float(spec["logshift"]))
    raise SetFunctionError(f"unknown spectral weight {spec!r}; use {{'power': q}} or {{'logshift': t}}")


def from_config(cfg, base_dir=None):
    """Build a set function from a config mapping with a ``kind`` key.

    Element indices in configs are 1-based. Recognised kinds and keys:

    - ``cardinality``: ``p``
    - ``weighted_cardinality``: ``weights``
    - ``concave_cardinality``: ``h`` (values on 0..p) or ``p`` plus ``power``
    - ``group_cover``: ``p``, ``groups`` (lists of 1-based indices), optional ``weights``
    - ``range``: ``p``
    - ``interval_count``: ``p``
    - ``spectral``: one of ``Q``/``X`` (nested lists) or ``Q_csv``/``X_csv`` (paths),
      optional ``h`` as ``{"power": q}`` or ``{"logshift": t}``
    - ``sum``: ``terms``, a list of ``{"coef": c, "function": {...}}``
    """
    if not isinstance(cfg, dict) or "kind" not in cfg:
        raise SetFunctionError("set-function config must be a mapping with a 'kind' key")
    kind = cfg["kind"]
    try:
        if kind == "cardinality":
            return Cardinality(int(cfg["p"]))
        if kind == "weighted_cardinality":
            return WeightedCardinality(cfg["weights"])
        if kind == "concave_cardinality":
            if "h" in cfg:
                return ConcaveCardinality(cfg["h"])
            q = float(cfg.get("power", 0.5))
            return ConcaveCardinality.from_function(int(cfg["p"]), lambda k: k**q)
        if kind == "group_cover":
            groups = [[int(k) - 1 for k in g] for g in cfg["groups"]]
            return GroupCover(int(cfg["p"]), groups, cfg.get("weights"))
        if kind == "range":
            return RangePlusConstant(int(cfg["p"]))
        if kind == "interval_count":
            return IntervalCount(int(cfg["p"]))
        if kind == "spectral":
            h = _spectral_h(cfg.get("h"))
            if "X" in cfg:
                return Spectral(X=np.asarray(cfg["X"], dtype=float), h=h)
            if "X_csv" in cfg:
                return Spectral(X=_read_matrix(cfg["X_csv"], base_dir), h=h)
            if "Q" in cfg:
                return Spectral(Q=np.asarray(cfg["Q"], dtype=float), h=h)
            if "Q_csv" in cfg:
                return Spectral(Q=_read_matrix(cfg["Q_csv"], base_dir), h=h)
            raise SetFunctionError("spectral config needs Q, X, Q_csv or X_csv")
        if kind == "sum":
            terms = cfg["terms"]
            fns = [from_config(t["function"], base_dir) for t in terms]
            return SumFunction(fns, [float(t.get("coef", 1.0)) for t in terms])
    except KeyError as exc:
        raise SetFunctionError(f"config for kind {kind!r} is missing key {exc}") from exc
    raise SetFunctionError(f"unknown set-function kind {kind!r}")


def load_config(path):
    path = Path(path)
    with open(path) as fh:
        cfg = json.load(fh)
    if "function" in cfg and "kind" not in cfg:
        cfg = cfg["function"]
    return from_config(cfg, base_dir=path.parent)

"""Small dense linear-algebra kernels and seeded random streams.

Everything here works on plain numpy arrays. The eigensolver is a cyclic
Jacobi iteration, which is accurate and dependency free for the matrix sizes
used in this package; larger matrices are handed to LAPACK.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = [
    "LinAlgError",
    "RngStream",
    "check_symmetric",
    "jacobi_eig",
    "sym_eig",
    "clip_psd",
    "solve_spd",
    "lstsq",
    "power_iteration",
    "gaussian",
    "normalize_columns",
]

# Above this size sym_eig(method="auto") delegates to LAPACK.
JACOBI_MAX_DIM = 32


class LinAlgError(ValueError):
    """Raised for singular systems or malformed matrices."""


def check_symmetric(M, tol=1e-12):
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise LinAlgError(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise LinAlgError("matrix has non-finite entries")
    scale = max(1.0, np.abs(M).max(initial=0.0))
    if np.abs(M - M.T).max(initial=0.0) > tol * scale:
        raise LinAlgError("matrix is not symmetric")
    return 0.5 * (M + M.T)


def jacobi_eig(M, tol=1e-12, max_sweeps=100):
    """Cyclic Jacobi eigendecomposition of a symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)`` with eigenvalues ascending and
    eigenvectors in the columns. Sweeps stop once the off-diagonal Frobenius
    norm drops below ``tol * ||M||_F``.
    """
    A = check_symmetric(M).copy()
    n = A.shape[0]
    V = np.eye(n)
    norm = np.linalg.norm(A)
    if n == 1 or norm == 0.0:
        d = np.diag(A).copy()
        order = np.argsort(d, kind="stable")
        return d[order], V[:, order]
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * norm:
            break
        for i in range(n - 1):
            for j in range(i + 1, n):
                aij = A[i, j]
                if abs(aij) <= 1e-300:
                    continue
                theta = (A[j, j] - A[i, i]) / (2.0 * aij)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta == 0.0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- J^T A J restricted to rows/cols i, j
                ai = A[:, i].copy()
                aj = A[:, j].copy()
                A[:, i] = c * ai - s * aj
                A[:, j] = s * ai + c * aj
                ai = A[i, :].copy()
                aj = A[j, :].copy()
                A[i, :] = c * ai - s * aj
                A[j, :] = s * ai + c * aj
                A[i, j] = A[j, i] = 0.0
                vi = V[:, i].copy()
                vj = V[:, j].copy()
                V[:, i] = c * vi - s * vj
                V[:, j] = s * vi + c * vj
    else:
        raise LinAlgError("Jacobi iteration did not converge")
    d = np.diag(A).copy()
    order = np.argsort(d, kind="stable")
    return d[order], V[:, order]


def sym_eig(M, vectors=False, method="auto"):
    """Eigenvalues (ascending) of a symmetric matrix, optionally with vectors.

    ``method`` is ``"jacobi"``, ``"lapack"`` or ``"auto"`` (Jacobi up to
    ``JACOBI_MAX_DIM`` rows).
    """
    M = check_symmetric(M)
    if method == "auto":
        method = "jacobi" if M.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        vals, vecs = jacobi_eig(M)
    elif method == "lapack":
        vals, vecs = np.linalg.eigh(M)
    else:
        raise ValueError(f"unknown eigensolver {method!r}")
    return (vals, vecs) if vectors else vals


def clip_psd(eigenvalues, tol=1e-10):
    """Zero out slightly negative eigenvalues of a PSD matrix.

    Values below ``-tol * max(1, max|ev|)`` mean the matrix is not PSD.
    """
    ev = np.asarray(eigenvalues, dtype=float)
    scale = max(1.0, np.abs(ev).max(initial=0.0))
    if ev.size and ev.min() < -tol * scale:
        raise LinAlgError(f"matrix is not positive semidefinite (min eigenvalue {ev.min():.3e})")
    return np.maximum(ev, 0.0)


def solve_spd(M, b, rcond=1e-12):
    M = check_symmetric(M, tol=1e-10)
    b = np.asarray(b, dtype=float)
    try:
        c, low = scipy.linalg.cho_factor(M, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise LinAlgError("matrix is not positive definite") from exc
    diag = np.abs(np.diag(c))
    if diag.min() ** 2 <= rcond * max(1.0, np.abs(M).max()):
        raise LinAlgError("matrix is numerically singular")
    return scipy.linalg.cho_solve((c, low), b, check_finite=False)


def lstsq(X, y, rcond=1e-10):
    """Ordinary least squares for a design of full column rank."""
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float)
    if X.shape[1] == 0:
        return np.zeros(0)
    Qf, R = np.linalg.qr(X, mode="reduced")
    d = np.abs(np.diag(R))
    if X.shape[0] < X.shape[1] or d.min() <= rcond * max(d.max(), 1e-300):
        raise LinAlgError("design matrix is rank deficient")
    return scipy.linalg.solve_triangular(R, Qf.T @ y)


def power_iteration(Q, n_iter=50, rtol=1e-8, seed=0):
    """Largest eigenvalue of a PSD matrix by power iteration.

    The estimate converges from below; callers that need an upper bound
    (step sizes) should guard with backtracking.
    """
    Q = np.asarray(Q, dtype=float)
    p = Q.shape[0]
    if p == 0 or not np.any(Q):
        return 0.0
    v = np.random.default_rng(seed).standard_normal(p)
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(n_iter):
        u = Q @ v
        new = float(v @ u)
        nu = np.linalg.norm(u)
        if nu == 0.0:
            return 0.0
        v = u / nu
        if abs(new - est) <= rtol * abs(new):
            est = new
            break
        est = new
    return max(est, float(v @ Q @ v))


@dataclass
class RngStream:
    """Seeded random stream backed by numpy's PCG64 bit generator.

    PCG64 output is fixed across platforms for a given seed, so every draw
    made through a stream is reproducible. ``draws`` counts the number of
    scalar variates handed out.
    """

    seed: int
    algorithm: str = field(default="PCG64", init=False)
    draws: int = field(default=0, init=False)

    def __post_init__(self):
        self._gen = np.random.Generator(np.random.PCG64(self.seed))

    def normal(self, size):
        out = self._gen.standard_normal(size)
        self.draws += out.size
        return out

    def permutation(self, n):
        self.draws += n
        return self._gen.permutation(n)

    def uniform(self, low=0.0, high=1.0, size=None):
        out = self._gen.uniform(low, high, size)
        self.draws += np.size(out)
        return out

    def integers(self, low, high=None, size=None):
        out = self._gen.integers(low, high, size)
        self.draws += np.size(out)
        return out

    def spawn(self, key):
        """Independent child stream for replication ``key``."""
        return RngStream(int(np.random.SeedSequence([self.seed, int(key)]).generate_state(1)[0]))


def gaussian(stream, dims):
    """Standard normal samples of the given shape drawn from ``stream``."""
    return stream.normal(dims)


def normalize_columns(X):
    """Rescale each column to unit Euclidean norm (zero columns untouched)."""
    X = np.array(X, dtype=float)
    norms = np.linalg.norm(X, axis=0)
    norms[norms == 0] = 1.0
    return X / norms

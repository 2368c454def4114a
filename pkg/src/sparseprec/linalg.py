"""Dense linear algebra used by the solvers.

Matrices are plain ``numpy.ndarray`` objects stored column-major (Fortran
order) so column slices are contiguous. Index sets are sorted ``int64``
arrays.
"""
import numpy as np

from . import _kernels
from .errors import NotPositiveDefinite, RankDeficient

POWER_TOL = 1e-10
POWER_MAX_ITER = 5000
_START_SEED = 20190813
_PIVOT_RTOL = 1e-14


def as_matrix(a, name="matrix", square=False):
    """Validate and convert to a finite float64 Fortran-ordered 2-D array."""
    m = np.asfortranarray(a, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {m.shape}")
    if square and m.shape[0] != m.shape[1]:
        raise ValueError(f"{name} must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError(f"{name} contains NaN or Inf")
    return m


def as_vector(v, name="vector", size=None):
    x = np.array(v, dtype=np.float64, copy=True).reshape(-1)
    if size is not None and x.shape[0] != size:
        raise ValueError(f"{name} must have length {size}, got {x.shape[0]}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf")
    return x


def index_set(indices, p=None):
    """Sorted, duplicate-free int64 index array, optionally bounds-checked."""
    idx = np.unique(np.asarray(indices, dtype=np.int64).reshape(-1))
    if idx.size and (idx[0] < 0 or (p is not None and idx[-1] >= p)):
        raise ValueError(f"indices out of range [0, {p})")
    return idx


def matrix_l1_norm(a):
    """Max absolute column sum."""
    return float(np.abs(a).sum(axis=0).max()) if a.size else 0.0


def matrix_inf_norm(a):
    """Max absolute row sum."""
    return float(np.abs(a).sum(axis=1).max()) if a.size else 0.0


def cholesky(a, check_symmetric=True):
    """Lower Cholesky factor ``L`` with ``L @ L.T == a``.

    Raises
    ------
    NotPositiveDefinite
        If a pivot is not strictly positive.
    ValueError
        If ``a`` is not symmetric to ``1e-12 * max|a|``.
    """
    a = as_matrix(a, "A", square=True)
    if check_symmetric:
        scale = np.abs(a).max() if a.size else 0.0
        if np.abs(a - a.T).max(initial=0.0) > 1e-12 * scale:
            raise ValueError("cholesky requires a symmetric matrix")
    L, bad, pivot = _kernels.cholesky(a)
    if bad >= 0:
        raise NotPositiveDefinite(int(bad), float(pivot))
    return np.asfortranarray(L)


def cho_solve(L, b):
    """Solve ``(L L^T) x = b`` given the lower factor; ``b`` may be 1-D or 2-D."""
    b = np.asarray(b, dtype=np.float64)
    vec = b.ndim == 1
    rhs = np.asfortranarray(b.reshape(-1, 1) if vec else b)
    y = _kernels.solve_lower(L, rhs)
    x = _kernels.solve_lower_t(L, y)
    return x[:, 0].copy() if vec else x


def restricted_least_squares(A, b, support, full_output=False):
    """Least squares restricted to the columns in ``support``.

    Solves the normal equations of ``min |A[:, S] x - b|_2`` by Cholesky on the
    Gram matrix. If the Gram matrix is not numerically positive definite the
    solve is retried once with a ridge of ``1e-10 * trace(G) / |S|``.

    Returns the full-length coefficient vector, exactly zero off ``support``.
    With ``full_output=True`` returns ``(beta, regularized)``.
    """
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    support = np.asarray(support, dtype=np.int64)
    if support.size == 0:
        raise ValueError("support must be non-empty")
    if support.size > A.shape[0]:
        raise RankDeficient(f"|support| = {support.size} exceeds rows = {A.shape[0]}")
    As = A[:, support]
    gram = As.T @ As
    rhs = As.T @ b
    regularized = False
    L, bad, _ = _kernels.cholesky(gram)
    if bad < 0 and np.diag(L).min() ** 2 <= _PIVOT_RTOL * np.diag(gram).max():
        bad = 0  # numerically singular: tiny positive pivot
    if bad >= 0:
        regularized = True
        ridge = 1e-10 * np.trace(gram) / support.size
        if not ridge > 0.0:
            raise RankDeficient("restricted Gram matrix is zero")
        gram = gram + ridge * np.eye(support.size)
        L, bad, _ = _kernels.cholesky(gram)
        if bad >= 0:
            raise RankDeficient("restricted Gram matrix singular after ridge retry")
    coef = cho_solve(L, rhs)
    beta = np.zeros(A.shape[1])
    beta[support] = coef
    if full_output:
        return beta, regularized
    return beta


def _start_vector(n):
    v = np.random.default_rng(_START_SEED).standard_normal(n)
    return v / np.linalg.norm(v)


def _power_psd(apply, n, tol, max_iter):
    """Largest eigenvalue of a PSD operator via Rayleigh-quotient power iteration."""
    v = _start_vector(n)
    theta = 0.0
    for _ in range(max_iter):
        w = apply(v)
        theta_new = float(v @ w)
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        v = w / nw
        if abs(theta_new - theta) <= tol * abs(theta_new):
            return theta_new
        theta = theta_new
    return theta


def spectral_norm(A, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """Largest singular value by power iteration on ``A^T A``."""
    A = np.asarray(A, dtype=np.float64)
    if not A.any():
        return 0.0
    lam = _power_psd(lambda v: A.T @ (A @ v), A.shape[1], tol, max_iter)
    return float(np.sqrt(max(lam, 0.0)))


def extreme_eigenvalues(A, tol=POWER_TOL, max_iter=POWER_MAX_ITER):
    """``(lambda_min, lambda_max)`` of a symmetric matrix.

    ``lambda_max`` comes from power iteration on the PSD shift ``A + |A|_2 I``
    (plain power iteration on ``A`` would lock onto the eigenvalue of largest
    magnitude, which may be negative); ``lambda_min`` from power iteration on
    ``lambda_max I - A``.
    """
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    sigma = spectral_norm(A, tol, max_iter)
    if sigma == 0.0:
        return 0.0, 0.0
    top = _power_psd(lambda v: A @ v + sigma * v, n, tol, max_iter)
    lam_max = top - sigma
    spread = _power_psd(lambda v: lam_max * v - A @ v, n, tol, max_iter)
    return lam_max - spread, lam_max

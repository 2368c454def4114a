"""Hot inner loops, compiled with numba when available.

Every kernel has a pure-numpy twin with identical semantics. The backend is
chosen once at import time: numba is used if it imports and the environment
variable ``SPM_DISABLE_NUMBA`` is not set to a truthy value. Both twins stay
importable (``np_*`` / ``nb_*``) so tests and the benchmark can compare them.
"""
import os
from math import sqrt

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_TRUTHY = {"1", "true", "yes", "on"}
DISABLED_BY_ENV = os.environ.get("SPM_DISABLE_NUMBA", "").strip().lower() in _TRUTHY
USE_NUMBA = numba is not None and not DISABLED_BY_ENV
BACKEND = "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# pure numpy implementations
# ---------------------------------------------------------------------------

def np_cholesky(a):
    """Left-looking Cholesky. Returns ``(L, bad_index, bad_pivot)``.

    ``bad_index`` is -1 on success; otherwise it is the first column whose
    pivot was not strictly positive and ``L`` is only partially filled.
    """
    n = a.shape[0]
    L = np.zeros((n, n), order="F")
    for j in range(n):
        row = L[j, :j]
        d = a[j, j] - row @ row
        if not d > 0.0:
            return L, j, float(d)
        ljj = sqrt(d)
        L[j, j] = ljj
        if j + 1 < n:
            L[j + 1:, j] = (a[j + 1:, j] - L[j + 1:, :j] @ row) / ljj
    return L, -1, 0.0


def np_solve_lower(L, b):
    """Solve ``L x = b`` for lower-triangular ``L``; ``b`` is (n, k)."""
    n = L.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(n):
        if i:
            x[i] -= L[i, :i] @ x[:i]
        x[i] /= L[i, i]
    return x


def np_solve_lower_t(L, b):
    """Solve ``L^T x = b``; ``b`` is (n, k)."""
    n = L.shape[0]
    x = np.array(b, dtype=np.float64, copy=True)
    for i in range(n - 1, -1, -1):
        if i + 1 < n:
            x[i] -= L[i + 1:, i] @ x[i + 1:]
        x[i] /= L[i, i]
    return x


def np_next_crossing(p, g, active, g_tol):
    """Smallest forward time step at which an inactive dual coordinate hits +-1.

    ``p`` is the clipped dual, ``g`` the current correlation ``Sigma^T r``.
    Coordinates that are active, or whose |g| <= g_tol, are ineligible.
    Returns ``inf`` when nothing is eligible.
    """
    eligible = (~active) & (np.abs(g) > g_tol)
    if not eligible.any():
        return np.inf
    ge = g[eligible]
    dt = (np.sign(ge) - p[eligible]) / ge
    dt = dt[dt > 0.0]
    if dt.size == 0:
        return np.inf
    return float(dt.min())


def np_soft_threshold(x, kappa):
    return np.sign(x) * np.maximum(np.abs(x) - kappa, 0.0)


def np_symmetrize_min(a):
    """Pairwise smaller-magnitude selection; ties keep the upper entry."""
    at = a.T
    pick = np.where(np.abs(a) <= np.abs(at), a, at)
    upper = np.triu(pick)
    return np.asfortranarray(upper + np.triu(pick, 1).T)


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if numba is not None:
    _jit = numba.njit(cache=True, nogil=True)

    @_jit
    def nb_cholesky(a):
        n = a.shape[0]
        L = np.zeros((n, n)).T  # Fortran-contiguous view
        for j in range(n):
            d = a[j, j]
            for k in range(j):
                d -= L[j, k] * L[j, k]
            if not d > 0.0:
                return L, j, d
            ljj = sqrt(d)
            L[j, j] = ljj
            for i in range(j + 1, n):
                s = a[i, j]
                for k in range(j):
                    s -= L[i, k] * L[j, k]
                L[i, j] = s / ljj
        return L, -1, 0.0

    @_jit
    def nb_solve_lower(L, b):
        n, m = b.shape
        x = b.copy()
        for c in range(m):
            for i in range(n):
                s = x[i, c]
                for k in range(i):
                    s -= L[i, k] * x[k, c]
                x[i, c] = s / L[i, i]
        return x

    @_jit
    def nb_solve_lower_t(L, b):
        n, m = b.shape
        x = b.copy()
        for c in range(m):
            for i in range(n - 1, -1, -1):
                s = x[i, c]
                for k in range(i + 1, n):
                    s -= L[k, i] * x[k, c]
                x[i, c] = s / L[i, i]
        return x

    @_jit
    def nb_next_crossing(p, g, active, g_tol):
        best = np.inf
        for j in range(p.shape[0]):
            if active[j]:
                continue
            gj = g[j]
            if abs(gj) <= g_tol:
                continue
            target = 1.0 if gj > 0.0 else -1.0
            dt = (target - p[j]) / gj
            if dt > 0.0 and dt < best:
                best = dt
        return best

    @_jit
    def _nb_soft_threshold_flat(x, kappa):
        out = np.empty_like(x)
        for i in range(x.shape[0]):
            v = x[i]
            m = abs(v) - kappa
            if m > 0.0:
                out[i] = m if v > 0.0 else -m
            else:
                out[i] = 0.0
        return out

    def nb_soft_threshold(x, kappa):
        x = np.asarray(x, dtype=np.float64)
        flat = _nb_soft_threshold_flat(np.ascontiguousarray(x).ravel(), float(kappa))
        return flat.reshape(x.shape)

    @_jit
    def _nb_symmetrize_min(a):
        n = a.shape[0]
        out = np.empty((n, n)).T
        for j in range(n):
            out[j, j] = a[j, j]
            for i in range(j):
                u = a[i, j]
                lo = a[j, i]
                v = u if abs(u) <= abs(lo) else lo
                out[i, j] = v
                out[j, i] = v
        return out

    def nb_symmetrize_min(a):
        return _nb_symmetrize_min(np.asarray(a, dtype=np.float64))


def _pick(name):
    if USE_NUMBA:
        return globals()["nb_" + name]
    return globals()["np_" + name]


cholesky = _pick("cholesky")
solve_lower = _pick("solve_lower")
solve_lower_t = _pick("solve_lower_t")
next_crossing = _pick("next_crossing")
soft_threshold = _pick("soft_threshold")
symmetrize_min = _pick("symmetrize_min")

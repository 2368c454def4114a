"""Independent reference implementations used only by the tests."""
import itertools

import numpy as np


def jacobi_eigenvalues(A, tol=1e-14, max_sweeps=100):
    """Cyclic Jacobi rotations on a symmetric matrix; returns sorted eigenvalues."""
    a = np.array(A, dtype=np.float64, copy=True)
    n = a.shape[0]
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off <= tol * max(1.0, np.abs(np.diag(a)).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * a[p, q])
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                a = J.T @ a @ J
    return np.sort(np.diag(a))


def naive_covariance(X):
    n, p = X.shape
    mean = [sum(X[k, j] for k in range(n)) / n for j in range(p)]
    C = np.zeros((p, p))
    for i in range(p):
        for j in range(p):
            C[i, j] = sum((X[k, i] - mean[i]) * (X[k, j] - mean[j]) for k in range(n)) / (n - 1)
    return C


def brute_force_l1(Sigma, e, max_support=3, feas_tol=1e-9):
    """Smallest-l1 exact solution of ``Sigma beta = e`` over supports of size <= max_support.

    Returns ``(beta, support)`` or ``(None, None)`` when no such support is feasible.
    """
    p = Sigma.shape[1]
    best, best_val, best_supp = None, np.inf, None
    for k in range(1, max_support + 1):
        for supp in itertools.combinations(range(p), k):
            cols = list(supp)
            x, *_ = np.linalg.lstsq(Sigma[:, cols], e, rcond=None)
            if np.abs(Sigma[:, cols] @ x - e).max() > feas_tol:
                continue
            beta = np.zeros(p)
            beta[cols] = x
            val = np.abs(beta).sum()
            if val < best_val - 1e-12:
                best, best_val, best_supp = beta, val, tuple(int(i) for i in np.flatnonzero(np.abs(beta) > 1e-9))
    return best, best_supp


def random_spd(rng, p, spread=0.3):
    while True:
        A = rng.standard_normal((p, p))
        S = np.eye(p) + spread * (A + A.T) / (2.0 * np.sqrt(p))
        if np.linalg.eigvalsh(S).min() > 0.1:
            return S


def sparse_vector(rng, p, s):
    beta = np.zeros(p)
    idx = rng.choice(p, size=s, replace=False)
    beta[idx] = rng.choice([-1.0, 1.0], size=s) * rng.uniform(0.5, 2.0, size=s)
    return beta


def ar1(p):
    i = np.arange(p)
    return 0.5 ** np.abs(i[:, None] - i[None, :])

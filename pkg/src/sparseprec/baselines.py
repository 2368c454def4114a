"""Comparison column solvers: Hard Thresholding Pursuit and ADMM.

ADMM comes in two forms:

* equality (``lam == 0``): basis pursuit splitting ``x = z`` where the
  x-update projects onto ``{x : Sigma x = e}`` and the z-update soft-thresholds;
* inequality (``lam > 0``): an extra block ``w = Sigma x`` constrained to the
  box ``|w - e|_inf <= lam``; the x-update solves with ``I + Sigma^T Sigma``.

The expensive factorization is built once per ``Sigma`` (:class:`AdmmFactor`)
and reused across columns; columns are iterated together as a block.
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import NotPositiveDefinite
from .giss import GissResult, Termination
from .linalg import as_matrix, as_vector, cho_solve, restricted_least_squares, spectral_norm

_PIVOT_RTOL = 1e-14


@dataclass
class HtpConfig:
    sparsity_s: int
    max_iters: int = 500
    step_size: float = 1.0
    tol: float = 1e-12

    def __post_init__(self):
        if self.sparsity_s < 1:
            raise ValueError("sparsity_s must be >= 1")
        if not self.step_size > 0:
            raise ValueError("step_size must be > 0")


@dataclass
class AdmmConfig:
    penalty_rho: float = 1.0
    max_iters: int = 10000
    primal_tol: float = 1e-9
    dual_tol: float = 1e-9
    lam: float = 0.0

    def __post_init__(self):
        if not self.penalty_rho > 0:
            raise ValueError("penalty_rho must be > 0")
        if not (self.primal_tol > 0 and self.dual_tol > 0):
            raise ValueError("tolerances must be > 0")
        if not self.lam >= 0:
            raise ValueError("lam must be >= 0")


def shrink(x, kappa):
    """Soft threshold: ``sign(x) * max(|x| - kappa, 0)``."""
    return _kernels.soft_threshold(np.asarray(x, dtype=np.float64), float(kappa))


def _top_s(u, s):
    order = np.argsort(-np.abs(u), kind="stable")
    return np.sort(order[:s])


def htp_solve_column(Sigma, e, cfg, sigma_norm=None):
    """Hard Thresholding Pursuit on ``Sigma beta = e``.

    Each iteration takes a gradient step, keeps the ``s`` largest magnitudes
    and refits by least squares on them. Stops when the support repeats or
    the residual sup-norm drops to ``cfg.tol``. ``Sigma`` (and ``e``) are
    divided by ``|Sigma|_2`` first when that exceeds 1 so the unit step is
    non-expansive; the refit is invariant to that scaling. Pass
    ``sigma_norm`` to reuse a precomputed ``|Sigma|_2`` across columns.
    """
    Sigma = as_matrix(Sigma, "Sigma")
    e = as_vector(e, "e", Sigma.shape[0])
    n = Sigma.shape[1]
    if cfg.sparsity_s > n:
        raise ValueError(f"sparsity_s = {cfg.sparsity_s} exceeds p = {n}")
    scale = spectral_norm(Sigma) if sigma_norm is None else float(sigma_norm)
    A, b = (Sigma / scale, e / scale) if scale > 1.0 else (Sigma, e)

    x = np.zeros(n)
    prev = None
    regularized = False
    termination = Termination.MAX_ITERS
    it = 0
    res_inf = float(np.abs(e).max(initial=0.0))
    for it in range(1, cfg.max_iters + 1):
        u = x + cfg.step_size * (A.T @ (b - A @ x))
        supp = _top_s(u, cfg.sparsity_s)
        x, reg = restricted_least_squares(A, b, supp, full_output=True)
        regularized |= reg
        res_inf = float(np.abs(e - Sigma @ x).max(initial=0.0))
        if res_inf <= cfg.tol:
            termination = Termination.RESIDUAL_BELOW_LAMBDA
            break
        if prev is not None and np.array_equal(supp, prev):
            termination = Termination.STAGNATED
            break
        prev = supp
    return GissResult(
        beta=x,
        iterations=it,
        final_residual_inf=res_inf,
        support=np.flatnonzero(x),
        termination=termination,
        regularized=regularized,
    )


def _spd_inverse(M):
    """Inverse of an SPD matrix through the Cholesky kernel, ridged if singular."""
    L, bad, _ = _kernels.cholesky(M)
    regularized = False
    if bad < 0 and np.diag(L).min() ** 2 <= _PIVOT_RTOL * np.diag(M).max():
        bad = 0
    if bad >= 0:
        regularized = True
        ridge = 1e-10 * np.trace(M) / M.shape[0]
        L, bad, piv = _kernels.cholesky(M + ridge * np.eye(M.shape[0]))
        if bad >= 0:
            raise NotPositiveDefinite(int(bad), float(piv))
    return cho_solve(L, np.eye(M.shape[0])), regularized


@dataclass(frozen=True)
class AdmmFactor:
    """Per-``Sigma`` precomputation shared by every column.

    Equality form: ``proj = I - Sigma^T (Sigma Sigma^T)^{-1} Sigma`` and
    ``pinv = Sigma^T (Sigma Sigma^T)^{-1}`` so the projection of ``v`` is
    ``proj v + pinv e``. Inequality form: ``K = (I + Sigma^T Sigma)^{-1}``.
    """

    sigma: np.ndarray
    equality: bool
    mats: dict = field(repr=False)
    regularized: bool = False

    @classmethod
    def build(cls, Sigma, lam=0.0):
        S = as_matrix(Sigma, "Sigma", square=True)
        n = S.shape[0]
        if lam == 0.0:
            inv, reg = _spd_inverse(S @ S.T)
            pinv = S.T @ inv
            proj = np.eye(n) - pinv @ S
            return cls(S, True, {"proj": proj, "pinv": pinv}, reg)
        K, reg = _spd_inverse(np.eye(n) + S.T @ S)
        return cls(S, False, {"K": K, "KSt": K @ S.T}, reg)


def _colnorm(a):
    return np.sqrt(np.einsum("ij,ij->j", a, a))


def admm_solve_columns(Sigma, E, cfg, factor=None):
    """Solve several right-hand sides (columns of ``E``) at once.

    Each column stops independently once its primal and dual residual
    2-norms fall below the tolerances; converged columns are frozen. Returns
    one :class:`GissResult` per column, holding the x-iterate (the projected,
    constraint-satisfying variable, not the soft-thresholded copy).
    """
    S = as_matrix(Sigma, "Sigma", square=True)
    E = np.asarray(E, dtype=np.float64)
    if E.ndim == 1:
        E = E[:, None]
    n, k = E.shape
    if factor is None:
        factor = AdmmFactor.build(S, cfg.lam)
    rho = cfg.penalty_rho
    kappa = 1.0 / rho

    x = np.zeros((n, k))
    z = np.zeros((n, k))
    u = np.zeros((n, k))
    if factor.equality:
        offset = factor.mats["pinv"] @ E
    else:
        w = np.zeros((n, k))
        v = np.zeros((n, k))
        lo, hi = E - cfg.lam, E + cfg.lam

    iters = np.full(k, cfg.max_iters, dtype=np.int64)
    done = np.zeros(k, dtype=bool)
    live = np.arange(k)
    for it in range(1, cfg.max_iters + 1):
        zl = z[:, live]
        ul = u[:, live]
        if factor.equality:
            xl = factor.mats["proj"] @ (zl - ul) + offset[:, live]
            zn = shrink(xl + ul, kappa)
            ul = ul + xl - zn
            r_pri = _colnorm(xl - zn)
            r_dual = rho * _colnorm(zn - zl)
        else:
            wl = w[:, live]
            vl = v[:, live]
            xl = factor.mats["K"] @ (zl - ul) + factor.mats["KSt"] @ (wl - vl)
            sx = S @ xl
            zn = shrink(xl + ul, kappa)
            wn = np.clip(sx + vl, lo[:, live], hi[:, live])
            ul = ul + xl - zn
            v[:, live] = vl + sx - wn
            w[:, live] = wn
            r_pri = np.sqrt(_colnorm(xl - zn) ** 2 + _colnorm(sx - wn) ** 2)
            r_dual = rho * _colnorm((zn - zl) + S.T @ (wn - wl))
        x[:, live] = xl
        z[:, live] = zn
        u[:, live] = ul
        conv = (r_pri <= cfg.primal_tol) & (r_dual <= cfg.dual_tol)
        if conv.any():
            finished = live[conv]
            iters[finished] = it
            done[finished] = True
            live = live[~conv]
            if live.size == 0:
                break

    out = []
    for j in range(k):
        beta = x[:, j].copy()
        res = float(np.abs(S @ beta - E[:, j]).max(initial=0.0))
        if not done[j]:
            term = Termination.MAX_ITERS
        elif res <= cfg.lam + 10.0 * cfg.primal_tol:
            term = Termination.RESIDUAL_BELOW_LAMBDA
        else:
            term = Termination.STAGNATED
        out.append(GissResult(
            beta=beta,
            iterations=int(iters[j]),
            final_residual_inf=res,
            support=np.flatnonzero(beta),
            termination=term,
            regularized=factor.regularized,
            extra={"converged": bool(done[j])},
        ))
    return out


def admm_solve_column(Sigma, e, cfg, factor=None):
    """Single-column ADMM; see :func:`admm_solve_columns`."""
    e = as_vector(e, "e")
    return admm_solve_columns(Sigma, e[:, None], cfg, factor)[0]

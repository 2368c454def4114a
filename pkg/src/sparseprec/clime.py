"""Column-wise precision matrix estimation (CLIME decomposition).

Each column ``beta_i`` of the estimate approximately solves
``min |beta|_1  s.t.  Sigma_gamma beta = e_i`` with the stopping rule
``|Sigma_gamma beta - e_i|_inf <= lambda``. The raw column matrix is then
symmetrized by picking the smaller-magnitude entry of each off-diagonal pair
and finally hard-thresholded.
"""
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from . import _kernels
from .baselines import AdmmConfig, AdmmFactor, HtpConfig, admm_solve_columns, htp_solve_column
from .errors import BoundDegenerate, NumericalError
from .giss import GissConfig, GissResult, Termination, giss_solve_column
from .linalg import as_matrix, matrix_l1_norm, spectral_norm

SOLVERS = ("giss", "htp", "admm", "admm_lambda")
ADMM_CHUNK = 64


def default_workers():
    env = os.environ.get("SPM_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def gamma_preset(p, n):
    """Ridge level ``sqrt(log p / n)``."""
    return math.sqrt(math.log(p) / n)


@dataclass
class EstimatorConfig:
    """How to estimate a precision matrix from a covariance matrix.

    Exactly one of ``lam`` (fixed) or ``c_lambda`` (``lambda = c sqrt(log p / n)``)
    must be given; a fixed value wins when both are set. ``htp_s`` is either one
    sparsity for every column or a per-column sequence.
    """

    solver: str = "giss"
    lam: Optional[float] = None
    c_lambda: Optional[float] = None
    gamma: float = 0.0
    rho: float = 1.0
    htp_s: Union[int, Sequence[int], None] = None
    threshold: float = 0.0
    parallel_columns: bool = False
    workers: Optional[int] = None
    giss_max_iters: Optional[int] = None
    admm: AdmmConfig = field(default_factory=AdmmConfig)

    def __post_init__(self):
        if self.solver not in SOLVERS:
            raise ValueError(f"unknown solver {self.solver!r}; choose from {SOLVERS}")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if self.threshold < 0:
            raise ValueError("threshold must be >= 0")
        if self.solver == "htp" and self.htp_s is None:
            raise ValueError("htp requires htp_s")

    def resolve_lambda(self, p, n_samples=0):
        if self.lam is not None:
            lam = float(self.lam)
        elif self.c_lambda is not None:
            if n_samples <= 0 or p < 2:
                raise ValueError("scaled lambda rule needs n_samples > 0 and p >= 2")
            lam = self.c_lambda * math.sqrt(math.log(p) / n_samples)
        else:
            raise ValueError("either lam or c_lambda must be set")
        if lam < 0:
            raise ValueError("lambda must be >= 0")
        return lam


@dataclass
class PrecisionEstimate:
    omega_hat: np.ndarray
    column_results: List[GissResult]
    symmetrized: bool
    lambda_used: float
    gamma_used: float
    omega_raw: np.ndarray = field(repr=False, default=None)

    @property
    def failures(self):
        return sum(r.termination is not Termination.RESIDUAL_BELOW_LAMBDA for r in self.column_results)

    def telemetry_lines(self):
        return [json.dumps(r.telemetry(i), sort_keys=True) for i, r in enumerate(self.column_results)]


def regularize_covariance(Sigma, gamma):
    """``Sigma + gamma I``; ``gamma == 0`` returns an unchanged copy."""
    if gamma < 0:
        raise ValueError("gamma must be >= 0")
    S = np.array(as_matrix(Sigma, "Sigma", square=True), order="F", copy=True)
    if gamma:
        S[np.diag_indices_from(S)] += gamma
    return S


def symmetrize(Omega1):
    """Keep the smaller-magnitude entry of every (i, j)/(j, i) pair.

    Ties go to the entry above the diagonal.
    """
    A = as_matrix(Omega1, "Omega", square=True)
    return np.asfortranarray(_kernels.symmetrize_min(A))


def _failed(n, exc):
    return GissResult(
        beta=np.zeros(n),
        iterations=0,
        final_residual_inf=float("nan"),
        support=np.zeros(0, dtype=np.int64),
        termination=Termination.STAGNATED,
        extra={"error": f"{type(exc).__name__}: {exc}"},
    )


def _column_tasks(S, cfg, lam):
    """Return a list of callables, each producing ``[(column, result), ...]``."""
    n = S.shape[0]
    eye = np.eye(n)

    if cfg.solver in ("admm", "admm_lambda"):
        acfg = AdmmConfig(
            penalty_rho=cfg.admm.penalty_rho,
            max_iters=cfg.admm.max_iters,
            primal_tol=cfg.admm.primal_tol,
            dual_tol=cfg.admm.dual_tol,
            lam=lam if cfg.solver == "admm_lambda" else 0.0,
        )
        factor = AdmmFactor.build(S, acfg.lam)

        def admm_chunk(cols):
            res = admm_solve_columns(S, eye[:, cols], acfg, factor)
            return list(zip(cols, res))

        chunks = [list(range(a, min(a + ADMM_CHUNK, n))) for a in range(0, n, ADMM_CHUNK)]
        return [lambda c=c: admm_chunk(c) for c in chunks]

    if cfg.solver == "giss":
        gcfg = GissConfig(lam=lam, rho=cfg.rho, max_iters=cfg.giss_max_iters)

        def solve(i):
            return giss_solve_column(S, eye[:, i], gcfg)
    else:
        s_per_col = np.broadcast_to(np.asarray(cfg.htp_s, dtype=np.int64), (n,))
        norm = spectral_norm(S)

        def solve(i):
            hcfg = HtpConfig(sparsity_s=int(max(1, min(s_per_col[i], n))), tol=max(lam, 1e-12))
            return htp_solve_column(S, eye[:, i], hcfg, norm)

    def one(i):
        try:
            return [(i, solve(i))]
        except NumericalError as exc:
            return [(i, _failed(n, exc))]

    return [lambda i=i: one(i) for i in range(n)]


def estimate_precision(Sigma, cfg, n_samples=0):
    """Estimate the precision matrix column by column.

    Column failures (stagnation, iteration cap, numerical errors) are recorded
    in ``column_results`` and never abort the whole estimate. The output does
    not depend on ``parallel_columns`` or the worker count.
    """
    S0 = as_matrix(Sigma, "Sigma", square=True)
    scale = np.abs(S0).max(initial=0.0)
    if np.abs(S0 - S0.T).max(initial=0.0) > 1e-10 * max(scale, 1.0):
        raise ValueError("Sigma must be symmetric")
    n = S0.shape[0]
    lam = cfg.resolve_lambda(n, n_samples)
    S = regularize_covariance(S0, cfg.gamma)

    tasks = _column_tasks(S, cfg, lam)
    workers = cfg.workers or default_workers()
    if cfg.parallel_columns and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda f: f(), tasks))
    else:
        batches = [f() for f in tasks]

    results = [None] * n
    for batch in batches:
        for i, r in batch:
            results[i] = r
    raw = np.asfortranarray(np.column_stack([r.beta for r in results]))
    omega = symmetrize(raw)
    if cfg.threshold > 0:
        omega[np.abs(omega) <= cfg.threshold] = 0.0
    return PrecisionEstimate(
        omega_hat=omega,
        column_results=results,
        symmetrized=True,
        lambda_used=lam,
        gamma_used=cfg.gamma,
        omega_raw=raw,
    )


def write_telemetry(path, estimate):
    with open(path, "w") as fh:
        for line in estimate.telemetry_lines():
            fh.write(line + "\n")


def check_lemma1_hypothesis(Omega0, Sigma_n, Sigma0, gamma, lam):
    """Evaluate the deviation condition under which the sup-norm error bound holds.

    The condition is ``|Omega0|_L1 (max|Sigma_n - Sigma0| + gamma) <= lam <= 1/p``
    and the bound is ``(3 + (1 + 3 p lam) / (1 - p lam)) lam |Omega0|_L1``.
    Raises :class:`BoundDegenerate` when ``p lam >= 1``.
    """
    Omega0 = as_matrix(Omega0, "Omega0", square=True)
    Sigma_n = as_matrix(Sigma_n, "Sigma_n", square=True)
    Sigma0 = as_matrix(Sigma0, "Sigma0", square=True)
    p = Omega0.shape[0]
    if Sigma_n.shape != (p, p) or Sigma0.shape != (p, p):
        raise ValueError("all matrices must be p x p")
    if p * lam >= 1.0:
        raise BoundDegenerate(f"p * lambda = {p * lam} >= 1")
    omega_l1 = matrix_l1_norm(Omega0)
    max_dev = float(np.abs(Sigma_n - Sigma0).max(initial=0.0))
    product = omega_l1 * (max_dev + gamma)
    factor = 3.0 + (1.0 + 3.0 * p * lam) / (1.0 - p * lam)
    return {
        "omega0_l1": omega_l1,
        "max_deviation": max_dev,
        "product": product,
        "lambda": lam,
        "inv_p": 1.0 / p,
        "lower_holds": product <= lam,
        "upper_holds": lam <= 1.0 / p,
        "holds": product <= lam <= 1.0 / p,
        "error_bound": factor * lam * omega_l1,
    }

"""Loss norms, support recovery rates and theory-side diagnostics."""
import math
from dataclasses import asdict, dataclass, field
from typing import Dict

import numpy as np

from .errors import BoundDegenerate, DimensionMismatch
from .linalg import matrix_inf_norm, matrix_l1_norm, spectral_norm

OPERATOR_TOL = 1e-8


@dataclass
class MetricsReport:
    frobenius: float
    matrix_l1: float
    operator: float
    elem_inf: float
    relative_frobenius: float
    tp_pct: float
    tn_pct: float
    nnz_at: Dict[float, int] = field(default_factory=dict)
    wall_time_s: float = 0.0

    def to_dict(self):
        d = asdict(self)
        d["nnz_at"] = {repr(float(k)): int(v) for k, v in self.nnz_at.items()}
        return d


@dataclass
class IncoherenceReport:
    mu: float
    s: int
    theta: float
    vartheta: float
    a1_holds: bool


def compare(estimate, truth, thresholds=(1e-4,), wall_time_s=0.0):
    """Losses of ``estimate - truth`` plus support recovery at ``thresholds[0]``.

    TP is the percentage of truly nonzero entries with ``|estimate| > t0``; TN the
    percentage of true zeros with ``|estimate| <= t0``. An empty class counts as
    100%. ``nnz_at`` holds ``#{|estimate| > t}`` for every requested threshold.
    """
    est = np.asarray(estimate, dtype=np.float64)
    tru = np.asarray(truth, dtype=np.float64)
    if est.shape != tru.shape:
        raise DimensionMismatch(f"estimate {est.shape} vs truth {tru.shape}")
    thresholds = list(thresholds) or [0.0]
    delta = est - tru
    frob = float(np.linalg.norm(delta))
    tnorm = float(np.linalg.norm(tru))
    t0 = thresholds[0]
    true_nz = tru != 0.0
    detected = np.abs(est) > t0
    n_pos = int(true_nz.sum())
    n_neg = true_nz.size - n_pos
    tp = 100.0 * np.count_nonzero(detected & true_nz) / n_pos if n_pos else 100.0
    tn = 100.0 * np.count_nonzero(~detected & ~true_nz) / n_neg if n_neg else 100.0
    return MetricsReport(
        frobenius=frob,
        matrix_l1=matrix_l1_norm(delta),
        operator=spectral_norm(delta, tol=OPERATOR_TOL),
        elem_inf=float(np.abs(delta).max(initial=0.0)),
        relative_frobenius=frob / tnorm if tnorm else float("inf") if frob else 0.0,
        tp_pct=float(tp),
        tn_pct=float(tn),
        nnz_at={float(t): int(np.count_nonzero(np.abs(est) > t)) for t in thresholds},
        wall_time_s=float(wall_time_s),
    )


def incoherence(Sigma, s):
    """Mutual incoherence of the columns under the ``(1/p)`` inner product.

    The maximum runs over distinct column pairs only.
    """
    S = np.asarray(Sigma, dtype=np.float64)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ValueError("Sigma must be square")
    if s < 1:
        raise ValueError("s must be >= 1")
    p = S.shape[0]
    G = np.abs(S.T @ S) / p
    np.fill_diagonal(G, 0.0)
    mu = float(G.max(initial=0.0))
    theta = 1.0 - mu * (s - 1)
    vartheta = (1.0 - mu * (2 * s - 1)) / theta if theta != 0 else float("-inf")
    return IncoherenceReport(mu=mu, s=int(s), theta=theta, vartheta=vartheta,
                             a1_holds=mu < 1.0 / (2 * s - 1))


def gaussian_stop_thresholds(Sigma, epsilon, varsigma, s=1):
    """Stopping levels and minimum-signal conditions for Gaussian residual noise.

    ``epsilon`` is the noise standard deviation, ``varsigma`` the tail
    parameter of the sup-norm event and ``s`` the column sparsity used for the
    incoherence constant theta. Returns a dict with the two stopping levels
    (``b_inf_l2case``, ``b_inf_linfcase``) and the matching ``beta_min_*``
    lower bounds; the latter are ``inf`` when theta <= 0.
    """
    S = np.asarray(Sigma, dtype=np.float64)
    p = S.shape[0]
    if p < 2:
        raise ValueError("p must be >= 2")
    if epsilon < 0 or varsigma <= 0:
        raise ValueError("epsilon must be >= 0 and varsigma > 0")
    logp = math.log(p)
    l2_level = math.sqrt(1.0 + 2.0 * math.sqrt(logp / p))
    col_pnorm = float(np.sqrt((S * S).sum(axis=0)).max()) / math.sqrt(p)
    l1 = matrix_l1_norm(S)
    inc = incoherence(S, s)
    theta = inc.theta
    b_linf = 2.0 * epsilon / l1 * math.sqrt(col_pnorm * (1.0 + varsigma) * logp)
    if theta > 0:
        logs = math.log(s)
        bmin_l2 = 2.0 * epsilon / math.sqrt(theta) * (l2_level + math.sqrt(logs / p))
        bmin_linf = (2.0 * epsilon * math.sqrt(col_pnorm * (1.0 + varsigma) * s * logp) / (p * theta * l1)
                     + 2.0 * epsilon * math.sqrt(logs / (p * theta)))
    else:
        bmin_l2 = bmin_linf = float("inf")
    return {
        "b_inf_l2case": epsilon * l2_level,
        "b_inf_linfcase": b_linf,
        "beta_min_l2": bmin_l2,
        "beta_min_linf": bmin_linf,
        "mu": inc.mu,
        "theta": theta,
        "max_col_pnorm": col_pnorm,
        "sigma_l1": l1,
    }


def theorem_bounds(M, p, n, constant_C, lam):
    """Sup-norm error bound ``C (3 + (1+3p lam)/(1-p lam)) M^2 sqrt(log p / n)``.

    Also reports the squared-error rate ``M^4 log p / n`` of the ridge variant.
    """
    if p * lam >= 1.0:
        raise BoundDegenerate(f"p * lambda = {p * lam} >= 1")
    if M <= 0 or constant_C <= 0:
        raise ValueError("M and constant_C must be positive")
    rate = math.sqrt(math.log(p) / n)
    factor = 3.0 + (1.0 + 3.0 * p * lam) / (1.0 - p * lam)
    return {
        "factor": factor,
        "rate": rate,
        "sup_norm_bound": constant_C * factor * M * M * rate,
        "sq_rate": M ** 4 * math.log(p) / n,
    }


def norm_consistency_ok(report, delta):
    """Standard norm inequalities for a report computed from ``delta``."""
    p = delta.shape[0]
    ok = report.elem_inf <= report.frobenius * (1 + 1e-12) + 1e-300
    ok &= report.frobenius <= math.sqrt(p) * report.matrix_l1 * (1 + 1e-12) + 1e-300
    ok &= report.operator <= math.sqrt(report.matrix_l1 * matrix_inf_norm(delta)) * (1 + 1e-9) + 1e-12
    return bool(ok)

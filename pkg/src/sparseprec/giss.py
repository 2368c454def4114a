"""Greedy inverse scale space solver with acceleration factor rho (GISS^rho).

Solves ``min |beta|_1  s.t.  Sigma beta = e`` approximately, stopping as soon
as ``|e - Sigma beta|_inf <= lambda``. The dual variable ``p`` evolves
linearly between events; at each event time the coordinates whose clipped
dual reaches the unit bound join the active set and the primal is refit by
least squares on that set.
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Tuple

import numpy as np

from . import _kernels
from .errors import NoCrossing, ZeroGradient
from .linalg import as_matrix, as_vector, restricted_least_squares

ACTIVE_TOL = 1e-12


class Termination(str, Enum):
    RESIDUAL_BELOW_LAMBDA = "ResidualBelowLambda"
    STAGNATED = "Stagnated"
    MAX_ITERS = "MaxIters"


@dataclass
class GissConfig:
    """Parameters of one column solve.

    ``lam`` is the stopping tolerance on the residual sup-norm and ``rho`` the
    time-stretch factor. ``max_iters=None`` means ``2 p``. Correlations with
    magnitude at most ``ls_residual_tol * |Sigma^T e|_inf`` are treated as
    zero when looking for the next crossing.
    """

    lam: float = 0.0
    rho: float = 1.0
    max_iters: Optional[int] = None
    ls_residual_tol: float = 1e-10
    record_trace: bool = False

    def __post_init__(self):
        if not self.rho >= 1.0:
            raise ValueError(f"rho must be >= 1, got {self.rho}")
        if not self.lam >= 0.0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")
        if self.max_iters is not None and self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class GissState:
    t: float
    p: np.ndarray
    p_tilde: np.ndarray
    active: np.ndarray
    beta: np.ndarray
    residual: np.ndarray
    iter: int
    grad_scale: float
    regularized: bool = False

    @property
    def residual_inf(self):
        return float(np.abs(self.residual).max(initial=0.0))


@dataclass
class GissResult:
    """Outcome of a single column solve (shared by all solvers)."""

    beta: np.ndarray
    iterations: int
    final_residual_inf: float
    support: np.ndarray
    termination: Termination
    trace: Optional[List[Tuple[float, float, int]]] = None
    regularized: bool = False
    extra: dict = field(default_factory=dict)

    def telemetry(self, column):
        return {
            "column": int(column),
            "iterations": int(self.iterations),
            "final_residual": float(self.final_residual_inf),
            "support_size": int(self.support.size),
            "termination": self.termination.value,
        }


def _clip(p):
    """Componentwise clip to [-1, 1]; values within ACTIVE_TOL of the bound snap onto it."""
    pt = np.clip(p, -1.0, 1.0)
    sat = np.abs(pt) >= 1.0 - ACTIVE_TOL
    pt[sat] = np.sign(pt[sat])
    return pt


def _active_from(p_tilde):
    return np.flatnonzero(np.abs(p_tilde) == 1.0)


def giss_init(Sigma, e):
    """Initial state: ``t_1 = 1 / |Sigma^T e|_inf`` and ``p = t_1 Sigma^T e``."""
    Sigma = as_matrix(Sigma, "Sigma", square=True)
    e = as_vector(e, "e", Sigma.shape[0])
    g = Sigma.T @ e
    scale = float(np.abs(g).max(initial=0.0))
    if scale == 0.0:
        raise ZeroGradient("Sigma^T e is zero; target not reachable")
    t = 1.0 / scale
    p = t * g
    pt = _clip(p)
    return GissState(
        t=t,
        p=p,
        p_tilde=pt,
        active=_active_from(pt),
        beta=np.zeros(Sigma.shape[1]),
        residual=e.copy(),
        iter=0,
        grad_scale=scale,
    )


def giss_step(state, Sigma, e, cfg):
    """One event of the flow: refit on the active set, then advance the dual.

    If the refit already meets the stopping rule the dual is not advanced.
    Raises :class:`NoCrossing` (carrying the refit state as ``exc.state``) when
    the residual is above ``cfg.lam`` but no inactive coordinate can reach the
    bound.
    """
    active = state.active
    beta, reg = restricted_least_squares(Sigma, e, active, full_output=True)
    residual = e - Sigma @ beta
    refit = GissState(
        t=state.t,
        p=state.p,
        p_tilde=state.p_tilde,
        active=active,
        beta=beta,
        residual=residual,
        iter=state.iter + 1,
        grad_scale=state.grad_scale,
        regularized=state.regularized or reg,
    )
    if refit.residual_inf <= cfg.lam:
        return refit

    g = Sigma.T @ residual
    mask = np.zeros(g.shape[0], dtype=np.bool_)
    mask[active] = True
    dt = _kernels.next_crossing(state.p_tilde, g, mask, cfg.ls_residual_tol * state.grad_scale)
    if not np.isfinite(dt):
        exc = NoCrossing("no inactive coordinate reaches the unit bound")
        exc.state = refit
        raise exc

    t_next = cfg.rho * (state.t + dt)
    p = state.p_tilde + (t_next - state.t) * g
    # orthogonality of the refit keeps the dual fixed on the active set
    p[active] = state.p_tilde[active]
    pt = _clip(p)
    refit.t = t_next
    refit.p = p
    refit.p_tilde = pt
    refit.active = _active_from(pt)
    return refit


def giss_solve_column(Sigma, e, cfg=None):
    """Run GISS^rho on one column problem until the stopping rule holds."""
    cfg = cfg or GissConfig()
    Sigma = as_matrix(Sigma, "Sigma", square=True)
    e = as_vector(e, "e", Sigma.shape[0])
    n = Sigma.shape[0]
    max_iters = cfg.max_iters if cfg.max_iters is not None else 2 * n
    trace = [] if cfg.record_trace else None

    state = giss_init(Sigma, e)
    termination = Termination.MAX_ITERS
    if state.residual_inf <= cfg.lam:
        termination = Termination.RESIDUAL_BELOW_LAMBDA
    else:
        for _ in range(max_iters):
            try:
                state = giss_step(state, Sigma, e, cfg)
            except NoCrossing as exc:
                state = exc.state
                termination = Termination.STAGNATED
            if trace is not None:
                trace.append((state.t, state.residual_inf, int(np.count_nonzero(state.beta))))
            if termination is Termination.STAGNATED:
                break
            if state.residual_inf <= cfg.lam:
                termination = Termination.RESIDUAL_BELOW_LAMBDA
                break

    beta = state.beta
    return GissResult(
        beta=beta,
        iterations=state.iter,
        final_residual_inf=float(np.abs(e - Sigma @ beta).max(initial=0.0)),
        support=np.flatnonzero(beta),
        termination=termination,
        trace=trace,
        regularized=state.regularized,
    )

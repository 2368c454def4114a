"""Ground truth and synthetic data for the benchmark scenarios.

Random streams
--------------
All randomness comes from ``numpy.random.Philox`` (Philox4x64-10, a
counter-based generator) keyed through ``numpy.random.SeedSequence`` with
``entropy=seed`` and a ``spawn_key`` naming the stream. Replicate seeds are
derived the same way from ``(master_seed, replicate[, attempt])``, so every
replicate owns an independent stream regardless of scheduling.

Standard normals are produced with the Box-Muller transform from the uniform
doubles of the stream: for ``m = ceil(k / 2)`` pairs ``(u1, u2)``, with
``u1`` mapped to ``(0, 1]``, the first ``m`` values are
``sqrt(-2 ln u1) cos(2 pi u2)`` and the next ``m`` are the matching sines;
the vector is truncated to ``k``.
"""
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateDraw, TooFewSamples
from .linalg import as_matrix, cho_solve, cholesky, extreme_eigenvalues

STREAM_GRAPH = 1
STREAM_SAMPLE = 2
EDGE_PROB = 0.1
EDGE_VALUE = 0.5


def make_rng(seed, *keys):
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in keys))
    return np.random.Generator(np.random.Philox(ss))


def derive_seed(master_seed, *keys):
    """64-bit child seed for ``(master_seed, *keys)``."""
    ss = np.random.SeedSequence(entropy=int(master_seed), spawn_key=tuple(int(k) for k in keys))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def standard_normals(rng, size):
    """Box-Muller normals from the generator's uniform stream."""
    size = int(size)
    m = (size + 1) // 2
    u1 = 1.0 - rng.random(m)
    u2 = rng.random(m)
    rad = np.sqrt(-2.0 * np.log(u1))
    ang = 2.0 * np.pi * u2
    return np.concatenate([rad * np.cos(ang), rad * np.sin(ang)])[:size]


@dataclass
class ScenarioSpec:
    case: str
    p: int
    n: int = 0
    seed: int = 0
    replicate: int = 0
    threshold: float = 1e-4

    def __post_init__(self):
        if self.case not in ("case1", "case2"):
            raise ValueError(f"unknown case {self.case!r}")
        if self.p < 2:
            raise ValueError("p must be >= 2")
        if self.case == "case2" and self.n < 1:
            raise ValueError("case2 requires n >= 1")

    def to_dict(self):
        return asdict(self)


@dataclass
class GroundTruth:
    sigma: np.ndarray
    omega: np.ndarray
    support_mask: np.ndarray
    info: Optional[dict] = None


def gen_case1(p):
    """AR(1) covariance ``0.5^|i-j|`` and its exact tridiagonal inverse."""
    if p < 2:
        raise ValueError("p must be >= 2")
    idx = np.arange(p)
    sigma = np.asfortranarray(0.5 ** np.abs(idx[:, None] - idx[None, :]))
    omega = np.zeros((p, p), order="F")
    omega[idx, idx] = 5.0 / 3.0
    omega[0, 0] = omega[-1, -1] = 4.0 / 3.0
    off = np.arange(p - 1)
    omega[off, off + 1] = omega[off + 1, off] = -2.0 / 3.0
    return GroundTruth(sigma, omega, omega != 0.0)


def gen_case2(p, seed):
    """Random sparse precision matrix with condition number ``p`` before normalization.

    Off-diagonal pairs of ``B`` are 0.5 with probability 0.1; ``delta`` solves
    ``(l_max + delta) / (l_min + delta) = p``; ``B + delta I`` is rescaled to a
    unit diagonal.
    """
    if p < 2:
        raise ValueError("p must be >= 2")
    rng = make_rng(seed, STREAM_GRAPH)
    iu = np.triu_indices(p, 1)
    draws = rng.random(iu[0].size)
    B = np.zeros((p, p))
    B[iu] = np.where(draws < EDGE_PROB, EDGE_VALUE, 0.0)
    B = B + B.T
    lam_min, lam_max = extreme_eigenvalues(B)
    if lam_max - lam_min <= 1e-12 * max(1.0, abs(lam_max)):
        raise DegenerateDraw(f"graph draw for seed {seed} has a single eigenvalue")
    delta = (lam_max - p * lam_min) / (p - 1)
    A = B + delta * np.eye(p)
    d = np.sqrt(np.diag(A))
    omega = A / np.outer(d, d)
    np.fill_diagonal(omega, 1.0)
    omega = np.asfortranarray(omega)
    L = cholesky(omega)
    inv = cho_solve(L, np.eye(p))
    sigma = np.asfortranarray((inv + inv.T) / 2.0)
    info = {
        "delta": delta,
        "lambda_min_B": lam_min,
        "lambda_max_B": lam_max,
        "condition_before_normalization": (lam_max + delta) / (lam_min + delta),
        "edges": int(np.count_nonzero(B) // 2),
    }
    return GroundTruth(sigma, omega, omega != 0.0, info)


def sample_gaussian(Sigma, n, seed):
    """``n`` rows drawn from ``N(0, Sigma)`` as ``z @ L.T`` with ``L = chol(Sigma)``."""
    Sigma = as_matrix(Sigma, "Sigma", square=True)
    p = Sigma.shape[0]
    L = cholesky(Sigma)
    if n == 0:
        return np.zeros((0, p))
    z = standard_normals(make_rng(seed, STREAM_SAMPLE), n * p).reshape(n, p)
    return z @ L.T


def sample_covariance(data):
    """Unbiased sample covariance with ``1 / (n - 1)`` scaling; exactly symmetric."""
    X = np.asarray(data, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError("data must be an n x p matrix")
    n = X.shape[0]
    if n < 2:
        raise TooFewSamples(f"need at least 2 samples, got {n}")
    Xc = X - X.mean(axis=0)
    S = (Xc.T @ Xc) / (n - 1)
    return np.asfortranarray((S + S.T) / 2.0)


def draw_case2(p, master_seed, replicate, max_attempts=100):
    """Ground truth for one replicate, redrawing on degenerate graphs.

    Returns ``(truth, seed_used, redraws)``.
    """
    for attempt in range(max_attempts):
        seed = derive_seed(master_seed, replicate, attempt)
        try:
            return gen_case2(p, seed), seed, attempt
        except DegenerateDraw:
            continue
    raise DegenerateDraw(f"{max_attempts} consecutive degenerate draws")

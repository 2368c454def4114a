"""Benchmark drivers for the simulated scenarios.

Every table written here is a pure function of its configuration and seed.
Wall-clock timings are kept out of the tables and go to ``timings.csv``.
Standard errors are ``sd / sqrt(R)`` with ``sd`` the sample standard deviation
(``ddof=1``) over ``R`` replicates; ``SE = 0`` when ``R = 1``.
"""
import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .baselines import AdmmConfig
from .clime import EstimatorConfig, default_workers, estimate_precision, gamma_preset
from .metrics import compare
from .simulation import draw_case2, gen_case1, sample_covariance, sample_gaussian

CSV_VERSION = "sparseprec-bench-csv v1"
SE_NOTE = "SE = sample standard deviation (ddof=1) / sqrt(replicates)"
SOLVER_LABELS = {"giss": "GISS", "htp": "HTP", "admm": "ADMM", "admm_lambda": "ADMM_lambda"}
LOSS_KEYS = ("frobenius", "matrix_l1", "operator", "elem_inf")
CASE1_ADMM = AdmmConfig(primal_tol=1e-9, dual_tol=1e-9, max_iters=10000)
CASE2_ADMM = AdmmConfig(primal_tol=1e-6, dual_tol=1e-6, max_iters=10000)


class RunningStats:
    """Welford accumulator for mean and standard error."""

    def __init__(self):
        self.count = 0
        self.mean = 0.0
        self._m2 = 0.0

    def push(self, x):
        self.count += 1
        d = x - self.mean
        self.mean += d / self.count
        self._m2 += d * (x - self.mean)

    @property
    def se(self):
        if self.count < 2:
            return 0.0
        return math.sqrt(self._m2 / (self.count - 1)) / math.sqrt(self.count)


def parse_solvers(solvers):
    if isinstance(solvers, str):
        solvers = [s.strip() for s in solvers.split(",") if s.strip()]
    bad = [s for s in solvers if s not in SOLVER_LABELS]
    if bad or not solvers:
        raise ValueError(f"unknown solvers {bad}; choose from {list(SOLVER_LABELS)}")
    return list(solvers)


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows, columns, title):
    buf = io.StringIO()
    buf.write(f"# {CSV_VERSION}; {title}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r[c]) for c in columns])
    return buf.getvalue()


def _write(out, name, text):
    if out is None:
        return
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    (path / name).write_text(text)


def _map(fn, items, workers):
    workers = workers or default_workers()
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


CASE1_COLUMNS = ["solver", "nnz_1e-8", "nnz_1e-4", "nnz_raw_1e-8", "relative_frobenius", "failures"]


def run_case1(p, lam, solvers, out=None, rho=1.0, admm=CASE1_ADMM):
    """Exact-covariance AR(1) benchmark. Returns one dict per solver.

    Each row also carries ``time_s``, which is written only to ``timings.csv``.
    """
    solvers = parse_solvers(solvers)
    truth = gen_case1(p)
    rows = []
    for s in solvers:
        cfg = EstimatorConfig(solver=s, lam=lam, rho=rho, htp_s=min(3, p), admm=admm)
        t0 = time.perf_counter()
        est = estimate_precision(truth.sigma, cfg)
        elapsed = time.perf_counter() - t0
        m = compare(est.omega_hat, truth.omega, [1e-8, 1e-4])
        rows.append({
            "solver": SOLVER_LABELS[s],
            "nnz_1e-8": m.nnz_at[1e-8],
            "nnz_1e-4": m.nnz_at[1e-4],
            "nnz_raw_1e-8": int(np.count_nonzero(np.abs(est.omega_raw) > 1e-8)),
            "relative_frobenius": m.relative_frobenius,
            "failures": est.failures,
            "time_s": elapsed,
        })
    _write(out, "case1.csv", rows_to_csv(rows, CASE1_COLUMNS, f"case1 p={p} lambda={lam!r}"))
    _write(out, "timings.csv", rows_to_csv(rows, ["solver", "time_s"], "wall time, informational"))
    return rows


def _case2_replicate(p, n, c_lambda, seed, solvers, rho, threshold, gamma, replicate):
    truth, rep_seed, redraws = draw_case2(p, seed, replicate)
    S = sample_covariance(sample_gaussian(truth.sigma, n, rep_seed))
    s_true = np.count_nonzero(truth.omega, axis=0)
    g = gamma_preset(p, n) if gamma == "preset" else float(gamma)
    out = {}
    for s in solvers:
        cfg = EstimatorConfig(solver=s, c_lambda=c_lambda, rho=rho, htp_s=s_true, gamma=g,
                              threshold=threshold, admm=CASE2_ADMM)
        t0 = time.perf_counter()
        est = estimate_precision(S, cfg, n)
        elapsed = time.perf_counter() - t0
        out[s] = (compare(est.omega_hat, truth.omega, [threshold], elapsed), est.failures)
    return out, redraws


CASE2_COLUMNS = ["solver"] + [f"{k}_{stat}" for k in LOSS_KEYS for stat in ("mean", "se")] + ["failures"]
TPTN_COLUMNS = ["solver", "tp_pct_mean", "tp_pct_se", "tn_pct_mean", "tn_pct_se"]


def run_case2(p, n, c_lambda, replicates, seed, solvers, out=None, rho=1.0, threshold=0.05,
              gamma=0.0, workers=None):
    """Random sparse precision benchmark with sampled covariance.

    ``gamma`` is a ridge level or ``"preset"`` for ``sqrt(log p / n)``.
    Returns ``(loss_rows, tptn_rows, info)``.
    """
    if n < 2 or replicates < 1:
        raise ValueError("need n >= 2 and replicates >= 1")
    solvers = parse_solvers(solvers)
    reps = _map(
        lambda r: _case2_replicate(p, n, c_lambda, seed, solvers, rho, threshold, gamma, r),
        list(range(replicates)), workers)

    loss_rows, tptn_rows, timing_rows = [], [], []
    for s in solvers:
        stats = {k: RunningStats() for k in LOSS_KEYS + ("tp_pct", "tn_pct", "wall_time_s")}
        failures = 0
        for per_solver, _ in reps:
            m, f = per_solver[s]
            failures += f
            for k, acc in stats.items():
                acc.push(getattr(m, k))
        row = {"solver": SOLVER_LABELS[s], "failures": failures}
        for k in LOSS_KEYS:
            row[f"{k}_mean"] = stats[k].mean
            row[f"{k}_se"] = stats[k].se
        loss_rows.append(row)
        tptn_rows.append({
            "solver": SOLVER_LABELS[s],
            "tp_pct_mean": stats["tp_pct"].mean, "tp_pct_se": stats["tp_pct"].se,
            "tn_pct_mean": stats["tn_pct"].mean, "tn_pct_se": stats["tn_pct"].se,
        })
        timing_rows.append({"solver": SOLVER_LABELS[s], "time_s": stats["wall_time_s"].mean})
    info = {"redraws": sum(r for _, r in reps)}
    title = f"case2 p={p} n={n} c_lambda={c_lambda!r} replicates={replicates} seed={seed}; {SE_NOTE}"
    _write(out, "case2.csv", rows_to_csv(loss_rows, CASE2_COLUMNS, title))
    _write(out, "case2_tptn.csv", rows_to_csv(tptn_rows, TPTN_COLUMNS, title))
    _write(out, "timings.csv", rows_to_csv(timing_rows, ["solver", "time_s"], "mean wall time, informational"))
    return loss_rows, tptn_rows, info


SWEEP_COLUMNS = ["n", "elem_inf_mean", "elem_inf_se", "operator_mean", "operator_se",
                 "frobenius_mean", "frobenius_se"]


def run_convergence_sweep(p, n_list, c_lambda, replicates, seed, out=None, rho=1.0,
                          threshold=0.0, workers=None):
    """GISS losses as the sample size grows; one row per ``n``."""
    n_list = [int(n) for n in n_list]
    if n_list != sorted(n_list):
        raise ValueError("n_list must be ascending")
    rows = []
    for n in n_list:
        loss_rows, _, _ = run_case2(p, n, c_lambda, replicates, seed, ["giss"], None, rho,
                                    threshold, 0.0, workers)
        lr = loss_rows[0]
        rows.append({"n": n, **{k: lr[k] for k in SWEEP_COLUMNS[1:]}})
    title = f"sweep p={p} c_lambda={c_lambda!r} replicates={replicates} seed={seed}; {SE_NOTE}"
    _write(out, "sweep.csv", rows_to_csv(rows, SWEEP_COLUMNS, title))
    return rows

"""Compare the numba kernels with their pure-numpy twins.

Usage: python3 benchmarks/bench_numba.py [--repeat N]

Prints one line per kernel with the median time of each backend, then times
a whole GISS estimate in a child process for each backend (the backend is
fixed at import time, so the switch needs a fresh interpreter).
"""
import argparse
import os
import statistics
import subprocess
import sys
import time

import numpy as np

from sparseprec import _kernels as K


def _median_time(fn, repeat):
    fn()  # warm up, includes compilation on first call
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def kernel_cases(n=300):
    rng = np.random.default_rng(0)
    A = rng.standard_normal((n, n))
    S = np.asfortranarray(A @ A.T + n * np.eye(n))
    L, _, _ = K.np_cholesky(S)
    B = rng.standard_normal((n, 8))
    p = rng.uniform(-1, 1, n)
    g = rng.standard_normal(n)
    act = rng.random(n) < 0.1
    x = rng.standard_normal(n * n)
    return {
        "cholesky": lambda m: m["cholesky"](S),
        "solve_lower": lambda m: m["solve_lower"](L, B),
        "solve_lower_t": lambda m: m["solve_lower_t"](L, B),
        "next_crossing": lambda m: m["next_crossing"](p, g, act, 1e-12),
        "soft_threshold": lambda m: m["soft_threshold"](x, 0.3),
        "symmetrize_min": lambda m: m["symmetrize_min"](A),
    }


ESTIMATE = (
    "import time\n"
    "from sparseprec.clime import EstimatorConfig, estimate_precision\n"
    "from sparseprec.simulation import gen_case2\n"
    "t = gen_case2({p}, 1)\n"
    "estimate_precision(t.sigma[:20, :20], EstimatorConfig(lam=1e-6))\n"
    "t0 = time.perf_counter()\n"
    "estimate_precision(t.sigma, EstimatorConfig(lam=1e-6))\n"
    "print(time.perf_counter() - t0)\n"
)


def estimate_time(disable_numba, p):
    env = dict(os.environ, SPM_DISABLE_NUMBA="1" if disable_numba else "0")
    out = subprocess.run([sys.executable, "-c", ESTIMATE.format(p=p)], env=env,
                         capture_output=True, text=True, check=True)
    return float(out.stdout.strip())


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--n", type=int, default=300)
    ap.add_argument("--p", type=int, default=200, help="size of the whole-estimate run")
    args = ap.parse_args(argv)

    if K.numba is None:
        print("numba is not installed; only the numpy backend is available")
        return 1
    np_impl = {name: getattr(K, "np_" + name) for name in kernel_cases(2)}
    nb_impl = {name: getattr(K, "nb_" + name) for name in kernel_cases(2)}
    print(f"numba {K.numba.__version__}, numpy {np.__version__}, n={args.n}")
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}")
    for name, call in kernel_cases(args.n).items():
        a = _median_time(lambda: call(np_impl), args.repeat)
        b = _median_time(lambda: call(nb_impl), args.repeat)
        print(f"{name:<16}{1e3 * a:>12.3f}{1e3 * b:>12.3f}{a / b:>10.1f}")
    a = estimate_time(True, args.p)
    b = estimate_time(False, args.p)
    print(f"{'giss estimate':<16}{1e3 * a:>12.1f}{1e3 * b:>12.1f}{a / b:>10.1f}   (p={args.p})")
    return 0


if __name__ == "__main__":
    sys.exit(main())

"""Command-line interface: ``sparseprec <command> [options]``.

Exit codes: 0 success, 1 usage or input error (the config schema is printed
to stderr), 2 numerical failure.
"""
import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import numpy as np

from . import bench
from .clime import EstimatorConfig, check_lemma1_hypothesis, estimate_precision, gamma_preset, write_telemetry
from .errors import NumericalError
from .io import read_matrix, write_json, write_matrix
from .metrics import compare, gaussian_stop_thresholds, incoherence
from .simulation import gen_case1, gen_case2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def config_schema():
    return json.loads(resources.files("sparseprec").joinpath("config_schema.json").read_text())


def _floats(text):
    return [float(x) for x in str(text).split(",") if x.strip()]


def _ints(text):
    return [int(x) for x in str(text).split(",") if x.strip()]


def _build_parser():
    root = _Parser(prog="sparseprec", description="Sparse precision matrix estimation toolkit.")
    sub = root.add_subparsers(dest="command", parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON file whose keys override command-line flags")

    g = sub.add_parser("gen", help="write ground-truth matrices for a scenario")
    g.add_argument("case", choices=["case1", "case2"])
    g.add_argument("--p", type=int)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out")
    g.add_argument("--format", choices=["bin", "csv"], default="bin")
    common(g)

    e = sub.add_parser("estimate", help="estimate a precision matrix from a covariance file")
    e.add_argument("--sigma")
    e.add_argument("--solver", choices=list(bench.SOLVER_LABELS), default="giss")
    e.add_argument("--lambda", dest="lam", type=float)
    e.add_argument("--c-lambda", dest="c_lambda", type=float)
    e.add_argument("--n", type=int, default=0, help="sample size behind --sigma")
    e.add_argument("--gamma", type=float, default=0.0)
    e.add_argument("--gamma-preset", dest="gamma_preset", action="store_true")
    e.add_argument("--rho", type=float, default=1.0)
    e.add_argument("--htp-s", dest="htp_s", type=int)
    e.add_argument("--threshold", type=float, default=0.0)
    e.add_argument("--max-iters", dest="max_iters", type=int)
    e.add_argument("--parallel", action="store_true")
    e.add_argument("--out")
    e.add_argument("--telemetry")
    common(e)

    b = sub.add_parser("bench", help="run a simulation benchmark")
    b.add_argument("scenario", choices=["case1", "case2", "sweep"])
    b.add_argument("--p", type=int)
    b.add_argument("--lambda", dest="lam", type=float)
    b.add_argument("--n", type=int)
    b.add_argument("--n-list", dest="n_list", type=_ints)
    b.add_argument("--c-lambda", dest="c_lambda", type=float)
    b.add_argument("--replicates", type=int, default=20)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--solvers", default="giss,htp,admm,admm_lambda")
    b.add_argument("--rho", type=float, default=1.0)
    b.add_argument("--threshold", type=float)
    b.add_argument("--gamma", type=float, default=0.0)
    b.add_argument("--gamma-preset", dest="gamma_preset", action="store_true")
    b.add_argument("--out")
    common(b)

    m = sub.add_parser("metrics", help="compare an estimate with the truth")
    m.add_argument("--estimate")
    m.add_argument("--truth")
    m.add_argument("--thresholds", type=_floats, default=[1e-4])
    m.add_argument("--out")
    common(m)

    d = sub.add_parser("diagnose", help="incoherence, stopping levels and the deviation condition")
    d.add_argument("--sigma")
    d.add_argument("--s", type=int, default=1)
    d.add_argument("--epsilon", type=float)
    d.add_argument("--varsigma", type=float, default=1.0)
    d.add_argument("--omega0")
    d.add_argument("--sigma0")
    d.add_argument("--gamma", type=float, default=0.0)
    d.add_argument("--lambda", dest="lam", type=float)
    common(d)
    return root, sub.choices


def _apply_config(args, sub_parser):
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("--config must hold a JSON object")
    # either flat keys or a section named after the command, as in the schema
    if isinstance(cfg.get(args.command), dict):
        cfg = cfg[args.command]
    actions = {a.dest: a for a in sub_parser._actions}
    for key, value in cfg.items():
        dest = {"lambda": "lam"}.get(key, key.replace("-", "_"))
        if dest not in actions or dest in ("help", "config"):
            raise UsageError(f"unknown config key {key!r} for {args.command}")
        act = actions[dest]
        if isinstance(value, list):
            value = ",".join(str(v) for v in value)
        if act.type is not None and value is not None and not isinstance(value, bool):
            try:
                value = act.type(value if isinstance(value, str) else value)
            except (TypeError, ValueError) as exc:
                raise UsageError(f"bad value for {key!r}: {exc}") from None
        if act.choices is not None and value not in act.choices:
            raise UsageError(f"{key!r} must be one of {list(act.choices)}")
        setattr(args, dest, value)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + {"lam": "lambda"}.get(n, n).replace("_", "-") for n in missing)
        raise UsageError(f"{args.command}: missing required option(s) {flags}")


def _finite(obj):
    # strict JSON has no inf/nan; report them as null
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    return obj


def _emit(obj):
    sys.stdout.write(json.dumps(_finite(obj), indent=2, sort_keys=True, allow_nan=False) + "\n")


def _cmd_gen(args):
    _need(args, "p", "out")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.case == "case1":
        truth = gen_case1(args.p)
    else:
        truth = gen_case2(args.p, args.seed)
    ext = ".csv" if args.format == "csv" else ".bin"
    write_matrix(out / f"sigma{ext}", truth.sigma)
    write_matrix(out / f"omega{ext}", truth.omega)
    spec = {"case": args.case, "p": args.p, "seed": args.seed, "format": args.format,
            "info": truth.info or {}}
    write_json(out / "spec.json", spec)
    return 0


def _cmd_estimate(args):
    _need(args, "sigma", "out")
    if args.lam is None and args.c_lambda is None:
        raise UsageError("estimate: one of --lambda or --c-lambda is required")
    if args.solver == "htp" and args.htp_s is None:
        raise UsageError("estimate: --htp-s is required for the htp solver")
    S = read_matrix(args.sigma)
    gamma = args.gamma
    if args.gamma_preset:
        if args.n < 2:
            raise UsageError("estimate: --gamma-preset needs --n")
        gamma = gamma_preset(S.shape[0], args.n)
    cfg = EstimatorConfig(
        solver=args.solver, lam=args.lam, c_lambda=args.c_lambda, gamma=gamma, rho=args.rho,
        htp_s=args.htp_s, threshold=args.threshold, parallel_columns=args.parallel,
        giss_max_iters=args.max_iters,
    )
    est = estimate_precision(S, cfg, args.n)
    write_matrix(args.out, est.omega_hat)
    if args.telemetry:
        write_telemetry(args.telemetry, est)
    _emit({"lambda": est.lambda_used, "gamma": est.gamma_used, "failures": est.failures,
           "nnz": int(np.count_nonzero(est.omega_hat))})
    return 0


def _cmd_bench(args):
    if args.scenario == "case1":
        _need(args, "p", "lam")
        rows = bench.run_case1(args.p, args.lam, args.solvers, args.out, rho=args.rho)
        sys.stdout.write(bench.rows_to_csv(rows, bench.CASE1_COLUMNS, f"case1 p={args.p} lambda={args.lam!r}"))
        return 0
    if args.scenario == "case2":
        _need(args, "p", "n", "c_lambda")
        gamma = "preset" if args.gamma_preset else args.gamma
        threshold = 0.05 if args.threshold is None else args.threshold
        rows, tptn, _ = bench.run_case2(args.p, args.n, args.c_lambda, args.replicates, args.seed,
                                        args.solvers, args.out, args.rho, threshold, gamma)
        sys.stdout.write(bench.rows_to_csv(rows, bench.CASE2_COLUMNS, "case2 losses"))
        sys.stdout.write(bench.rows_to_csv(tptn, bench.TPTN_COLUMNS, "case2 support recovery"))
        return 0
    _need(args, "p", "n_list", "c_lambda")
    rows = bench.run_convergence_sweep(args.p, args.n_list, args.c_lambda, args.replicates, args.seed,
                                       args.out, args.rho, args.threshold or 0.0)
    sys.stdout.write(bench.rows_to_csv(rows, bench.SWEEP_COLUMNS, "sweep"))
    return 0


def _cmd_metrics(args):
    _need(args, "estimate", "truth")
    report = compare(read_matrix(args.estimate), read_matrix(args.truth), args.thresholds)
    d = report.to_dict()
    if args.out:
        write_json(args.out, _finite(d))
    _emit(d)
    return 0


def _cmd_diagnose(args):
    _need(args, "sigma")
    S = read_matrix(args.sigma)
    inc = incoherence(S, args.s)
    out = {"incoherence": {"mu": inc.mu, "s": inc.s, "theta": inc.theta,
                           "vartheta": inc.vartheta, "a1_holds": inc.a1_holds}}
    if args.epsilon is not None:
        out["stopping"] = gaussian_stop_thresholds(S, args.epsilon, args.varsigma, args.s)
    if args.omega0 or args.sigma0:
        _need(args, "omega0", "sigma0", "lam")
        out["deviation_condition"] = check_lemma1_hypothesis(
            read_matrix(args.omega0), S, read_matrix(args.sigma0), args.gamma, args.lam)
    _emit(out)
    return 0


_COMMANDS = {"gen": _cmd_gen, "estimate": _cmd_estimate, "bench": _cmd_bench,
             "metrics": _cmd_metrics, "diagnose": _cmd_diagnose}


def _usage(message):
    sys.stderr.write(f"error: {message}\n\nconfig schema:\n")
    sys.stderr.write(json.dumps(config_schema(), indent=2) + "\n")
    return 1


def main(argv=None):
    parser, subs = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError("a command is required: " + ", ".join(_COMMANDS))
        if args.config:
            _apply_config(args, subs[args.command])
        return _COMMANDS[args.command](args)
    except UsageError as exc:
        return _usage(str(exc))
    except NumericalError as exc:
        sys.stderr.write(f"numerical failure: {type(exc).__name__}: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        return _usage(f"{type(exc).__name__}: {exc}")


if __name__ == "__main__":
    sys.exit(main())

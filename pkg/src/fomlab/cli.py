"""``fom-lab`` command line interface.

Subcommands: run, certify, worst, theta, table, sweep. JSON goes out with
round-trip float precision, CSV summaries with 6 significant digits.

Problem sources (``--problem``) are either a builtin key

    quadratic, huber, least_squares, logistic,
    worst:gm-huber, worst:ogmg-huber, worst:ogmg-quadratic

or the path of a JSON document

    {"kind": "quadratic" | "huber" | "least_squares" | "logistic",
     "d": int, "L": float, "r0": float, "x0": [floats],
     "data": {"A": [[...]], "b": [...]} or {"A": [[...]], "y": [...]}}

where ``L`` and ``r0`` apply to quadratic/huber only, ``data`` to the data
kinds only (it may also carry ``fstar`` and ``minimizer`` declarations for
least_squares), and ``x0`` defaults to the first unit vector.

Exit codes: 0 success, 1 bad configuration, 2 numerical failure,
3 a verification that ran but failed (infeasible certificate, inexact worst case).
"""
import argparse
from concurrent.futures import ThreadPoolExecutor
import contextlib
import csv
import io
import json
import os
import sys

import numpy as np

from . import __version__
from .certificate import (
    dual_certificate,
    load_certificate,
    verify_certificate,
)
from .config import parse_overrides
from .engine import RUN_METHODS, run_chain, run_fsfom, run_method, trace_metrics
from .errors import DataError, FomLabError, NumericalFailure, ParameterError
from .oracle import ProblemInstance, make_instance, radius_from_gap
from .schedule import canonical_variant, theta_sequence
from .stepmatrix import load_schedule, step_schedule
from .worstcase import verify_exact_bound, worst_instance

DEFAULT_TABLE_N = (1, 2, 4, 10, 20, 30, 40, 50)
BUILTIN_PROBLEMS = ("quadratic", "huber", "least_squares", "logistic",
                    "worst:gm-huber", "worst:ogmg-huber", "worst:ogmg-quadratic")
EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_FAILED = 0, 1, 2, 3


class ConfigError(FomLabError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


# -- problem loading -------------------------------------------------------

def _unit(d):
    x = np.zeros(d)
    x[0] = 1.0
    return x


def builtin_problem(key, N=None, seed=0, d=8):
    """Instantiate a registry entry; worst-case entries depend on N."""
    if key.startswith("worst:"):
        try:
            method, flavor = key[len("worst:"):].split("-")
        except ValueError:
            raise ConfigError(f"bad worst-case key {key!r}") from None
        if N is None:
            raise ConfigError(f"{key} needs N")
        return worst_instance(method, flavor, N, d=d).instance
    rng = np.random.default_rng(seed)
    if key == "quadratic":
        oracle = make_instance("quadratic", {"L": 1.0}, d)
        x0 = _unit(d)
    elif key == "huber":
        oracle = make_instance("huber", {"L": 1.0, "r0": 0.5}, d)
        x0 = 2.0 * _unit(d)
    elif key == "least_squares":
        A = rng.normal(size=(3 * d, d))
        xstar = rng.normal(size=d)
        oracle = make_instance("least_squares", {"A": A, "b": A @ xstar, "fstar": 0.0, "minimizer": xstar})
        x0 = np.zeros(d)
    elif key == "logistic":
        A = rng.normal(size=(5 * d, d))
        w = rng.normal(size=d)
        y = np.where(A @ w + 0.5 * rng.normal(size=5 * d) >= 0, 1.0, -1.0)
        oracle = make_instance("logistic", {"A": A, "y": y})
        x0 = np.zeros(d)
    else:
        raise ConfigError(f"unknown builtin problem {key!r}; choose from {BUILTIN_PROBLEMS}")
    return ProblemInstance.from_oracle(oracle, x0)


def problem_from_json(doc):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise DataError("problem document needs a 'kind'")
    kind = doc["kind"]
    d = doc.get("d")
    params = {}
    if kind in ("quadratic", "huber"):
        for key in ("L", "r0"):
            if key in doc:
                params[key] = doc[key]
    else:
        data = doc.get("data") or {}
        params.update(data)
    oracle = make_instance(kind, params, d)
    x0 = np.asarray(doc["x0"], dtype=float) if "x0" in doc else _unit(oracle.d)
    return ProblemInstance.from_oracle(oracle, x0)


def load_problem(source, N=None, seed=0, d=8):
    if source in BUILTIN_PROBLEMS or source.startswith("worst:"):
        return builtin_problem(source, N=N, seed=seed, d=d)
    if not os.path.exists(source):
        raise ConfigError(f"problem {source!r} is neither a builtin nor an existing file")
    with open(source, encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise DataError(f"{source}: {exc}") from exc
    return problem_from_json(doc)


# -- output ---------------------------------------------------------------

def _dump_json(obj):
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _g6(x):
    return "" if x is None else format(x, ".6g")


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


# -- commands -------------------------------------------------------------

def _execute(method, inst, N, triangle=None):
    if triangle is not None:
        schedule = load_schedule(triangle)
        if schedule.N != N:
            raise ConfigError(f"triangle has N={schedule.N} but -N {N} was given")
        return run_fsfom(inst.oracle, inst.x0, schedule)
    if method == "chain":
        return run_chain(inst.oracle, inst.x0, N)
    if method.startswith("fsfom-"):
        return run_fsfom(inst.oracle, inst.x0, step_schedule(method[len("fsfom-"):], N))
    return run_method(method, inst.oracle, inst.x0, N)


def cmd_run(args):
    inst = load_problem(args.problem, N=args.N, seed=args.seed, d=args.d)
    trace = _execute(args.method, inst, args.N, args.triangle)
    metrics = trace_metrics(trace, inst.oracle)
    if args.format == "csv":
        rows = [(r["iter"], repr(r["fval"]), repr(r["grad_norm_sq"])) for r in metrics.per_iter]
        _emit(_csv_text(("iter", "fval", "grad_norm_sq"), rows), args.out)
        return EXIT_OK
    doc = {
        "method": args.method if args.triangle is None else "fsfom-custom",
        "N": args.N,
        "problem": args.problem,
        "L": inst.oracle.L,
        "R": inst.R,
        "Rbar": inst.Rbar,
        "grad_norm_sq_final": metrics.grad_norm_sq_final,
        "func_gap_final": metrics.func_gap_final,
        "per_iter": metrics.per_iter,
    }
    if args.full:
        doc["xs"] = trace.xs.tolist()
        doc["grads"] = trace.grads.tolist()
    _emit(_dump_json(doc), args.out)
    return EXIT_OK


def cmd_certify(args):
    if args.triangle or args.cert:
        if not (args.triangle and args.cert):
            raise ConfigError("--triangle and --cert must be given together")
        schedule = load_schedule(args.triangle)
        cert = load_certificate(args.cert)
        if schedule.N != cert.N:
            raise ConfigError(f"triangle has N={schedule.N} but certificate has N={cert.N}")
    else:
        if args.method is None or args.N is None:
            raise ConfigError("certify needs --method and -N, or --triangle and --cert")
        schedule = step_schedule(args.method, args.N)
        cert = dual_certificate(args.method, args.N)
    if args.dump_triangle:
        _emit(_dump_json(schedule.to_json()), args.dump_triangle)
    if args.dump_cert:
        _emit(_dump_json(cert.to_json()), args.dump_cert)
    report = verify_certificate(schedule, cert)
    doc = report.to_json(L=args.L, R=args.R)
    doc["N"] = schedule.N
    _emit(_dump_json(doc), args.out)
    return EXIT_OK if report.feasible else EXIT_FAILED


def cmd_worst(args):
    w = worst_instance(args.method, args.flavor, args.N, L=args.L, R=args.R, d=args.d)
    report = verify_exact_bound(w)
    if args.format == "csv":
        row = (args.method, args.flavor, args.N, _g6(report.expected), _g6(report.measured),
               _g6(report.rel_err), int(report.passed))
        _emit(_csv_text(("method", "flavor", "N", "expected", "measured", "rel_err", "pass"), [row]), args.out)
    else:
        _emit(_dump_json(report.to_json()), args.out)
    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_theta(args):
    seq = theta_sequence(canonical_variant(args.variant), args.N)
    if args.format == "csv":
        rows = [(i, repr(float(v))) for i, v in enumerate(seq.values)]
        _emit(_csv_text(("i", "theta"), rows), args.out)
    else:
        doc = {"variant": seq.variant, "N": seq.N, "theta": seq.values.tolist(), "theta0_sq": seq.theta0_sq}
        _emit(_dump_json(doc), args.out)
    return EXIT_OK


def table_rows(n_list):
    """N, theta_0^2, 2N+1 and the measured worst-case reciprocals L^2R^2/||g_N||^2."""
    rows = []
    for N in n_list:
        t0sq = theta_sequence("ogmg_tilde", N).theta0_sq
        recips = []
        for method, flavor in (("ogmg", "quadratic"), ("ogmg", "huber"), ("gm", "huber")):
            rep = verify_exact_bound(worst_instance(method, flavor, N))
            recips.append(1.0 / rep.measured)
        rows.append((N, t0sq, 2 * N + 1, *recips))
    return rows


def cmd_table(args):
    rows = table_rows(args.N_list or DEFAULT_TABLE_N)
    header = ("N", "theta0_sq", "gm_reciprocal", "ogmg_quadratic_reciprocal",
              "ogmg_huber_reciprocal", "gm_huber_reciprocal")
    if args.format == "json":
        _emit(_dump_json([dict(zip(header, r)) for r in rows]), args.out)
    else:
        _emit(_csv_text(header, [(r[0], _g6(r[1]), r[2], *map(_g6, r[3:])) for r in rows]), args.out)
    return EXIT_OK


def _sweep_one(job):
    method, N, problem, seed, d = job
    inst = load_problem(problem, N=N, seed=seed, d=d)
    trace = _execute(method, inst, N)
    m = trace_metrics(trace, inst.oracle)
    return method, N, m.grad_norm_sq_final, m.func_gap_final, inst.R


def cmd_sweep(args):
    jobs = [(m, N, args.problem, args.seed, args.d) for m in args.methods for N in args.N_list]
    with ThreadPoolExecutor(max_workers=args.workers) as pool:
        results = list(pool.map(_sweep_one, jobs))
    if args.format == "json":
        keys = ("method", "N", "grad_norm_sq", "func_gap", "R")
        _emit(_dump_json([dict(zip(keys, r)) for r in results]), args.out)
    else:
        rows = [(m, N, _g6(g), _g6(f), _g6(R)) for m, N, g, f, R in results]
        _emit(_csv_text(("method", "N", "grad_norm_sq", "func_gap", "R"), rows), args.out)
    return EXIT_OK


# -- argument parsing -----------------------------------------------------

def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError("N values must be positive")
    return values


def _str_list(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError("N must be >= 1")
    return value


def _add_format(p, default="json"):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--json", dest="format", action="store_const", const="json")
    g.add_argument("--csv", dest="format", action="store_const", const="csv")
    p.set_defaults(format=default)
    p.add_argument("--out", help="write to this file instead of stdout")


def build_parser():
    parser = _Parser(prog="fom-lab", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--tol", default="", help="tolerance overrides, e.g. psd=1e-9,exact=1e-8")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run_methods = (*RUN_METHODS[:-1], "chain", "fsfom-gm", "fsfom-ogm", "fsfom-ogmg", "fsfom-ogmg_alt")
    p = sub.add_parser("run", help="run a method and emit its trace")
    p.add_argument("--method", choices=run_methods, default="ogmg")
    p.add_argument("-N", type=_positive_int, required=True)
    p.add_argument("--problem", default="quadratic")
    p.add_argument("--triangle", help="run the fixed-step method of this triangle JSON")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=_positive_int, default=8)
    p.add_argument("--full", action="store_true", help="include iterate and gradient vectors")
    _add_format(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("certify", help="verify a dual certificate")
    p.add_argument("--method", choices=("gm", "ogmg"))
    p.add_argument("-N", type=_positive_int)
    p.add_argument("--triangle")
    p.add_argument("--cert")
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--dump-triangle")
    p.add_argument("--dump-cert")
    p.add_argument("--json", dest="format", action="store_const", const="json")
    p.add_argument("--out")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("worst", help="check a tight worst-case instance")
    p.add_argument("--method", choices=("gm", "ogmg"), required=True)
    p.add_argument("--flavor", choices=("huber", "quadratic"), default="huber")
    p.add_argument("-N", type=_positive_int, required=True)
    p.add_argument("--L", type=float, default=1.0)
    p.add_argument("--R", type=float, default=1.0)
    p.add_argument("--d", type=_positive_int, default=8)
    _add_format(p)
    p.set_defaults(func=cmd_worst)

    p = sub.add_parser("theta", help="emit a theta sequence")
    p.add_argument("--variant", default="ogmg")
    p.add_argument("-N", type=_positive_int, required=True)
    _add_format(p)
    p.set_defaults(func=cmd_theta)

    p = sub.add_parser("table", help="worst-case gradient reciprocals per N")
    p.add_argument("--N-list", dest="N_list", type=_int_list)
    _add_format(p, default="csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", help="run several methods over several N concurrently")
    p.add_argument("--methods", type=_str_list, default=["gm", "ogm", "ogmg"])
    p.add_argument("--N-list", dest="N_list", type=_int_list, default=list(DEFAULT_TABLE_N))
    p.add_argument("--problem", default="quadratic")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--d", type=_positive_int, default=8)
    p.add_argument("--workers", type=_positive_int, default=4)
    _add_format(p, default="csv")
    p.set_defaults(func=cmd_sweep)
    return parser


@contextlib.contextmanager
def _tolerance_env(overrides):
    if not overrides:
        yield
        return
    parse_overrides(overrides)
    old = os.environ.get("FOMLAB_TOL")
    merged = ",".join(v for v in (old, overrides) if v)
    os.environ["FOMLAB_TOL"] = merged
    try:
        yield
    finally:
        if old is None:
            del os.environ["FOMLAB_TOL"]
        else:
            os.environ["FOMLAB_TOL"] = old


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "sweep":
        bad = [m for m in args.methods if m not in (*RUN_METHODS[:-1], "chain")]
        if bad:
            parser.error(f"unknown sweep methods: {bad}")
    try:
        with _tolerance_env(args.tol):
            return args.func(args)
    except NumericalFailure as exc:
        print(f"fom-lab: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ConfigError, ParameterError, DataError, FomLabError, OSError) as exc:
        print(f"fom-lab: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())

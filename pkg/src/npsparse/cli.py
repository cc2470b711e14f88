"""Command-line surface: recover, phase, trace, selftest.

Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 numerical
failure.  Phase and trace require an explicit --seed so no run ever depends
on the wall clock.  Timing columns default to zero (phase, recover) so
output files are byte-reproducible; pass --timing where wall time matters.
"""

import argparse
import dataclasses
import os
import sys

from . import harness, io, selftest, solvers
from .errors import DimensionError, NumericalError, ParseError

DEFAULT_M_SWEEP = (10, 15, 20, 25, 30, 35, 40, 45, 50)
DEFAULT_K_SWEEP = tuple(range(1, 16))

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_NUMERICAL = 3

_METHOD_CHOICES = harness.METHOD_NAMES + ("all",)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; this tool reserves 2 for I/O.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _add_solver_overrides(sub):
    sub.add_argument("--epsilon", type=float, default=None,
                     help="relative-change stop threshold override")
    sub.add_argument("--t-max", type=int, default=None,
                     help="iteration cap override")
    sub.add_argument("--alpha", type=float, default=None,
                     help="hyperprior shape (np solvers only)")
    sub.add_argument("--beta", type=float, default=None,
                     help="hyperprior rate (np solvers only)")


def _add_output_flags(sub, timing_default):
    sub.add_argument("--format", choices=("csv", "json"), default="csv")
    sub.add_argument("--out", required=True, help="output file path")
    sub.add_argument("--timing", action=argparse.BooleanOptionalAction,
                     default=timing_default,
                     help="record real wall time (breaks byte reproducibility)")


def build_parser():
    parser = _Parser(prog="npsparse",
                     description="Sparse-recovery benchmark tool")
    sub = parser.add_subparsers(dest="command", required=True,
                                parser_class=_Parser)

    rec = sub.add_parser("recover", help="recover one signal from CSV files")
    rec.add_argument("matrix_file", help="CSV matrix, one row per line")
    rec.add_argument("observation_file", help="single-column CSV vector")
    rec.add_argument("--method", required=True, choices=harness.METHOD_NAMES)
    _add_solver_overrides(rec)
    _add_output_flags(rec, timing_default=False)

    ph = sub.add_parser("phase", help="success-rate sweep along one axis")
    ph.add_argument("--n", type=int, default=100)
    ph.add_argument("--m", type=int, default=None,
                    help="hold m fixed and sweep k")
    ph.add_argument("--k", type=int, default=None,
                    help="hold k fixed and sweep m (default k=3)")
    ph.add_argument("--sweep", type=str, default=None,
                    help="comma-separated sweep values")
    ph.add_argument("--trials", type=int, default=300)
    ph.add_argument("--seed", type=int, required=True)
    ph.add_argument("--method", action="append", choices=_METHOD_CHOICES,
                    help="repeatable; 'all' selects every method")
    ph.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    _add_solver_overrides(ph)
    _add_output_flags(ph, timing_default=False)

    tr = sub.add_parser("trace", help="per-iteration error on one instance")
    tr.add_argument("--n", type=int, default=100)
    tr.add_argument("--m", type=int, default=30)
    tr.add_argument("--k", type=int, default=3)
    tr.add_argument("--seed", type=int, required=True)
    tr.add_argument("--method", action="append", choices=_METHOD_CHOICES,
                    help="repeatable; 'all' selects every method")
    _add_solver_overrides(tr)
    _add_output_flags(tr, timing_default=True)

    sub.add_parser("selftest", help="run the embedded verification checks")
    return parser


def _echo(value):
    return "default" if value is None else value


def _resolve_methods(method_args):
    if not method_args:
        raise ValueError("at least one --method is required")
    if "all" in method_args:
        return harness.METHOD_NAMES
    seen = []
    for name in method_args:
        if name not in seen:
            seen.append(name)
    return tuple(seen)


def _method_config(args, method):
    overrides = {}
    if args.epsilon is not None:
        overrides["epsilon"] = args.epsilon
    if args.t_max is not None:
        overrides["t_max"] = args.t_max
    if method in ("np0", "np1"):
        if args.alpha is not None:
            overrides["alpha"] = args.alpha
        if args.beta is not None:
            overrides["beta"] = args.beta
    base = harness.default_method_config(method)
    return dataclasses.replace(base, **overrides) if overrides else base


def _override_configs(args, methods):
    if (args.epsilon is None and args.t_max is None
            and args.alpha is None and args.beta is None):
        return None
    return {method: _method_config(args, method) for method in methods}


def _cmd_recover(args):
    a = io.read_matrix_csv(args.matrix_file)
    y = io.read_vector_csv(args.observation_file)
    m, n = a.shape
    config = _method_config(args, args.method)
    result = harness.run_method(args.method, a, y, config=config)
    echo = {
        "subcommand": "recover",
        "matrix_file": args.matrix_file,
        "observation_file": args.observation_file,
        "method": args.method,
        "epsilon": _echo(args.epsilon),
        "t_max": _echo(args.t_max),
        "alpha": _echo(args.alpha),
        "beta": _echo(args.beta),
        "format": args.format,
        "timing": args.timing,
        "out": args.out,
    }
    io.write_recovery_result(args.out, args.format, echo, result, m, n,
                             include_timing=args.timing)
    if result.termination == solvers.NUMERICAL_FAILURE:
        print(f"error: solver ended in {result.termination}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


def _parse_sweep(text):
    values = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        try:
            values.append(int(token))
        except ValueError:
            raise ValueError(f"invalid sweep value {token!r}") from None
    if not values:
        raise ValueError("sweep list is empty")
    return tuple(values)


def _cmd_phase(args):
    methods = _resolve_methods(args.method)
    if args.m is not None and args.k is not None:
        raise ValueError("pass --m or --k, not both: the given axis is fixed")
    if args.m is not None:
        fixed = harness.AxisSpec("m", args.m)
        sweep = _parse_sweep(args.sweep) if args.sweep else DEFAULT_K_SWEEP
    else:
        fixed = harness.AxisSpec("k", args.k if args.k is not None else 3)
        sweep = _parse_sweep(args.sweep) if args.sweep else DEFAULT_M_SWEEP
    configs = _override_configs(args, methods)
    grid = harness.run_phase_sweep(
        fixed, sweep, methods,
        trials=args.trials, master_seed=args.seed, n=args.n,
        configs=configs, workers=args.workers, measure_time=args.timing,
    )
    # The echo deliberately omits --workers: worker count must not change
    # the output file byte for byte.
    echo = {
        "subcommand": "phase",
        "n": grid.n,
        "fixed_axis": grid.fixed_axis,
        "fixed_value": grid.fixed_value,
        "sweep_axis": grid.sweep_axis,
        "sweep_values": grid.sweep_values,
        "methods": grid.methods,
        "trials": grid.trials,
        "seed": grid.master_seed,
        "epsilon": _echo(args.epsilon),
        "t_max": _echo(args.t_max),
        "alpha": _echo(args.alpha),
        "beta": _echo(args.beta),
        "format": args.format,
        "timing": args.timing,
        "out": args.out,
    }
    io.write_grid(args.out, args.format, echo, grid,
                  include_timing=args.timing)
    return EXIT_OK


def _cmd_trace(args):
    methods = _resolve_methods(args.method)
    configs = _override_configs(args, methods)
    table = harness.run_convergence_trace(
        args.n, args.m, args.k, methods, args.seed, configs=configs
    )
    echo = {
        "subcommand": "trace",
        "n": table.n,
        "m": table.m,
        "k": table.k,
        "methods": table.methods,
        "seed": table.seed,
        "epsilon": _echo(args.epsilon),
        "t_max": _echo(args.t_max),
        "alpha": _echo(args.alpha),
        "beta": _echo(args.beta),
        "format": args.format,
        "timing": args.timing,
        "out": args.out,
    }
    io.write_trace_table(args.out, args.format, echo, table,
                         include_timing=args.timing)
    return EXIT_OK


def _cmd_selftest(args):
    results = selftest.run_all_checks()
    width = max(len(r.name) for r in results)
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        print(f"{r.name:<{width}}  {status}  {r.detail}")
    if all(r.passed for r in results):
        print("all checks passed")
        return EXIT_OK
    print("some checks FAILED", file=sys.stderr)
    return EXIT_NUMERICAL


_HANDLERS = {
    "recover": _cmd_recover,
    "phase": _cmd_phase,
    "trace": _cmd_trace,
    "selftest": _cmd_selftest,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

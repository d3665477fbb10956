"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
Errors are reported as one JSON object on a single stderr line.
"""
import argparse
import json
import sys

import numpy as np

from .asymptotics import are_table
from .errors import DataError, DimensionMismatch, MPDError, NumericalError
from .estimators import EstimatorConfig, mpd_estimate
from .influence import dim_series
from .montecarlo import DEFAULT_ALPHAS, SimulationScenario, run_study
from .portfolio import efficient_frontier
from .pseudodistance import ModelParams
from .reporting import emit_report, load_returns

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _add_input(p):
    p.add_argument("--input", required=True, help="CSV file of returns (or prices)")
    p.add_argument("--prices", action="store_true",
                   help="input holds prices; convert to log-returns")


def _add_output(p, default_format):
    p.add_argument("--output", required=True, help="output path, '-' for stdout")
    p.add_argument("--format", choices=("json", "csv"), default=None,
                   help=f"report format (default: from the output suffix, else {default_format})")
    p.set_defaults(default_format=default_format)


def _add_solver(p):
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--max-iter", type=int, default=500)


def build_parser():
    parser = _Parser(prog="mpdport", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("estimate", help="MPD estimates of mean and covariance")
    _add_input(p)
    p.add_argument("--alpha", type=float, required=True)
    _add_solver(p)
    _add_output(p, "json")

    p = sub.add_parser("frontier", help="efficient frontier from MPD estimates")
    _add_input(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--alpha", type=float)
    group.add_argument("--mle", action="store_true", help="use alpha = 0")
    p.add_argument("--lambda-min", type=float, default=0.5)
    p.add_argument("--lambda-max", type=float, default=500.0)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--no-short", action="store_true")
    _add_solver(p)
    _add_output(p, "csv")

    p = sub.add_parser("dim", help="data influence measure of every observation")
    _add_input(p)
    p.add_argument("--alpha", type=float, default=0.2,
                   help="alpha of the robust fit supplying mu, Sigma and the weights")
    p.add_argument("--target-variance", type=float, default=0.005)
    p.add_argument("--if-alpha", type=float, default=0.0,
                   help="alpha of the influence functions (0 = maximum likelihood)")
    _add_solver(p)
    _add_output(p, "csv")

    p = sub.add_parser("are-table", help="asymptotic relative efficiency table")
    p.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    p.add_argument("--n-max", type=int, default=10)
    _add_output(p, "csv")

    p = sub.add_parser("simulate", help="contaminated-normal MSE study")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--eps", type=float, required=True)
    p.add_argument("--alphas", type=_float_list, default=list(DEFAULT_ALPHAS))
    p.add_argument("--replicates", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--covariance", type=float, default=0.2,
                   help="off-diagonal entry of the core covariance")
    p.add_argument("--shift", type=float, default=-4.0, help="contaminant mean entries")
    p.add_argument("--inflation", type=float, default=4.0,
                   help="contaminant covariance as a multiple of the core one")
    _add_solver(p)
    _add_output(p, "csv")
    return parser


def _format(args):
    if args.format:
        return args.format
    suffix = str(args.output).rsplit(".", 1)[-1].lower()
    return suffix if suffix in ("json", "csv") else args.default_format


def _config(args, alpha):
    return EstimatorConfig(alpha=alpha, tol=args.tol, max_iter=args.max_iter)


def _cmd_estimate(args):
    returns = load_returns(args.input, prices=args.prices)
    return mpd_estimate(returns.data, _config(args, args.alpha))


def _cmd_frontier(args):
    returns = load_returns(args.input, prices=args.prices)
    alpha = 0.0 if args.mle else args.alpha
    est = mpd_estimate(returns.data, _config(args, alpha))
    if not (0 < args.lambda_min <= args.lambda_max) or args.points < 1:
        raise UsageError("need 0 < lambda-min <= lambda-max and points >= 1")
    grid = np.geomspace(args.lambda_min, args.lambda_max, args.points)
    return efficient_frontier(ModelParams(est.mu, est.sigma), grid,
                              allow_short=not args.no_short)


def _cmd_dim(args):
    returns = load_returns(args.input, prices=args.prices)
    if returns.data.shape[1] < 2:
        raise DimensionMismatch("DIM needs at least two assets")
    return dim_series(returns.data, target_variance=args.target_variance,
                      if_alpha=args.if_alpha, config=_config(args, args.alpha))


def _cmd_are_table(args):
    if args.n_max < 1:
        raise UsageError("--n-max must be at least 1")
    return are_table(args.alphas, args.n_max)


def _cmd_simulate(args):
    try:
        scenario = SimulationScenario.standard(
            args.n, args.t, args.eps, alphas=args.alphas, n_s=args.replicates,
            seed=args.seed, covariance=args.covariance, shift=args.shift,
            inflation=args.inflation)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return run_study(scenario, EstimatorConfig(tol=args.tol, max_iter=args.max_iter))


_COMMANDS = {
    "estimate": _cmd_estimate,
    "frontier": _cmd_frontier,
    "dim": _cmd_dim,
    "are-table": _cmd_are_table,
    "simulate": _cmd_simulate,
}


def _fail(code, kind, message):
    print(json.dumps({"error": kind, "exit_code": code, "message": str(message)}),
          file=sys.stderr)
    return code


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        result = _COMMANDS[args.command](args)
        emit_report(result, _format(args), args.output)
    except UsageError as exc:
        return _fail(EXIT_USAGE, "UsageError", exc)
    except (DataError, DimensionMismatch, OSError) as exc:
        return _fail(EXIT_DATA, type(exc).__name__, exc)
    except NumericalError as exc:
        return _fail(EXIT_NUMERIC, type(exc).__name__, exc)
    except (MPDError, ValueError) as exc:
        return _fail(EXIT_USAGE, type(exc).__name__, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

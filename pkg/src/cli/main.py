"""
Command-line front end of the EGW solver

PYTHONPATH=. python src/cli/main.py solve mu0.json mu1.json --eps=0.5 --report=report.json
"""

import argparse
import json
import os
import sys

import src.egw.constants as consts
from src.cli.commands import (
    cmd_benchmark,
    cmd_debias,
    cmd_hessian,
    cmd_sinkhorn,
    cmd_solve,
    cmd_sweep,
    cmd_validate,
)
from src.egw.benchmark import EpsRule
from src.egw.exceptions import EGWError, ValidationError
from src.egw.solvers import Algorithm, Projection
from src.utils.logger import logger


EXIT_VALIDATION = 2
EXIT_IO = 4


class ArgumentParser(argparse.ArgumentParser):
    """Parser whose usage errors are reported like any other validation error"""

    def error(self, message):
        raise ValidationError(message)


def add_measure_args(parser: argparse.ArgumentParser):
    parser.add_argument("mu0", help="measure file (.json or .csv)")
    parser.add_argument("mu1", help="measure file (.json or .csv)")
    parser.add_argument("--renormalize", action="store_true", help="treat weights as raw")
    parser.add_argument("--drop-zero-mass", action="store_true", help="drop zero-weight atoms")
    parser.add_argument("--center", action=argparse.BooleanOptionalAction, default=True)


def add_solver_args(parser: argparse.ArgumentParser):
    parser.add_argument("--M", type=float)
    parser.add_argument("--algo", choices=[a.value for a in Algorithm], default="auto")
    parser.add_argument("--grad-tol", type=float, default=consts.GRAD_TOL)
    parser.add_argument("--delta", type=float, help="sup-norm oracle radius")
    parser.add_argument("--max-iters", type=int, default=consts.MAX_OUTER_ITERS)
    parser.add_argument("--L", default="theoretical", help="theoretical, search or a value")
    parser.add_argument("--line-search-shrink", type=float, default=consts.LINE_SEARCH_SHRINK)
    parser.add_argument("--warm-start", action=argparse.BooleanOptionalAction, default=True)
    parser.add_argument("--sinkhorn-kmax", type=int, default=consts.SOLVER_SINKHORN_KMAX)
    parser.add_argument(
        "--sinkhorn-gamma-floor", type=float, default=consts.SINKHORN_GAMMA_FLOOR
    )
    parser.add_argument("--log-domain", action="store_true")
    parser.add_argument("--projection", choices=[p.value for p in Projection], default="ball")
    parser.add_argument("--target-gap", type=float)


def get_parser() -> ArgumentParser:
    parser = ArgumentParser(prog="egw")
    parser.add_argument("--seed", type=int, default=int(os.getenv("EGW_SEED", "0")))
    parser.add_argument("--jobs", type=int, default=int(os.getenv("EGW_JOBS", "1")))
    parser.add_argument("--quiet", action="store_true")
    parser.add_argument("--json-errors", action="store_true")
    subparsers = parser.add_subparsers(dest="command", required=True)

    solve = subparsers.add_parser("solve", help="minimize Phi and report the EGW value")
    add_measure_args(solve)
    add_solver_args(solve)
    solve.add_argument("--eps", type=float, required=True)
    solve.add_argument("--trace")
    solve.add_argument("--plan")
    solve.add_argument("--report")
    solve.set_defaults(func=cmd_solve)

    sinkhorn = subparsers.add_parser("sinkhorn", help="certified entropic OT coupling for fixed A")
    add_measure_args(sinkhorn)
    sinkhorn.add_argument("--eps", type=float, required=True)
    sinkhorn.add_argument("--A", help="JSON matrix, JSON file or comma-separated values")
    tolerance = sinkhorn.add_mutually_exclusive_group()
    tolerance.add_argument("--delta", type=float, help="Hilbert-metric target (default 1e-6)")
    tolerance.add_argument("--gamma", type=float, help="marginal tolerance")
    sinkhorn.add_argument(
        "--kmax", "--sinkhorn-kmax", dest="sinkhorn_kmax", type=int, default=consts.SINKHORN_KMAX
    )
    sinkhorn.add_argument("--log-domain", action="store_true")
    sinkhorn.add_argument("--out", "--plan", dest="out", help="plan CSV")
    sinkhorn.add_argument("--cert", "--report", dest="cert", help="certificate JSON")
    sinkhorn.set_defaults(func=cmd_sinkhorn)

    debias = subparsers.add_parser("debias", help="debiased EGW value")
    debias.add_argument("mu0")
    debias.add_argument("mu1")
    debias.add_argument("--raster", action="store_true", help="inputs are grayscale grids")
    debias.add_argument("--rotate", type=float, default=0.0, help="degrees, applied to mu1")
    debias.add_argument("--renormalize", action="store_true")
    debias.add_argument("--drop-zero-mass", action="store_true")
    debias.add_argument("--eps", type=float, required=True)
    debias.add_argument("--report")
    add_solver_args(debias)
    debias.set_defaults(func=cmd_debias)

    benchmark = subparsers.add_parser("benchmark", help="timings on random instances")
    benchmark.add_argument("--dims", default="2")
    benchmark.add_argument("--sizes", default="64,128,256,512")
    benchmark.add_argument("--trials", type=int, default=1)
    benchmark.add_argument("--time-budget", type=float, default=consts.TIME_BUDGET)
    benchmark.add_argument(
        "--eps-rule", choices=[r.value for r in EpsRule], default=EpsRule.CONVEX_MARGIN.value
    )
    benchmark.add_argument("--eps-value", type=float, help="fixed eps or nonconvex factor")
    benchmark.add_argument("--sigma0", type=float, default=consts.SIGMA_0)
    benchmark.add_argument("--sigma1", type=float, default=consts.SIGMA_1)
    benchmark.add_argument("--compare", action="store_true")
    benchmark.add_argument("--output", default="benchmark.csv")
    add_solver_args(benchmark)
    benchmark.set_defaults(func=cmd_benchmark)

    sweep = subparsers.add_parser("sweep", help="solve along a decreasing eps schedule")
    add_measure_args(sweep)
    add_solver_args(sweep)
    sweep.add_argument("--eps-list")
    sweep.add_argument("--eps-start", type=float)
    sweep.add_argument("--eps-factor", type=float)
    sweep.add_argument("--eps-count", type=int)
    sweep.add_argument("--output", default="sweep.csv")
    sweep.set_defaults(func=cmd_sweep)

    validate = subparsers.add_parser("validate", help="check measure files")
    validate.add_argument("files", nargs="+")
    validate.add_argument("--raster", action="store_true")
    validate.add_argument("--renormalize", action="store_true")
    validate.add_argument("--drop-zero-mass", action="store_true")
    validate.set_defaults(func=cmd_validate)

    hessian = subparsers.add_parser("hessian", help="second-order diagnostics at the solution")
    add_measure_args(hessian)
    add_solver_args(hessian)
    hessian.add_argument("--eps", type=float, required=True)
    hessian.add_argument("--direction", help="JSON matrix, JSON file or comma-separated values")
    hessian.add_argument("--report")
    hessian.set_defaults(func=cmd_hessian)

    return parser


def report_error(e: Exception, exit_code: int, json_errors: bool):
    if json_errors:
        error = {"error": type(e).__name__, "message": str(e), "exit_code": exit_code}
        print(json.dumps(error, sort_keys=True))
    else:
        logger.error(f"{type(e).__name__}: {e}")


def main(argv: list = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    json_errors = "--json-errors" in argv

    try:
        args = get_parser().parse_args(argv)
        logger.set_quiet(args.quiet)
        if args.jobs < 1:
            raise ValidationError("--jobs must be >= 1")
        logger.info(f"Args: {args}")
        return args.func(args)
    except EGWError as e:
        report_error(e, e.exit_code, json_errors)
        return e.exit_code
    except OSError as e:
        report_error(e, EXIT_IO, json_errors)
        return EXIT_IO
    except ValueError as e:
        report_error(e, EXIT_VALIDATION, json_errors)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

import json

import numpy as np

import src.egw.constants as consts
from src.egw.benchmark import (
    BenchmarkRunner,
    BenchmarkSpec,
    GeneratorSpec,
    records_frame,
    scaling_exponent,
)
from src.egw.core import (
    build_problem,
    coupling_variance_sup,
    debiased_egw,
    hessian_eigenvalue_bounds,
    hessian_quadratic_form,
)
from src.egw.exceptions import ValidationError
from src.egw.measures import (
    load_measure,
    load_raster,
    moments,
    raster_to_measure,
    rotate_measure,
    rotate_raster,
)
from src.egw.oracle import build_kernel, oracle_tolerance_schedule, sinkhorn, sinkhorn_log
from src.egw.solvers import (
    LMode,
    SolveConfig,
    Status,
    eps_sweep,
    plan_frame,
    solve,
    sweep_frame,
)
from src.utils.io import (
    format_float,
    get_eps_schedule,
    parse_float_list,
    parse_int_list,
    write_json,
    write_table,
)
from src.utils.logger import logger


def get_L_mode(value: str = None) -> tuple:
    value = (value or LMode.THEORETICAL.value).strip().lower()
    if value in (LMode.THEORETICAL.value, LMode.SEARCH.value):
        return LMode(value), None

    try:
        L = float(value)
    except ValueError as e:
        raise ValidationError(
            f"--L must be 'theoretical', 'search' or a number, got '{value}'"
        ) from e
    if not L > 0:
        raise ValidationError("--L must be > 0")
    return LMode.FIXED, L


def get_solve_config(args) -> SolveConfig:
    L_mode, L_value = get_L_mode(args.L)
    return SolveConfig(
        algorithm=args.algo,
        grad_tol=args.grad_tol,
        max_outer_iters=args.max_iters,
        delta_oracle=args.delta,
        L_mode=L_mode,
        L_value=L_value,
        line_search_shrink=args.line_search_shrink,
        warm_start=args.warm_start,
        seed=args.seed,
        sinkhorn_kmax=args.sinkhorn_kmax,
        sinkhorn_gamma_floor=args.sinkhorn_gamma_floor,
        log_domain=args.log_domain,
        projection=args.projection,
        target_gap=args.target_gap,
    )


def get_matrix(value: str, shape: tuple) -> np.ndarray:
    """Matrix from inline JSON, a JSON file, or comma-separated row-major values"""
    if value is None:
        return np.zeros(shape)

    value = value.strip()
    if value.endswith(".json"):
        with open(value, "r", encoding="utf-8") as f:
            matrix = json.load(f)
    elif value.startswith("["):
        matrix = json.loads(value)
    else:
        matrix = parse_float_list(value)

    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.size != shape[0] * shape[1]:
        raise ValidationError(
            f"matrix must have {shape[0]} x {shape[1]} entries, got {matrix.size}"
        )
    return matrix.reshape(shape)


def load_input(filename: str, args, raster: bool = False):
    if raster:
        return raster_to_measure(load_raster(filename))
    return load_measure(
        filename,
        renormalize=args.renormalize,
        drop_zero_mass=getattr(args, "drop_zero_mass", False),
    )


def print_value(name: str, value):
    print(f"{name}: {'null' if value is None else format_float(value)}")


def cmd_solve(args) -> int:
    mu0, mu1 = load_input(args.mu0, args), load_input(args.mu1, args)
    cfg = get_solve_config(args)
    spec = build_problem(mu0, mu1, args.eps, M=args.M, center_measures=args.center)

    report = solve(spec, cfg)
    if args.report:
        write_json(report.to_dict(), args.report)
    if args.trace:
        write_table(report.to_frame(), args.trace)
    if args.plan and report.final_plan is not None:
        write_table(report.plan_frame(), args.plan)

    if report.egw is None:
        logger.warning("Decomposition valid only for centered marginals")
        print_value("s1", report.s1)
        print_value("s2", report.final_objective)
    print_value("egw", report.egw)
    print_value("gradient_norm", report.final_gradient_norm)

    if report.status == Status.ABORTED:
        logger.error(f"Solver aborted: {report.message}")
        return 3
    if report.status == Status.MAX_ITERS:
        logger.warning(f"Stopped at max_outer_iters={cfg.max_outer_iters} before grad_tol")
    return 0


def cmd_sinkhorn(args) -> int:
    mu0, mu1 = load_input(args.mu0, args), load_input(args.mu1, args)
    spec = build_problem(mu0, mu1, args.eps, center_measures=args.center)
    A = get_matrix(args.A, spec.shape)
    K = build_kernel(spec.mu0, spec.mu1, A, spec.eps, strict=not args.log_domain)
    a, b = spec.mu0.weights, spec.mu1.weights

    gamma = args.gamma
    if gamma is None:
        delta = consts.SINKHORN_CLI_DELTA if args.delta is None else args.delta
        gamma = oracle_tolerance_schedule(delta, K, b)
    elif not gamma > 0:
        raise ValidationError("--gamma must be > 0")
    run = sinkhorn_log if args.log_domain else sinkhorn
    coupling, certificate = run(K, a, b, gamma, k_max=args.sinkhorn_kmax)

    if args.cert:
        write_json(certificate.to_dict(), args.cert)
    if args.out:
        write_table(plan_frame(coupling.plan), args.out)

    print(json.dumps(certificate.to_dict(), sort_keys=True))
    return 0


def cmd_debias(args) -> int:
    mu0 = load_input(args.mu0, args, raster=args.raster)
    if args.raster:
        mu1 = raster_to_measure(rotate_raster(load_raster(args.mu1), args.rotate))
    else:
        mu1 = load_input(args.mu1, args)
        if args.rotate:
            if mu1.dim != 2:
                raise ValidationError("--rotate needs a measure in R^2")
            mu1 = rotate_measure(mu1, args.rotate)

    result = debiased_egw(mu0, mu1, args.eps, get_solve_config(args), M=args.M, jobs=args.jobs)
    if args.report:
        write_json(result.to_dict(), args.report)

    print_value("debiased", result.value)
    print_value("s01", result.s01)
    print_value("s00", result.s00)
    print_value("s11", result.s11)
    return 0


def cmd_benchmark(args) -> int:
    bench = BenchmarkSpec(
        dims=parse_int_list(args.dims),
        sizes=parse_int_list(args.sizes),
        trials=args.trials,
        time_budget=args.time_budget,
        eps_rule=args.eps_rule,
        eps_value=args.eps_value,
        generator=GeneratorSpec(sigma0=args.sigma0, sigma1=args.sigma1, seed=args.seed),
        compare=args.compare,
    )
    runner = BenchmarkRunner(
        bench, get_solve_config(args), jobs=args.jobs, show_progress=not args.quiet
    )
    records = runner.run()
    write_table(records_frame(records), args.output)

    try:
        print_value("scaling_exponent", scaling_exponent(records))
    except ValueError as e:
        logger.warning(f"Scaling exponent not available: {e}")
    return 0


def cmd_sweep(args) -> int:
    schedule = get_eps_schedule(args.eps_list, args.eps_start, args.eps_factor, args.eps_count)
    mu0, mu1 = load_input(args.mu0, args), load_input(args.mu1, args)
    points = eps_sweep(
        mu0,
        mu1,
        schedule,
        get_solve_config(args),
        M=args.M,
        center=args.center,
        show_progress=not args.quiet,
    )
    write_table(sweep_frame(points), args.output)

    if points and points[-1].report.status == Status.ABORTED:
        logger.warning(f"Sweep truncated after {len(points) - 1} successful eps values")
    return 0


def cmd_validate(args) -> int:
    for filename in args.files:
        m = load_input(filename, args, raster=args.raster)
        m_moments = moments(m)
        print(
            f"{filename}: n_atoms={m.n_atoms}, dim={m.dim}, centered={m.is_centered()},"
            f" m2={format_float(m_moments.m2)}, m4={format_float(m_moments.m4)}"
        )
    logger.info(f"✅ {len(args.files)} measure file(s) are valid")
    return 0


def cmd_hessian(args) -> int:
    mu0, mu1 = load_input(args.mu0, args), load_input(args.mu1, args)
    spec = build_problem(mu0, mu1, args.eps, M=args.M, center_measures=args.center)
    report = solve(spec, get_solve_config(args))
    if report.status == Status.ABORTED:
        logger.error(f"Solver aborted: {report.message}")
        return 3

    A = report.final_A
    K = build_kernel(spec.mu0, spec.mu1, A, spec.eps)
    coupling, _ = sinkhorn(
        K, spec.mu0.weights, spec.mu1.weights, consts.REFERENCE_GAMMA, k_max=args.sinkhorn_kmax
    )
    plan = coupling.plan

    if args.direction:
        C = get_matrix(args.direction, spec.shape)
    else:
        C = np.random.default_rng(args.seed).normal(size=spec.shape)
    C = C / np.linalg.norm(C)

    lower, upper = hessian_eigenvalue_bounds(spec)
    variance, _ = coupling_variance_sup(spec, plan)
    result = {
        "A": A,
        "direction": C,
        "quadratic_form": hessian_quadratic_form(spec, A, C, plan),
        "lower_bound": lower,
        "upper_bound": upper,
        "variance_sup": variance,
        "lower_bound_variance": 64.0 - 32.0**2 / spec.eps * variance,
    }
    if args.report:
        write_json(result, args.report)

    for name in ("quadratic_form", "lower_bound", "upper_bound", "variance_sup"):
        print_value(name, result[name])
    return 0

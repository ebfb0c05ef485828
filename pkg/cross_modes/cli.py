"""
Command-line interface.

Subcommands ``solve``, ``sweep``, ``extrapolate``, ``critical``, ``predict`` and ``export-field``.
Flags override values read from ``--config``.

Exit codes
----------
0 success, 1 failure, 2 usage error, 3 invalid grid, 4 eigensolver non-convergence,
5 no bound state where one is required, 6 cache integrity error.

"""

import argparse
import logging
import sys

import numpy as np
import pandas as pd

from cross_modes import __version__
from cross_modes.analysis import (
    Sweep,
    critical_beta_report,
    extrapolate_grid_sequence,
    locate_critical_beta,
    solve_cell,
)
from cross_modes.base import (
    CacheIntegrityError,
    IllConditionedFitError,
    InvalidGridError,
    NonConvergenceError,
    NoTransitionError,
    ShiftFactorizationError,
    UnboundStateError,
    get_now,
)
from cross_modes.cache import ResultCache, cell_key
from cross_modes.config import RunConfig
from cross_modes.discretization import assemble_operator, build_grid, operator_field
from cross_modes.effective1d import predictions_frame, qualitative_predictions
from cross_modes.geometry import CrossProblem, SymmetryClass
from cross_modes.policies import Fixed, PublishedSets, from_string
from cross_modes.reference import CCM_RATIOS, SETS, published_pole, reference_records
from cross_modes.results import (
    _file_logger,
    compare_with_reference,
    print_table,
    read_records,
    write_csv,
    write_cut,
    write_field,
    write_field_csv,
    write_json,
)
from cross_modes.solvers import certified_solver

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID_GRID = 3
EXIT_NON_CONVERGENCE = 4
EXIT_UNBOUND = 5
EXIT_CACHE = 6

LARGE_BETA = 3.0


def build_parser():
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", help="key = value or JSON configuration file")
    common.add_argument("--class", dest="sym", help="symmetry class: ee, oe, eo or oo")
    common.add_argument("--beta", type=float, help="width ratio")
    common.add_argument("--betas", help="width ratios, start:stop[:step] or a comma list")
    common.add_argument("--set", help="grid set I, II, III, 'published', 'scaled' or 'L=..,N=..'")
    common.add_argument("--L", type=float, help="truncation half-length")
    common.add_argument("--N", type=int, help="interval count")
    common.add_argument("--Ns", help="interval counts for extrapolation")
    common.add_argument("--tol", type=float, help="eigensolver relative residual bound")
    common.add_argument("--k", type=int, help="number of eigenvalues to report")
    common.add_argument("--seed", type=int, help="start vector seed")
    common.add_argument("--scheme", choices=["fd", "galerkin"])
    common.add_argument("--full", action="store_true", help="solve without symmetry reduction")
    common.add_argument("--output", help="CSV output path")
    common.add_argument("--json", help="JSON output path")
    common.add_argument("--field", help="field output path (.csv for x,y,value rows)")
    common.add_argument("--cut", help="cut output path")
    common.add_argument("--cut-at", help="cut positions 'y0,x0' in rescaled coordinates")
    common.add_argument("--window-x", help="x decay fit window 'start,stop'")
    common.add_argument("--window-y", help="y decay fit window 'start,stop'")
    common.add_argument("--axis", choices=["x", "y"], help="decay axis")
    common.add_argument("--cache-dir", help="result cache directory")
    common.add_argument("--no-cache", action="store_true", help="neither read nor write cache")
    common.add_argument("--require-bound", action="store_true", help="fail when unbound")
    common.add_argument("--method", choices=["pole", "threshold", "both"])
    common.add_argument("--records", help="records file, or 'reference' for published tables")
    common.add_argument("--jobs", type=int, help="worker threads for sweeps")
    common.add_argument("--log", help="append output to this run log")
    common.add_argument("--verbose", action="store_true")

    parser = argparse.ArgumentParser(
        prog="cross-modes", description="Bound states of asymmetric cross waveguides."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    subparsers.add_parser("solve", parents=[common], help="lowest state of one class")
    sweep = subparsers.add_parser("sweep", parents=[common], help="sweep width ratios")
    sweep.add_argument("--compare", action="store_true", help="compare with published tables")
    subparsers.add_parser("extrapolate", parents=[common], help="grid-refinement limit")
    subparsers.add_parser("critical", parents=[common], help="critical width ratio")
    predict = subparsers.add_parser("predict", parents=[common], help="square-well predictions")
    predict.add_argument("--verify", action="store_true", help="check against 2D solves")
    subparsers.add_parser("export-field", parents=[common], help="write a state's field")
    return parser


def _configure_logging(verbose):
    package_logger = logging.getLogger("cross_modes")
    if not any(getattr(h, "_cross_modes_cli", False) for h in package_logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        handler._cross_modes_cli = True
        package_logger.addHandler(handler)
    package_logger.setLevel(logging.INFO if verbose else logging.WARNING)


def _policy(config, sym):
    if config.L is not None and config.N is not None:
        return Fixed(config.L, config.N, label=config.set)
    elif config.set is not None:
        return from_string(config.set, sym)
    else:
        return PublishedSets(sym)


def _cache(config):
    if config.no_cache:
        return None
    return ResultCache(config.cache_dir)


def _cell_kwargs(config):
    return {
        "window_x": config.window("x"),
        "window_y": config.window("y"),
        "cut": config.cut_positions(),
    }


def _solve(problem, N, config, label, cache):
    """Solve one cell, reusing the cache; returns the record and eigenvector."""
    cell_kwargs = _cell_kwargs(config)
    if any(v is not None for v in cell_kwargs.values()):
        # custom fits are not part of the cache key
        cache = None
    key = cell_key(problem, N, config.tol, config.scheme, config.full)
    if cache is not None:
        entry = cache.get(key)
        if entry is not None and entry["eigenvector"] is not None:
            logger.info(f"Cache hit for beta = {problem.beta:g}, class {problem.sym}, N = {N}.")
            return entry["record"], entry["eigenvector"]

    record, vector = solve_cell(
        problem,
        N,
        scheme=config.scheme,
        tol=config.tol,
        full=config.full,
        grid_set=label,
        rng=config.seed,
        **cell_kwargs,
    )
    if cache is not None:
        cache.put(key, record, vector)
    return record, vector


def _single_problem(config):
    if config.beta is None:
        raise ValueError("No width ratio given; use --beta.")
    problem = CrossProblem.normalize(config.beta, config.sym)
    gs = _policy(config, problem.sym)(problem.beta)
    return CrossProblem(problem.beta, problem.sym, gs.L), gs


def _run_config(config):
    return config.to_dict() | {"version": __version__, "date": get_now()}


def cmd_solve(config, log):
    problem, gs = _single_problem(config)
    record, vector = _solve(problem, gs.N, config, gs.label, _cache(config))

    log.info(f"{problem!r}, N = {gs.N}\n\n" + print_table([record]))
    if config.k > 1:
        grid = build_grid(problem, gs.N)
        operator = assemble_operator(grid, problem, scheme=config.scheme, full=config.full)
        solution = certified_solver()(operator, k=config.k, tol=config.tol, rng=config.seed)
        ratios = pd.Series(solution.eigenvalues / problem.e_th, name="E/E_TH")
        ratios.index.name = "n"
        log.info(ratios.to_markdown(tablefmt="github", floatfmt=".6g"))

    if config.json is not None:
        write_json([record], config.json, _run_config(config))
    if config.output is not None:
        write_csv([record], config.output)
    if config.field is not None or config.cut is not None:
        _export(problem, gs, record, vector, config)

    if config.require_bound and not record.bound:
        raise UnboundStateError(
            f"No bound state for class {problem.sym} at beta = {problem.beta:g}."
        )
    return EXIT_OK


def _export(problem, gs, record, vector, config):
    if not record.bound:
        raise UnboundStateError(
            f"No bound state for class {problem.sym} at beta = {problem.beta:g} to export."
        )
    grid = build_grid(problem, gs.N)
    operator = assemble_operator(grid, problem, scheme=config.scheme, full=config.full)
    field = operator_field(vector, operator)

    tag = f"{problem.sym}_beta{problem.beta:g}"
    field_file = config.field if config.field is not None else f"field_{tag}.dat"
    cut_file = config.cut if config.cut is not None else f"cut_{tag}.dat"
    if str(field_file).endswith(".csv"):
        write_field_csv(field, field_file)
    else:
        write_field(field, field_file, grid, problem)

    axis = config.axis or "x"
    cuts = config.cut_positions()
    position = None if cuts is None else cuts[0 if axis == "x" else 1]
    write_cut(field, cut_file, axis=axis, position=position)
    logger.info(f"Wrote {field_file} and {cut_file}.")


def cmd_export_field(config, log):
    problem, gs = _single_problem(config)
    record, vector = _solve(problem, gs.N, config, gs.label, _cache(config))
    _export(problem, gs, record, vector, config)
    log.info(f"Exported field of {problem!r}, E/E_TH = {record.e_ratio:.6g}.")
    return EXIT_OK


def _sweep_records(config, sym):
    betas = config.beta_values()
    policy = _policy(config, sym)
    cache = _cache(config)
    cell_kwargs = {k: v for k, v in _cell_kwargs(config).items() if v is not None}
    if cell_kwargs:
        cache = None
    sweep = Sweep(
        sym,
        policy,
        scheme=config.scheme,
        tol=config.tol,
        cache=cache,
        n_jobs=config.jobs,
        full=config.full,
        rng=config.seed,
        cell_kwargs=cell_kwargs,
    )
    return sweep(betas, verbose=config.verbose)


def cmd_sweep(config, log):
    sym = SymmetryClass.parse(config.sym)
    records = _sweep_records(config, sym)
    log.info(f"Sweep of class {sym} ({sym.region})\n\n" + print_table(records))

    if config.output is not None:
        write_csv(records, config.output)
    if config.json is not None:
        write_json(records, config.json, _run_config(config))
    if config.compare:
        df = compare_with_reference(records)
        if df.empty:
            log.info("No published rows match these width ratios.")
        else:
            log.info("Deviation from published tables\n\n" + df.to_markdown(floatfmt=".4g"))

    if all(r.e_ratio is None for r in records):
        logger.error("Every cell of the sweep failed.")
        return EXIT_FAILURE
    return EXIT_OK


def cmd_extrapolate(config, log):
    if config.beta is None:
        raise ValueError("No width ratio given; use --beta.")
    Ns = config.grid_counts()
    if config.L is not None:
        L = config.L
    else:
        L = SETS[config.set or "I"][0]
    problem = CrossProblem.normalize(config.beta, config.sym, L)
    cache = _cache(config)

    records = []
    for N in Ns:
        record, _ = _solve(problem, N, config, f"N={N}", cache)
        records.append(record)
    values = [r.e_ratio for r in records]
    fit = extrapolate_grid_sequence(values, Ns)

    df = pd.DataFrame({"N": Ns, "E/E_TH": values})
    log.info(f"Grid sequence for {problem!r}\n\n" + df.to_markdown(index=False, floatfmt=".6g"))
    params = pd.DataFrame({"value": fit.params, "stderr": fit.stderr})
    log.info("Fit a1 + a2/N^g + a3/N^2g + a4/N^3g\n\n" + params.to_markdown(floatfmt=".6g"))
    if problem.beta == 1.0 and problem.sym in CCM_RATIOS:
        ccm = CCM_RATIOS[problem.sym]
        log.info(f"Conformal-map value {ccm:g}, deviation {fit.params['a1'] / ccm - 1.0:+.3%}.")

    if config.output is not None:
        write_csv(records, config.output)
    if config.json is not None:
        write_json(records, config.json, _run_config(config) | {"fit": fit._asdict()})
    return EXIT_OK


def _critical_records(config, sym):
    if config.records == "reference" or (config.records is None and config.betas is None):
        logger.info(f"Using the published table for class {sym}.")
        return reference_records(sym)
    elif config.records is not None:
        return read_records(config.records, sym)
    else:
        return _sweep_records(config, sym)


def cmd_critical(config, log):
    sym = SymmetryClass.parse(config.sym)
    records = _critical_records(config, sym)

    if config.method == "both":
        report = critical_beta_report(sym, records, axis=config.axis)
        fits = {m: report[m] for m in ("pole", "threshold")}
        errors = report["errors"]
    else:
        fits, errors = {}, {}
        try:
            fits[config.method] = locate_critical_beta(sym, records, config.method, config.axis)
        except (NoTransitionError, IllConditionedFitError) as err:
            fits[config.method], errors[config.method] = None, str(err)

    rows = []
    for method, fit in fits.items():
        if fit is None:
            rows.append([method, np.nan, np.nan, errors.get(method, "")])
        else:
            rows.append([method, fit.singularity, fit.stderr["beta_star"], ""])
    pole = published_pole(sym, config.axis)
    if pole is not None:
        rows.append(["published fit", pole, np.nan, ""])
    df = pd.DataFrame(rows, columns=["method", "beta_star", "stderr", "error"])
    msg = f"Critical width ratio, class {sym}\n\n" + df.to_markdown(index=False, floatfmt=".5g")
    if config.method == "both" and report["agree"] is not None:
        msg += f"\n\nMethods agree within combined uncertainty: {report['agree']}"
    log.info(msg)

    if config.json is not None:
        data = {m: (None if f is None else f._asdict()) for m, f in fits.items()}
        write_json([], config.json, _run_config(config) | {"critical": data})
    if all(fit is None for fit in fits.values()):
        return EXIT_FAILURE
    return EXIT_OK


def cmd_predict(config, log):
    df = predictions_frame()
    log.info("Square-well predictions of boundness\n\n" + df.to_markdown(tablefmt="github"))
    if not config.verify:
        return EXIT_OK

    large_beta = config.beta if config.beta is not None and config.beta > 1.0 else LARGE_BETA
    cache = _cache(config)
    rows, agree = [], True
    for sym, prediction in qualitative_predictions().items():
        for beta, expected in ((1.0, prediction.symmetric), (large_beta, prediction.large_beta)):
            gs = _policy(config, sym)(beta)
            problem = CrossProblem(beta, sym, gs.L)
            record, _ = _solve(problem, gs.N, config, gs.label, cache)
            agree &= record.bound == expected
            rows.append([sym.value, beta, expected, record.bound, record.e_ratio])
    df = pd.DataFrame(rows, columns=["class", "beta", "predicted", "computed", "E/E_TH"])
    log.info("Predictions against 2D solves\n\n" + df.to_markdown(index=False, floatfmt=".6g"))
    return EXIT_OK if agree else EXIT_FAILURE


COMMANDS = {
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "extrapolate": cmd_extrapolate,
    "critical": cmd_critical,
    "predict": cmd_predict,
    "export-field": cmd_export_field,
}


def main(argv=None):
    """
    Run the command-line interface.

    Parameters
    ----------
    argv : list of str, optional
        Arguments; defaults to ``sys.argv[1:]``.

    Returns
    -------
    int
        Exit status.

    """
    parser = build_parser()
    try:
        args = vars(parser.parse_args(argv))
    except SystemExit as err:
        return EXIT_OK if err.code in (0, None) else EXIT_USAGE

    try:
        config = RunConfig()
        config_file = args.pop("config", None)
        if config_file is not None:
            config = RunConfig.from_file(config_file)
        config.update(args)
    except (OSError, ValueError) as err:
        print(f"cross-modes: error: {err}", file=sys.stderr)
        return EXIT_USAGE

    _configure_logging(config.verbose)
    try:
        with _file_logger(config.log) as log:
            return COMMANDS[config.command](config, log)
    except InvalidGridError as err:
        logger.error(f"Invalid grid: {err}")
        return EXIT_INVALID_GRID
    except (NonConvergenceError, ShiftFactorizationError) as err:
        logger.error(f"Eigensolver failed: {err}")
        return EXIT_NON_CONVERGENCE
    except UnboundStateError as err:
        logger.error(str(err))
        return EXIT_UNBOUND
    except CacheIntegrityError as err:
        logger.error(f"Cache integrity: {err}")
        return EXIT_CACHE
    except Exception as err:
        logger.error(f"{err.__class__.__name__}: {err}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())

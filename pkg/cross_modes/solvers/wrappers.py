"""Eigensolver wrappers."""

import logging
from functools import partial, wraps
from time import perf_counter

from cross_modes.base import NonConvergenceError, ShiftFactorizationError
from cross_modes.solvers.base import smallest_eigenpairs
from cross_modes.util import check_eigenpairs

logger = logging.getLogger(__name__)


def eval_wrapper(solver):
    """Wrap a solver, timing the call and checking the returned pairs independently."""

    @wraps(solver)
    def timed_solver(A, *args, **kwargs):
        t_start = perf_counter()
        solution = solver(A, *args, **kwargs)
        t_run = perf_counter() - t_start

        check_eigenpairs(A, solution, B=kwargs.get("B"))
        return solution._replace(t_run=t_run)

    return timed_solver


def fallback_solver(*solvers):
    """
    Create a solver that tries each solver in turn and returns the first certified solution.

    Parameters
    ----------
    solvers : callable
        Solvers with the `smallest_eigenpairs` call signature, in order of preference.

    Returns
    -------
    callable

    Raises
    ------
    NonConvergenceError or ShiftFactorizationError
        The error of the last solver, if none succeeds.

    """
    if not solvers:
        raise ValueError("At least one solver is required.")

    def new_solver(A, *args, **kwargs):
        for n, solver in enumerate(solvers):
            try:
                return solver(A, *args, **kwargs)
            except (NonConvergenceError, ShiftFactorizationError) as err:
                if n == len(solvers) - 1:
                    raise
                name = getattr(solver, "__name__", repr(solver))
                logger.info(f"{name} failed ({err}); trying the next solver.")

    return new_solver


DENSE_FALLBACK_LIMIT = 4000


def certified_solver(
    primary=smallest_eigenpairs, dense_limit=DENSE_FALLBACK_LIMIT, n_refine=30
):
    """
    Default solver chain: `primary`, then a checked retry that solves up to `dense_limit`
    unknowns densely and otherwise allows `n_refine` inverse-iteration sweeps.
    """
    retry = partial(smallest_eigenpairs, dense_limit=dense_limit, n_refine=n_refine)
    retry.__name__ = "smallest_eigenpairs_retry"
    return fallback_solver(primary, eval_wrapper(retry))


__all__ = ["eval_wrapper", "fallback_solver", "certified_solver", "DENSE_FALLBACK_LIMIT"]

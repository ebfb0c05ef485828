"""Single-cell solves and width-ratio sweeps."""

import logging
from concurrent.futures import ThreadPoolExecutor
from time import perf_counter

import numpy as np
from tqdm import tqdm

from cross_modes.analysis.decay import decay_lengths
from cross_modes.base import (
    DEFAULT_SEED,
    InvalidGridError,
    NonConvergenceError,
    RandomGeneratorMixin,
    ShiftFactorizationError,
    SweepRecord,
    TruncationDominatedError,
    UnboundStateError,
)
from cross_modes.cache import cell_key
from cross_modes.discretization import (
    assemble_operator,
    build_grid,
    discrete_threshold,
    operator_field,
)
from cross_modes.geometry import CrossProblem, SymmetryClass, continuum_threshold
from cross_modes.policies import PublishedSets
from cross_modes.solvers import certified_solver

logger = logging.getLogger(__name__)

_default_solver = certified_solver()

_N_FULL_PAIRS = 8
_PARITY_TOL = 1e-6


def _matches_parity(field, sym):
    v = field.unfold().values
    scale = np.linalg.norm(v)
    sign_x = 1.0 if sym.x_even else -1.0
    sign_y = 1.0 if sym.y_even else -1.0
    return (
        np.linalg.norm(v - sign_x * v[:, ::-1]) <= _PARITY_TOL * scale
        and np.linalg.norm(v - sign_y * v[::-1]) <= _PARITY_TOL * scale
    )


def solve_cell(
    problem,
    N,
    scheme="fd",
    tol=1e-9,
    full=False,
    grid_set=None,
    window_x=None,
    window_y=None,
    cut=None,
    floor=1e-8,
    rng=None,
    solver=None,
):
    """
    Solve one (width ratio, class, grid) cell.

    Parameters
    ----------
    problem : CrossProblem
        Problem.
    N : int
        Interval count along x; y uses the same spacing.
    scheme : {"fd", "galerkin"}, optional
        Assembly scheme.
    tol : float, optional
        Eigensolver relative residual bound.
    full : bool, optional
        Solve on the whole cross and pick the lowest state of the problem's class.
    grid_set : str, optional
        Set label reported in the record.
    window_x, window_y : tuple of float, optional
        Decay fit windows.
    cut : tuple of float, optional
        Decay fit cut positions.
    floor : float, optional
        Decay fit amplitude floor.
    rng : int or Generator, optional
        Start vector seed.
    solver : callable, optional
        Eigensolver with the `smallest_eigenpairs` signature. Defaults to `certified_solver`,
        which retries a failed ARPACK solve.

    Returns
    -------
    SweepRecord
        Record of the lowest state of the class.
    numpy.ndarray
        Its eigenvector.

    """
    if solver is None:
        solver = _default_solver
    t_start = perf_counter()
    grid = build_grid(problem, N)
    operator = assemble_operator(grid, problem, scheme=scheme, full=full)

    k = min(_N_FULL_PAIRS, len(operator) - 1) if full else 1
    solution = solver(operator, k=k, tol=tol, rng=rng)
    for m in range(k):
        vector = solution.eigenvectors[:, m]
        field = operator_field(vector, operator)
        if not full or _matches_parity(field, problem.sym):
            break
    else:
        raise ValueError(f"None of the {k} lowest full-domain states has class {problem.sym}.")
    eigenvalue = float(solution.eigenvalues[m])

    e_th = continuum_threshold(problem)
    threshold = discrete_threshold(grid, problem, scheme)
    bound = eigenvalue < threshold * (1.0 - 3.0 * tol)

    fits = dict.fromkeys(("ell_x", "ell_y", "r2_x", "r2_y", "window_x", "window_y"))
    error = None
    if bound:
        try:
            lengths = decay_lengths(field, grid, problem, window_x, window_y, cut, floor)
        except (UnboundStateError, TruncationDominatedError) as err:
            error = f"{err.__class__.__name__}: {err}"
            logger.info(f"beta = {problem.beta:g}, class {problem.sym}: {error}")
        else:
            fits.update(
                ell_x=lengths.ell_x,
                ell_y=lengths.ell_y,
                r2_x=lengths.fit_x.r2,
                r2_y=lengths.fit_y.r2,
                window_x=lengths.fit_x.window,
                window_y=lengths.fit_y.window,
            )

    record = SweepRecord(
        beta=problem.beta,
        sym=problem.sym.value,
        e_ratio=eigenvalue / e_th,
        bound=bool(bound),
        grid_set=grid_set,
        L=problem.L_x,
        N=int(N),
        eigenvalue=eigenvalue,
        threshold=threshold,
        t_run=perf_counter() - t_start,
        error=error,
        **fits,
    )
    return record, vector


def _error_record(problem, gs, err):
    return SweepRecord(
        beta=problem.beta,
        sym=problem.sym.value,
        e_ratio=None,
        bound=False,
        grid_set=gs.label,
        L=gs.L,
        N=gs.N,
        error=f"{err.__class__.__name__}: {err}",
    )


class Sweep(RandomGeneratorMixin):
    """
    Sweep of one symmetry class over width ratios.

    Parameters
    ----------
    sym : SymmetryClass or str
        Symmetry class.
    policy : policies.Base, optional
        Grid policy. Defaults to the published sets.
    scheme : {"fd", "galerkin"}, optional
        Assembly scheme.
    tol : float, optional
        Eigensolver tolerance.
    cache : ResultCache, optional
        Store consulted before and updated after each solve.
    n_jobs : int, optional
        Worker threads.
    full : bool, optional
        Solve without symmetry reduction.
    rng : int or Generator, optional
        Seeds the per-cell start vectors.
    cell_kwargs : dict, optional
        Extra keyword arguments for `solve_cell`.

    """

    def __init__(
        self,
        sym,
        policy=None,
        scheme="fd",
        tol=1e-9,
        cache=None,
        n_jobs=1,
        full=False,
        rng=DEFAULT_SEED,
        cell_kwargs=None,
    ):
        super().__init__(rng)
        self.sym = SymmetryClass.parse(sym)
        self.policy = PublishedSets(self.sym) if policy is None else policy
        self.scheme = scheme
        self.tol = tol
        self.cache = cache
        self.n_jobs = max(int(n_jobs), 1)
        self.full = full
        self.cell_kwargs = {} if cell_kwargs is None else dict(cell_kwargs)

    def __repr__(self):
        return (
            f"Sweep(sym={self.sym.value!r}, policy={self.policy!r}, scheme={self.scheme!r}, "
            f"tol={self.tol:g})"
        )

    def _problem(self, beta, gs):
        return CrossProblem(beta, self.sym, gs.L)

    def _cell(self, beta, seed):
        gs = self.policy(beta)
        try:
            problem = self._problem(beta, gs)
            key = cell_key(problem, gs.N, self.tol, self.scheme, self.full)
        except (ValueError, InvalidGridError) as err:
            return _error_record(CrossProblem(beta, self.sym), gs, err)

        if self.cache is not None:
            entry = self.cache.get(key)
            if entry is not None:
                return entry["record"]

        try:
            record, vector = solve_cell(
                problem,
                gs.N,
                scheme=self.scheme,
                tol=self.tol,
                full=self.full,
                grid_set=gs.label,
                rng=seed,
                **self.cell_kwargs,
            )
        except (
            InvalidGridError,
            NonConvergenceError,
            ShiftFactorizationError,
            ValueError,
        ) as err:
            logger.warning(f"beta = {beta:g}, class {self.sym}: {err}")
            return _error_record(problem, gs, err)

        if self.cache is not None:
            self.cache.put(key, record, vector)
        return record

    def __call__(self, betas, verbose=False, rng=None):
        """
        Solve every width ratio.

        Parameters
        ----------
        betas : Collection of float
            Ascending width ratios, at least 1.
            Ratios below 1 are rejected rather than normalized: turning the cross exchanges the
            even-odd and odd-even classes, and a sweep holds one class. Sweep the swapped class
            over ``1 / beta`` instead.
        verbose : bool, optional
            Show a progress bar.
        rng : int or Generator, optional
            Overrides the instance generator for this call.

        Returns
        -------
        list of SweepRecord
            One record per width ratio, in input order. Failed cells carry the error message.

        """
        betas = [float(beta) for beta in betas]
        if any(beta < 1.0 for beta in betas):
            raise ValueError(
                f"Width ratios must be at least 1; sweep class {self.sym.swapped()} over 1 / beta."
            )
        if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
            raise ValueError("Width ratios must be strictly ascending.")

        rng = self._get_rng(rng)
        seeds = [int(seed) for seed in rng.integers(2**31, size=len(betas))]

        desc = f"Sweep {self.sym}"
        if self.n_jobs == 1:
            cells = tqdm(zip(betas, seeds), total=len(betas), desc=desc, disable=not verbose)
            records = [self._cell(beta, seed) for beta, seed in cells]
        else:
            with ThreadPoolExecutor(max_workers=self.n_jobs) as executor:
                futures = executor.map(self._cell, betas, seeds)
                records = list(tqdm(futures, total=len(betas), desc=desc, disable=not verbose))
        return records


def beta_sweep(sym, betas, policy=None, verbose=False, **kwargs):
    """
    Sweep a symmetry class over width ratios.

    Parameters
    ----------
    sym : SymmetryClass or str
        Symmetry class.
    betas : Collection of float
        Ascending width ratios.
    policy : policies.Base, optional
        Grid policy; defaults to the published sets.
    verbose : bool, optional
        Progress bar.
    kwargs
        Further `Sweep` parameters.

    Returns
    -------
    list of SweepRecord

    """
    return Sweep(sym, policy, **kwargs)(betas, verbose=verbose)


__all__ = ["solve_cell", "Sweep", "beta_sweep"]

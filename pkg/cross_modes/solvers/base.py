"""Certified eigensolvers for symmetric (generalized) sparse operators."""

import logging
from time import perf_counter

import numpy as np
import scipy.linalg
from scipy import sparse
from scipy.sparse.linalg import ArpackError, LinearOperator, eigsh, splu

from cross_modes.base import (
    EigenSolution,
    NonConvergenceError,
    RandomGeneratorMixin,
    ShiftFactorizationError,
)

logger = logging.getLogger(__name__)

_PIVOT_RATIO = 1e-14


def _unpack(A, B=None):
    """Return ``(matrix, mass)`` from an operator object or raw matrices."""
    if hasattr(A, "matrix"):
        if B is None:
            B = A.mass
        A = A.matrix
    A = sparse.csr_matrix(A)
    if B is not None:
        B = sparse.csr_matrix(B)
        if B.shape != A.shape:
            raise ValueError("Mass matrix shape does not match the operator.")
    if A.shape[0] != A.shape[1]:
        raise ValueError("Operator must be square.")
    return A, B


def factorize_shifted(A, shift, B=None):
    """
    Sparse LU factorization of ``A - shift B``.

    Raises
    ------
    ShiftFactorizationError
        If the shifted operator is singular to working precision.

    """
    n = A.shape[0]
    B_ = sparse.identity(n, format="csr") if B is None else B
    shifted = (A - shift * B_).tocsc()
    try:
        lu = splu(shifted)
    except RuntimeError as err:
        raise ShiftFactorizationError(f"Shift {shift:g} factorization failed: {err}") from err

    pivots = np.abs(lu.U.diagonal())
    if pivots.size and pivots.min() <= _PIVOT_RATIO * pivots.max():
        raise ShiftFactorizationError(
            f"Shift {shift:g} lies on an eigenvalue "
            f"(pivot ratio {pivots.min() / pivots.max():.1e})."
        )
    return lu


def _apply(B, v):
    return v if B is None else B @ v


def _normalize(B, v):
    return v / np.sqrt(v @ _apply(B, v))


def _rayleigh(A, B, v):
    return (v @ (A @ v)) / (v @ _apply(B, v))


def _residual(A, B, lam, v):
    Bv = _apply(B, v)
    res = np.linalg.norm(A @ v - lam * Bv)
    bound = max(abs(lam), np.finfo(float).tiny) * np.linalg.norm(Bv)
    return res, bound


def _fix_sign(v):
    """Make the largest-magnitude component positive."""
    return v if v[np.argmax(np.abs(v))] >= 0 else -v


def smallest_eigenpairs(
    A, k=1, tol=1e-9, B=None, max_iter=None, rng=None, dense_limit=200, n_refine=3
):
    """
    Smallest eigenpairs of a symmetric positive definite operator.

    Parameters
    ----------
    A : OperatorMatrix or scipy.sparse.spmatrix or numpy.ndarray
        Operator. A generalized `OperatorMatrix` supplies its own mass matrix.
    k : int, optional
        Number of pairs.
    tol : float, optional
        Relative residual bound, ``||A v - lam B v|| <= tol |lam| ||B v||``.
    B : scipy.sparse.spmatrix, optional
        Mass matrix; identity if omitted.
    max_iter : int, optional
        ARPACK iteration limit.
    rng : int or Generator, optional
        Seed or generator for the start vector. Defaults to the package seed.
    dense_limit : int, optional
        Problems with at most this many unknowns are solved densely.
    n_refine : int, optional
        Inverse-iteration sweeps allowed for pairs that miss the residual bound.

    Returns
    -------
    EigenSolution

    Raises
    ------
    NonConvergenceError
        If any pair cannot be certified.

    """
    return spectral_transform_solve(
        A,
        0.0,
        k,
        tol,
        B=B,
        max_iter=max_iter,
        rng=rng,
        dense_limit=dense_limit,
        n_refine=n_refine,
    )


def spectral_transform_solve(
    A,
    shift=0.0,
    k=1,
    tol=1e-9,
    interior=False,
    B=None,
    max_iter=None,
    rng=None,
    dense_limit=200,
    n_refine=3,
):
    """
    Eigenpairs by the shift-invert spectral transformation.

    Parameters
    ----------
    A : OperatorMatrix or scipy.sparse.spmatrix or numpy.ndarray
        Operator.
    shift : float, optional
        Spectral shift. Unless `interior`, it must lie below the wanted eigenvalues.
    k : int, optional
        Number of pairs.
    tol : float, optional
        Relative residual bound.
    interior : bool, optional
        Return the `k` eigenvalues nearest to `shift` instead of the smallest ones.
    B : scipy.sparse.spmatrix, optional
        Mass matrix.
    max_iter : int, optional
        ARPACK iteration limit.
    rng : int or Generator, optional
        Start vector seed or generator.
    dense_limit : int, optional
        Dense solve threshold.
    n_refine : int, optional
        Inverse-iteration refinement sweeps.

    Returns
    -------
    EigenSolution
        Ascending eigenvalues with sign-fixed, unit (``B``-norm) eigenvectors in columns.

    Raises
    ------
    ShiftFactorizationError
        If ``A - shift B`` is singular.
    NonConvergenceError
        If a pair misses the residual bound after refinement.

    """
    A, B = _unpack(A, B)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"Number of pairs must be in [1, {n}], got {k}.")
    if not 0.0 < tol <= 1e-2:
        raise ValueError(f"Tolerance must be in (0, 1e-2], got {tol}.")
    rng = RandomGeneratorMixin.make_rng(rng)
    if max_iter is None:
        max_iter = 10 * n

    t_start = perf_counter()
    lu = factorize_shifted(A, shift, B)

    n_iter = 0
    if n <= dense_limit or k >= n - 1:
        values, vectors = scipy.linalg.eigh(A.toarray(), None if B is None else B.toarray())
        if interior:
            idx = np.sort(np.argsort(np.abs(values - shift), kind="stable")[:k])
        else:
            idx = np.arange(k)
        values, vectors = values[idx], vectors[:, idx]
    else:
        counter = [0]

        def _solve(x):
            counter[0] += 1
            return lu.solve(np.asarray(x, dtype=float).ravel())

        op_inv = LinearOperator((n, n), matvec=_solve, dtype=float)
        ncv = min(n, max(2 * k + 1, 20))
        try:
            values, vectors = eigsh(
                A,
                k=k,
                M=B,
                sigma=shift,
                which="LM",
                OPinv=op_inv,
                v0=rng.standard_normal(n),
                ncv=ncv,
                maxiter=max_iter,
                tol=tol * 1e-3,
            )
        except ArpackError as err:
            raise NonConvergenceError(f"ARPACK failed: {err}", max_iter=max_iter) from err
        n_iter = counter[0]
        order = np.argsort(values)
        values, vectors = values[order], vectors[:, order]

    vectors = np.column_stack([_normalize(B, v) for v in vectors.T])
    values = np.array([_rayleigh(A, B, v) for v in vectors.T])

    residuals = np.empty(k)
    for m in range(k):
        res, bound = _residual(A, B, values[m], vectors[:, m])
        best = res / bound
        for _ in range(n_refine):
            if res <= tol * bound:
                break
            v = lu.solve(_apply(B, vectors[:, m]))
            for p in range(m):
                v -= (vectors[:, p] @ _apply(B, v)) * vectors[:, p]
            v = _normalize(B, v)
            lam = _rayleigh(A, B, v)
            res, bound = _residual(A, B, lam, v)
            best = min(best, res / bound)
            vectors[:, m], values[m] = v, lam
            n_iter += 1

        if res > tol * bound:
            raise NonConvergenceError(
                f"Pair {m} missed the residual bound: relative residual {best:.2e} > {tol:.1e}.",
                max_iter=max_iter,
                best_residual=best,
            )
        residuals[m] = res
        vectors[:, m] = _fix_sign(vectors[:, m])

    order = np.argsort(values, kind="stable")
    t_run = perf_counter() - t_start
    logger.debug(
        f"Solved n = {n}, k = {k}, shift = {shift:g}: lowest {values[order[0]]:.10g} "
        f"in {t_run:.3f} s ({n_iter} operator applications)."
    )
    return EigenSolution(
        values[order], vectors[:, order], residuals[order], n_iter, tol, shift, t_run
    )


__all__ = ["smallest_eigenpairs", "spectral_transform_solve", "factorize_shifted"]

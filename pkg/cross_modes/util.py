"""Common utilities."""

import numpy as np
from scipy import sparse


def _as_matrices(A, B=None):
    if hasattr(A, "matrix"):
        if B is None:
            B = A.mass
        A = A.matrix
    return sparse.csr_matrix(A), (None if B is None else sparse.csr_matrix(B))


def check_eigenpairs(A, solution, B=None, tol=None, orth_tol=1e-8):
    """
    Check an eigensolution against its operator.

    Parameters
    ----------
    A : OperatorMatrix or scipy.sparse.spmatrix or numpy.ndarray
        Operator the solution was computed for.
    solution : EigenSolution
        Eigenpairs, vectors in columns.
    B : scipy.sparse.spmatrix, optional
        Mass matrix of a generalized problem.
    tol : float, optional
        Relative residual bound. Defaults to the tolerance stored in `solution`.
    orth_tol : float, optional
        Largest allowed deviation of ``V^T B V`` from the identity.

    Raises
    ------
    ValueError
        If a residual, ordering, orthogonality or Rayleigh-quotient condition fails.

    """
    A, B = _as_matrices(A, B)
    if tol is None:
        tol = solution.tol
    values = np.asarray(solution.eigenvalues)
    vectors = np.asarray(solution.eigenvectors).reshape(A.shape[0], -1)

    if np.any(np.diff(values) < 0):
        raise ValueError("Eigenvalues are not in ascending order.")

    BV = vectors if B is None else B @ vectors
    AV = A @ vectors
    for m, lam in enumerate(values):
        res = np.linalg.norm(AV[:, m] - lam * BV[:, m])
        if res > tol * abs(lam) * np.linalg.norm(BV[:, m]):
            raise ValueError(f"Pair {m} violates the residual bound ({res:.3e}).")

        rayleigh = (vectors[:, m] @ AV[:, m]) / (vectors[:, m] @ BV[:, m])
        if abs(rayleigh - lam) > 10 * tol * abs(lam):
            raise ValueError(f"Pair {m} is inconsistent with its Rayleigh quotient.")

    gram = vectors.T @ BV
    if np.max(np.abs(gram - np.eye(values.size)), initial=0.0) > orth_tol:
        raise ValueError("Eigenvectors are not orthonormal.")

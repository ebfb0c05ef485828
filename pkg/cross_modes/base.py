"""Core package objects."""

from collections import namedtuple
from datetime import datetime

import numpy as np

DEFAULT_SEED = 12345

EigenSolution = namedtuple(
    "EigenSolution",
    ["eigenvalues", "eigenvectors", "residuals", "n_iter", "tol", "shift", "t_run"],
    defaults=(0.0, None),
)

SweepRecord = namedtuple(
    "SweepRecord",
    [
        "beta",
        "sym",
        "e_ratio",
        "ell_x",
        "ell_y",
        "bound",
        "grid_set",
        "L",
        "N",
        "eigenvalue",
        "threshold",
        "r2_x",
        "r2_y",
        "window_x",
        "window_y",
        "t_run",
        "error",
    ],
    defaults=(None, None, True, None, None, None, None, None, None, None, None, None, None, None),
)

FitResult = namedtuple(
    "FitResult",
    ["model", "params", "rss", "singularity", "stderr", "extremum", "n_data", "extra"],
    defaults=(None, None, None, 0, None),
)


class InvalidGridError(ValueError):
    """Grid spacing does not place the arm boundary on grid lines, or N is not even."""


class NonConvergenceError(RuntimeError):
    """
    Eigensolver failed to certify the requested pairs.

    Parameters
    ----------
    message : str
        Description.
    max_iter : int, optional
        Iteration limit that was in effect.
    best_residual : float, optional
        Smallest relative residual reached.

    """

    def __init__(self, message, max_iter=None, best_residual=None):
        super().__init__(message)
        self.max_iter = max_iter
        self.best_residual = best_residual


class ShiftFactorizationError(RuntimeError):
    """The shifted operator could not be factorized (shift on or too near an eigenvalue)."""


class UnboundStateError(RuntimeError):
    """The state has no exponential tail."""


class TruncationDominatedError(RuntimeError):
    """The fitted tail is contaminated by the outer Dirichlet cut."""


class IllConditionedFitError(RuntimeError):
    """Least-squares parameters are not identifiable from the data."""


class NoTransitionError(RuntimeError):
    """Records show no approach to the continuum threshold."""


class CacheIntegrityError(RuntimeError):
    """A cache key already holds a different payload."""


def get_now():
    return datetime.now().replace(microsecond=0).isoformat().replace(":", "_")


class RandomGeneratorMixin:
    """
    Mixin class providing a random number generating attribute and methods.

    Parameters
    ----------
    rng : int or Generator, optional
        Random number generator seed or object. Defaults to the package seed, so that start
        vectors are reproducible unless a caller asks otherwise.

    """

    def __init__(self, rng=DEFAULT_SEED):
        self.rng = rng

    @property
    def rng(self):
        r"""NumPy random number generator."""
        return self._rng

    @rng.setter
    def rng(self, value):
        self._rng = self.make_rng(value)

    def _get_rng(self, rng=None):
        if rng is None:
            return self.rng
        else:
            return self.make_rng(rng)

    @staticmethod
    def make_rng(rng):
        """
        Return a random number generator.

        Parameters
        ----------
        rng : int or Generator, optional
            Random number generator seed or object. `None` gives the package default seed.

        Returns
        -------
        Generator

        """
        if rng is None:
            return np.random.default_rng(DEFAULT_SEED)
        elif isinstance(rng, (int, np.integer)):
            return np.random.default_rng(int(rng))
        elif isinstance(rng, np.random.Generator):
            return rng
        else:
            raise TypeError("Input must be None, int, or a NumPy Generator.")

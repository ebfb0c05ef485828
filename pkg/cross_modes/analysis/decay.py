"""Exponential tail fits along the arms."""

import logging
from collections import namedtuple
from math import asinh, sqrt
from warnings import warn

import numpy as np
from scipy.stats import linregress

from cross_modes.base import TruncationDominatedError, UnboundStateError
from cross_modes.discretization import transverse_energy
from cross_modes.geometry import arm_thresholds, cut_position

logger = logging.getLogger(__name__)

DecayFit = namedtuple(
    "DecayFit", ["length", "r2", "window", "n_points", "cut", "truncation_warning"]
)
DecayLengths = namedtuple("DecayLengths", ["ell_x", "ell_y", "fit_x", "fit_y"])

JUNCTION_OFFSET = 2.0
WINDOW_END = 0.7
MIN_POINTS = 5
R2_MIN = 0.99
R2_WARN = 0.999


def decay_length(field, grid, problem, axis="x", window=None, cut=None, floor=1e-8):
    """
    Fit ``|psi| ~ exp(-s / ell)`` along one arm.

    Parameters
    ----------
    field : Field
        Node values of a bound state.
    grid : Grid
        Grid the field lives on.
    problem : CrossProblem
        Problem, for the width ratio and the class parities.
    axis : {"x", "y"}, optional
        Arm direction.
    window : tuple of float, optional
        Fit interval in rescaled coordinates along the arm. Defaults to two arm half-widths past
        the junction edge up to ``0.7 L``.
    cut : float, optional
        Rescaled transverse position of the cut line. Defaults to 0, or 1/3 when the state is
        odd across the arm.
    floor : float, optional
        Points with ``|psi|`` below ``floor * max |psi|`` on the cut are dropped.

    Returns
    -------
    DecayFit
        `length` in original (unscaled) coordinates.

    Raises
    ------
    UnboundStateError
        If the tail is not decaying exponentially.
    TruncationDominatedError
        If the outer Dirichlet cut bends the tail.

    """
    if axis not in ("x", "y"):
        raise ValueError("Axis must be 'x' or 'y'.")
    if cut is None:
        cut = cut_position(problem.sym, axis)
    L = problem.L_x if axis == "x" else problem.L_y
    h = grid.h_x if axis == "x" else grid.h_y

    if axis == "x":
        s, values = field.cut_x(cut)
    else:
        s, values = field.cut_y(cut)
    half = s >= 0.0
    s, values = s[half], np.abs(values[half])
    v_max = values.max(initial=0.0)
    if v_max == 0.0:
        raise UnboundStateError(f"Field vanishes on the {axis}-cut at {cut:g}.")

    if window is None:
        window = (1.0 + JUNCTION_OFFSET, WINDOW_END * L)
    starts = (window[0], 1.0 + h)
    for start in starts:
        keep = (s >= start) & (s <= window[1]) & (values > floor * v_max)
        if keep.sum() >= MIN_POINTS:
            break
    else:
        raise UnboundStateError(f"Fewer than {MIN_POINTS} usable tail points along {axis}.")
    s_fit, log_fit = s[keep], np.log(values[keep])
    window_used = (float(s_fit[0]), float(s_fit[-1]))

    result = linregress(s_fit, log_fit)
    r2 = result.rvalue**2
    if result.slope >= 0.0 or r2 < R2_MIN:
        raise UnboundStateError(
            f"No exponential tail along {axis}: slope {result.slope:.3g}, R^2 = {r2:.4f}."
        )
    if r2 < R2_WARN:
        warn(f"Tail fit along {axis} has R^2 = {r2:.5f} below {R2_WARN}.")

    length = -1.0 / result.slope
    truncation_warning = 3.0 * length > L
    if truncation_warning:
        warn(f"Decay length {length:.3g} along {axis} exceeds a third of L = {L:g}.")
    if length > L / 5.0:
        _check_halves(s_fit, log_fit, result.slope, axis)

    if axis == "y":
        length *= problem.beta
    logger.debug(f"ell_{axis} = {length:.6g} over {window_used}, R^2 = {r2:.6f}.")
    return DecayFit(length, r2, window_used, int(keep.sum()), cut, truncation_warning)


def _check_halves(s, log_values, slope, axis):
    mid = s.size // 2
    if mid < 3 or s.size - mid < 3:
        return
    slope_near = linregress(s[:mid], log_values[:mid]).slope
    slope_far = linregress(s[mid:], log_values[mid:]).slope
    if abs(slope_far - slope_near) > 0.25 * abs(slope):
        raise TruncationDominatedError(
            f"Tail slope along {axis} drifts from {slope_near:.3g} to {slope_far:.3g} across the "
            "window; increase L."
        )


def decay_lengths(field, grid, problem, window_x=None, window_y=None, cut=None, floor=1e-8):
    """
    Decay lengths along both arms.

    Parameters
    ----------
    field : Field
        Bound-state field.
    grid : Grid
        Node grid.
    problem : CrossProblem
        Problem.
    window_x, window_y : tuple of float, optional
        Fit windows along each arm, rescaled coordinates.
    cut : tuple of float, optional
        Cut positions ``(y0, x0)`` for the x and y fits.
    floor : float, optional
        Relative amplitude floor.

    Returns
    -------
    DecayLengths

    """
    cut_x, cut_y = (None, None) if cut is None else cut
    fit_x = decay_length(field, grid, problem, "x", window_x, cut_x, floor)
    fit_y = decay_length(field, grid, problem, "y", window_y, cut_y, floor)
    return DecayLengths(fit_x.length, fit_y.length, fit_x, fit_y)


def channel_decay_length(problem, eigenvalue, axis="x", grid=None, scheme="fd"):
    """
    Asymptotic decay length ``1 / sqrt(threshold - lambda)`` of a channel.

    Parameters
    ----------
    problem : CrossProblem
        Problem.
    eigenvalue : float
        Energy of the state, ``-Laplacian`` units.
    axis : {"x", "y"}, optional
        Arm direction; the channel threshold is that arm's transverse mode of matching parity.
    grid : Grid, optional
        Use the discrete channel threshold and dispersion of this grid.
    scheme : {"fd", "galerkin"}, optional
        Scheme for the discrete threshold.

    Returns
    -------
    float
        Decay length in original coordinates.

    Raises
    ------
    UnboundStateError
        If the energy is not below the channel threshold.

    """
    sym = problem.sym
    if axis == "x":
        parity, n = sym.parity_y, (1 if sym.y_even else 2)
        if grid is None:
            threshold = arm_thresholds(problem.beta)["horizontal", parity]
        else:
            threshold = transverse_energy(grid.h_y, n, scheme) / problem.beta**2
    elif axis == "y":
        parity, n = sym.parity_x, (1 if sym.x_even else 2)
        if grid is None:
            threshold = arm_thresholds(problem.beta)["vertical", parity]
        else:
            threshold = transverse_energy(grid.h_x, n, scheme)
    else:
        raise ValueError("Axis must be 'x' or 'y'.")

    gap = threshold - eigenvalue
    if gap <= 0.0:
        raise UnboundStateError(f"Energy {eigenvalue:.6g} is above the {axis}-channel threshold.")

    if grid is not None and scheme == "fd":
        # the stencil dispersion (4/h^2) sinh^2(kappa h / 2) along the channel
        if axis == "x":
            h, scale = grid.h_x, 1.0
        else:
            h, scale = grid.h_y, problem.beta**2
        kappa = 2.0 / h * asinh(0.5 * h * sqrt(scale * gap))
        return (1.0 if axis == "x" else problem.beta) / kappa
    return 1.0 / sqrt(gap)


__all__ = ["DecayFit", "DecayLengths", "decay_length", "decay_lengths", "channel_decay_length"]

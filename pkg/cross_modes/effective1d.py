"""
One-dimensional square-well reduction of the cross.

Notes
-----
Replacing the hard walls by a finite barrier `V0` and averaging over the lowest transverse mode of
the truncation box leaves a finite square well along x whose width is that of the narrow arm.
Classes odd in x add an infinite wall on the symmetry axis. Energies here use the
``-1/2 d^2/dx^2`` normalization.

"""

from collections import namedtuple
from math import cos, pi, sin, sqrt

import numpy as np
import pandas as pd
from scipy.optimize import bisect

from cross_modes.geometry import SymmetryClass

Prediction = namedtuple("Prediction", ["symmetric", "large_beta"])

_XTOL = 1e-12


class EffectiveWell:
    """
    Finite square well, optionally with an infinite wall at its center.

    Parameters
    ----------
    width : float
        Well width.
    depth : float
        Barrier height `Delta` outside the well.
    wall : bool, optional
        Infinite wall on the well axis, keeping only states odd about it.
    energy_offset : float, optional
        Transverse zero-point energy of the truncation box. Reported, never used for boundness.

    """

    def __init__(self, width, depth, wall=False, energy_offset=0.0):
        if not width > 0.0:
            raise ValueError(f"Well width must be positive, got {width}.")
        if not depth > 0.0:
            raise ValueError(f"Well depth must be positive, got {depth}.")
        self.width = float(width)
        self.depth = float(depth)
        self.wall = bool(wall)
        self.energy_offset = float(energy_offset)

    def __repr__(self):
        return (
            f"EffectiveWell(width={self.width:g}, depth={self.depth:g}, wall={self.wall}, "
            f"energy_offset={self.energy_offset:g})"
        )

    @property
    def strength(self):
        """Dimensionless well strength ``z0 = (width / 2) sqrt(2 depth)``."""
        return 0.5 * self.width * sqrt(2.0 * self.depth)

    def bound_states(self):
        return well_bound_states(self)


def effective_depth(V0, w_y, L_y):
    """
    Barrier height of the averaged potential outside the narrow arm.

    Parameters
    ----------
    V0 : float
        Barrier height of the softened domain walls.
    w_y : float
        Wide-arm width.
    L_y : float
        Half-height of the truncation box.

    Returns
    -------
    float
        ``V0 [1 - a / L_y - sin(pi a / L_y) / pi]`` with ``a = w_y / 2``.

    """
    a = 0.5 * w_y
    if not V0 > 0.0:
        raise ValueError(f"Barrier height must be positive, got {V0}.")
    if not 0.0 < a < L_y:
        raise ValueError(f"Need 0 < w_y / 2 < L_y, got w_y = {w_y}, L_y = {L_y}.")
    t = a / L_y
    return V0 * (1.0 - t - sin(pi * t) / pi)


def transverse_mode(y, L_y, n=1):
    """Normalized box mode ``sin(n pi (y + L_y) / (2 L_y)) / sqrt(L_y)``, zero outside the box."""
    y = np.asarray(y, dtype=float)
    values = np.sin(n * pi * (y + L_y) / (2.0 * L_y)) / sqrt(L_y)
    return np.where(np.abs(y) <= L_y, values, 0.0)


def effective_potential(x, V0, w_x, w_y, L_y):
    """Averaged potential: zero across the narrow arm, `effective_depth` beside it."""
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) <= 0.5 * w_x, 0.0, effective_depth(V0, w_y, L_y))


def effective_well(sym, V0, beta, L_y):
    """
    Reduced well for a symmetry class of the cross with arm half-widths 1 and `beta`.

    Parameters
    ----------
    sym : SymmetryClass or str
        Symmetry class; odd x parity puts an infinite wall on the axis.
    V0 : float
        Barrier height.
    beta : float
        Width ratio.
    L_y : float
        Truncation half-height, larger than `beta`.

    Returns
    -------
    EffectiveWell

    """
    sym = SymmetryClass.parse(sym)
    depth = effective_depth(V0, 2.0 * beta, L_y)
    return EffectiveWell(2.0, depth, wall=not sym.x_even, energy_offset=pi**2 / (8.0 * L_y**2))


def _even_det(z, z0):
    return z * sin(z) - sqrt(max(z0**2 - z**2, 0.0)) * cos(z)


def _odd_det(z, z0):
    return z * cos(z) + sqrt(max(z0**2 - z**2, 0.0)) * sin(z)


def _roots(det, z0, start):
    roots = []
    lo = start
    while lo < z0:
        hi = min(lo + pi / 2.0, z0)
        f_lo, f_hi = det(lo, z0), det(hi, z0)
        if f_lo == 0.0:
            roots.append(lo)
        elif f_lo * f_hi <= 0.0:
            roots.append(bisect(det, lo, hi, args=(z0,), xtol=_XTOL))
        lo += pi
    return roots


def well_bound_states(well):
    """
    Bound-state energies of a square well, measured from the well bottom.

    Parameters
    ----------
    well : EffectiveWell
        Well. With ``wall=True`` only the states odd about the axis survive.

    Returns
    -------
    list of float
        Ascending energies ``z^2 / (2 a^2)`` with ``a = width / 2``; may be empty for a walled well.

    """
    z0 = well.strength
    a = 0.5 * well.width

    z = _roots(_odd_det, z0, pi / 2.0)
    if not well.wall:
        z += _roots(_even_det, z0, 0.0)
    return sorted(z_**2 / (2.0 * a**2) for z_ in z)


def qualitative_predictions():
    """
    Boundness of each class's lowest state for the symmetric cross and for very wide arms.

    Returns
    -------
    dict
        `Prediction` per `SymmetryClass`.

    """
    return {
        SymmetryClass.EVEN_EVEN: Prediction(True, True),
        SymmetryClass.ODD_ODD: Prediction(True, False),
        SymmetryClass.EVEN_ODD: Prediction(False, True),
        SymmetryClass.ODD_EVEN: Prediction(False, False),
    }


def predictions_frame():
    """Predictions as a DataFrame indexed by class label."""
    data = {sym.value: pred._asdict() for sym, pred in qualitative_predictions().items()}
    df = pd.DataFrame.from_dict(data, orient="index")
    df.index.name = "class"
    return df

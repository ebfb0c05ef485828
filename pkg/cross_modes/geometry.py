"""
Cross, T and L shaped waveguide domains.

Notes
-----
The domain is the union of the vertical strip ``|x| < 1`` and the horizontal strip ``|y| < beta``
(arm half-widths 1 and `beta`). After the rescaling ``y' = y / beta`` both arms have half-width 1
and the operator becomes ``-(d^2/dx'^2 + beta^-2 d^2/dy'^2)``. All energies use the ``-Laplacian``
normalization.

"""

from collections import namedtuple
from enum import Enum
from math import pi
from warnings import warn

import pandas as pd

NEUMANN = "neumann"
DIRICHLET = "dirichlet"

ThresholdInfo = namedtuple("ThresholdInfo", ["e_th", "class_threshold_ratio"])
BoundaryPlan = namedtuple("BoundaryPlan", ["x_axis", "y_axis", "outer"], defaults=(DIRICHLET,))


class Parity(Enum):
    EVEN = "e"
    ODD = "o"


class SymmetryClass(Enum):
    """
    Parity class of a cross eigenfunction, x parity first.

    Each class lives on a desymmetrized quadrant: even-even on the full cross, odd-even on the
    rotated T, even-odd on the T and odd-odd on the L.

    """

    EVEN_EVEN = "ee"
    ODD_EVEN = "oe"
    EVEN_ODD = "eo"
    ODD_ODD = "oo"

    @classmethod
    def parse(cls, value):
        """Build from a class, a two-letter label (``"eo"``) or a member name."""
        if isinstance(value, cls):
            return value
        value = str(value).strip()
        try:
            return cls(value.lower())
        except ValueError:
            try:
                return cls[value.upper()]
            except KeyError:
                raise ValueError(f"Unknown symmetry class {value!r}.") from None

    parity_x = property(lambda self: Parity(self.value[0]))
    parity_y = property(lambda self: Parity(self.value[1]))
    x_even = property(lambda self: self.parity_x is Parity.EVEN)
    y_even = property(lambda self: self.parity_y is Parity.EVEN)

    @property
    def region(self):
        return {"ee": "cross", "oe": "rotated T", "eo": "T", "oo": "L"}[self.value]

    def swapped(self):
        """Class seen after exchanging the x and y axes."""
        return SymmetryClass(self.value[::-1])

    def __str__(self):
        return self.value


class CrossProblem:
    """
    Bound-state problem on an asymmetric cross.

    Parameters
    ----------
    beta : float
        Width ratio ``w_y / w_x``, at least 1.
    sym : SymmetryClass or str, optional
        Symmetry class.
    L_x : float, optional
        Truncation half-length along x, in arm half-widths.
    L_y : float, optional
        Truncation half-length along the rescaled y axis. Defaults to `L_x`.

    """

    param_names = ("beta", "sym", "L_x", "L_y")

    def __init__(self, beta, sym=SymmetryClass.EVEN_EVEN, L_x=20.0, L_y=None):
        self.beta = _check_beta(beta)
        self.sym = SymmetryClass.parse(sym)
        self.L_x = float(L_x)
        self.L_y = self.L_x if L_y is None else float(L_y)
        if self.L_x < 1.0 or self.L_y < 1.0:
            raise ValueError("Truncation half-lengths must contain the junction (L >= 1).")

    @classmethod
    def normalize(cls, beta, sym=SymmetryClass.EVEN_EVEN, L_x=20.0, L_y=None):
        """
        Build a problem, rotating the cross when `beta` is below 1.

        A cross with ``beta < 1`` is the same physical domain turned by 90 degrees, so the axes
        are exchanged: ``beta -> 1 / beta``, even-odd <-> odd-even and ``L_x <-> L_y``.

        """
        beta = float(beta)
        sym = SymmetryClass.parse(sym)
        if L_y is None:
            L_y = L_x
        if 0.0 < beta < 1.0:
            warn(
                f"beta = {beta:g} < 1: exchanging axes, solving beta = {1 / beta:g}, "
                f"class {sym.swapped()} instead of {sym}."
            )
            beta, sym, L_x, L_y = 1.0 / beta, sym.swapped(), L_y, L_x
        return cls(beta, sym, L_x, L_y)

    def __repr__(self):
        return (
            f"CrossProblem(beta={self.beta:g}, sym={self.sym.value!r}, "
            f"L_x={self.L_x:g}, L_y={self.L_y:g})"
        )

    def __eq__(self, other):
        if isinstance(other, CrossProblem):
            return self.params == other.params
        else:
            return NotImplemented

    def __hash__(self):
        return hash(tuple(self.params.values()))

    @property
    def params(self):
        return {name: getattr(self, name) for name in self.param_names}

    @property
    def e_th(self):
        return continuum_threshold(self)

    def to_series(self, **kwargs):
        params = self.params | {"sym": self.sym.value, "e_th": self.e_th}
        return pd.Series(params, **kwargs)

    def summary(self):
        str_ = f"{self.__class__.__name__} ({self.sym.region})"
        str_ += "\n" + self.to_series(name="value").to_markdown(tablefmt="github", floatfmt=".6g")
        return str_


def _check_beta(beta):
    beta = float(getattr(beta, "beta", beta))
    if not beta >= 1.0:
        raise ValueError(f"Width ratio must satisfy beta >= 1, got {beta}.")
    return beta


def continuum_threshold(problem):
    """
    First continuum threshold, the transverse ground energy of the wide arm.

    Parameters
    ----------
    problem : CrossProblem or float
        Problem, or the width ratio directly.

    Returns
    -------
    float
        ``(pi / (2 beta))**2``.

    """
    beta = _check_beta(problem)
    return (pi / (2.0 * beta)) ** 2


def arm_thresholds(beta):
    """
    Transverse ground energies of both arms for both parities, in ``-Laplacian`` units.

    The horizontal arm (half-width `beta`) sets the threshold for the y parity, the vertical arm
    (half-width 1) for the x parity; odd parity needs the second transverse mode.

    Returns
    -------
    dict
        Keys ``("horizontal", Parity)`` and ``("vertical", Parity)``.

    """
    beta = _check_beta(beta)
    out = {}
    for parity, n in ((Parity.EVEN, 1), (Parity.ODD, 2)):
        out["horizontal", parity] = (n * pi / (2.0 * beta)) ** 2
        out["vertical", parity] = (n * pi / 2.0) ** 2
    return out


def class_threshold_ratio(sym, beta):
    """
    Class continuum threshold as a multiple of `continuum_threshold`.

    Parameters
    ----------
    sym : SymmetryClass or str
        Symmetry class.
    beta : float
        Width ratio, at least 1.

    Returns
    -------
    float
        1 for even-even and odd-even, 4 for odd-odd and ``min(beta**2, 4)`` for even-odd.

    """
    sym = SymmetryClass.parse(sym)
    beta = _check_beta(beta)
    if sym is SymmetryClass.EVEN_ODD:
        return min(beta**2, 4.0)
    return 4.0 if sym is SymmetryClass.ODD_ODD else 1.0


def threshold_info(problem):
    return ThresholdInfo(continuum_threshold(problem), class_threshold_ratio(problem.sym, problem))


def is_bound(e_ratio, sym, beta, tol=0.0):
    """Whether an energy ratio lies below the class threshold by more than `tol`."""
    return e_ratio < class_threshold_ratio(sym, beta) - tol


def desymmetrize(sym):
    """
    Boundary conditions on the quadrant for a symmetry class.

    Even parity about an axis gives a zero normal derivative there, odd parity a zero value. The
    outer cuts at ``x = L_x`` and ``y = L_y`` are always Dirichlet.

    Returns
    -------
    BoundaryPlan

    """
    sym = SymmetryClass.parse(sym)
    x_axis = NEUMANN if sym.x_even else DIRICHLET
    y_axis = NEUMANN if sym.y_even else DIRICHLET
    return BoundaryPlan(x_axis, y_axis)


def cut_position(sym, axis):
    """
    Rescaled transverse position of the default cut along an arm.

    The cut runs along `axis` on the symmetry line, or at 1/3 of the arm half-width when the class
    is odd across the arm and vanishes on that line.

    """
    sym = SymmetryClass.parse(sym)
    even = sym.y_even if axis == "x" else sym.x_even
    return 0.0 if even else 1.0 / 3.0

"""Grid policies mapping width ratios to truncation lengths and interval counts."""

import re
from abc import ABC, abstractmethod
from collections import namedtuple
from math import ceil

from cross_modes.geometry import SymmetryClass
from cross_modes.reference import SETS

GridSet = namedtuple("GridSet", ["label", "L", "N"])


class Base(ABC):
    """Base class for grid policies."""

    @abstractmethod
    def __call__(self, beta):
        """
        Select a grid.

        Parameters
        ----------
        beta : float
            Width ratio.

        Returns
        -------
        GridSet

        """
        raise NotImplementedError

    def __repr__(self):
        return f"{self.__class__.__name__}()"

    def summary(self):
        return f"Grid policy: {self!r}"


class Fixed(Base):
    """
    Same grid for every width ratio.

    Parameters
    ----------
    L : float
        Truncation half-length.
    N : int
        Interval count.
    label : str, optional
        Set label reported in records.

    """

    def __init__(self, L, N, label=None):
        self.L = float(L)
        self.N = int(N)
        self.label = label

    @classmethod
    def from_set(cls, label):
        L, N = SETS[label]
        return cls(L, N, label)

    def __repr__(self):
        return f"Fixed(L={self.L:g}, N={self.N}, label={self.label!r})"

    def __call__(self, beta):
        return GridSet(self.label, self.L, self.N)


class PublishedSets(Base):
    """
    Published set choice: wider horizontal arms get longer boxes.

    Even-even states use set I below ``beta = 1.45``, set II below 2.15 and set III beyond;
    other classes always use set III.

    """

    breaks = ((1.45, "I"), (2.15, "II"))

    def __init__(self, sym=SymmetryClass.EVEN_EVEN):
        self.sym = SymmetryClass.parse(sym)

    def __repr__(self):
        return f"PublishedSets(sym={self.sym.value!r})"

    def __call__(self, beta):
        label = "III"
        if self.sym is SymmetryClass.EVEN_EVEN:
            for beta_max, label_ in self.breaks:
                if beta < beta_max:
                    label = label_
                    break
        L, N = SETS[label]
        return GridSet(label, L, N)


class Scaled(Base):
    """
    Truncation length growing as ``beta**exponent`` at fixed spacing.

    Parameters
    ----------
    L0 : float
        Half-length at ``beta = 1``.
    steps : int
        Grid steps per arm half-width, ``1 / h``.
    exponent : float, optional
        Growth exponent of the longitudinal decay length.
    L_max : float, optional
        Cap on the half-length.

    """

    def __init__(self, L0=20, steps=15, exponent=3.0, L_max=200):
        self.L0 = L0
        self.steps = int(steps)
        self.exponent = exponent
        self.L_max = L_max

    def __repr__(self):
        return (
            f"Scaled(L0={self.L0:g}, steps={self.steps}, exponent={self.exponent:g}, "
            f"L_max={self.L_max:g})"
        )

    def __call__(self, beta):
        L = min(ceil(self.L0 * beta**self.exponent), ceil(self.L_max))
        return GridSet(f"L{L}", float(L), 2 * L * self.steps)


def from_string(spec, sym=SymmetryClass.EVEN_EVEN):
    """
    Build a policy from a set label, ``"published"``, ``"scaled"`` or ``"L=<L>,N=<N>"``.

    Examples
    --------
    >>> from_string("II")
    Fixed(L=40, N=800, label='II')

    """
    spec = spec.strip()
    if spec in SETS:
        return Fixed.from_set(spec)
    elif spec.lower() == "published":
        return PublishedSets(sym)
    elif spec.lower() == "scaled":
        return Scaled()
    match = re.fullmatch(r"L\s*=\s*([0-9.]+)\s*,\s*N\s*=\s*(\d+)", spec)
    if match is None:
        raise ValueError(f"Unknown grid policy {spec!r}.")
    return Fixed(float(match.group(1)), int(match.group(2)))

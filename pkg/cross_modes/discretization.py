"""
Uniform grids and sparse operators on the rescaled cross.

Notes
-----
Nodes sit at ``x_k = k h_x`` and ``y'_j = j h_y`` with ``|k| < N_x / 2`` and ``|j| < N_y / 2``; the
outer cut ``|k| = N_x / 2`` is a Dirichlet boundary. Arm walls sit on the grid lines
``|k| = m_x = 1 / h_x`` and ``|j| = m_y = 1 / h_y``.

Two schemes are available. ``"fd"`` is the 5-point stencil of nodal tent collocation; a Neumann
symmetry axis is folded in by ghost reflection and then symmetrized by the node weights, which
scales the coupling across the axis by ``sqrt(2)``. ``"galerkin"`` is Rayleigh-Ritz over bilinear
tent products and yields the generalized problem ``K v = lambda M v``.

"""

import logging
from math import cos, isclose, pi, sin, sqrt

import numpy as np
import pandas as pd
from scipy import sparse

from cross_modes.base import InvalidGridError
from cross_modes.geometry import SymmetryClass

logger = logging.getLogger(__name__)

SCHEMES = ("fd", "galerkin")
DOMAINS = ("cross", "box")

_SQRT2 = sqrt(2.0)


def _steps_per_unit(N, L):
    m = N / (2.0 * L)
    m_int = round(m)
    if m_int < 1 or not isclose(m, m_int, rel_tol=0.0, abs_tol=1e-9):
        raise InvalidGridError(
            f"N = {N}, L = {L:g} gives 1/h = {m:g}; arm walls must lie on grid lines."
        )
    return m_int


class Grid:
    """
    Uniform grid over the truncated, rescaled cross.

    Parameters
    ----------
    N_x, N_y : int
        Even interval counts per axis; each axis carries ``N - 1`` nodes.
    L_x, L_y : float
        Truncation half-lengths.

    """

    def __init__(self, N_x, N_y, L_x, L_y):
        for N in (N_x, N_y):
            if int(N) != N or N < 4 or N % 2:
                raise InvalidGridError(f"Interval counts must be even integers >= 4, got {N}.")
        self.N_x, self.N_y = int(N_x), int(N_y)
        self.L_x, self.L_y = float(L_x), float(L_y)
        self.m_x = _steps_per_unit(self.N_x, self.L_x)
        self.m_y = _steps_per_unit(self.N_y, self.L_y)

    h_x = property(lambda self: 2.0 * self.L_x / self.N_x)
    h_y = property(lambda self: 2.0 * self.L_y / self.N_y)
    n_x = property(lambda self: self.N_x // 2)
    n_y = property(lambda self: self.N_y // 2)

    @property
    def x(self):
        """Node abscissae, ``k = -N_x/2 + 1 ... N_x/2 - 1``."""
        return np.arange(-self.n_x + 1, self.n_x) * self.h_x

    @property
    def y(self):
        return np.arange(-self.n_y + 1, self.n_y) * self.h_y

    def __repr__(self):
        return f"Grid(N_x={self.N_x}, N_y={self.N_y}, L_x={self.L_x:g}, L_y={self.L_y:g})"

    def __eq__(self, other):
        if isinstance(other, Grid):
            return (self.N_x, self.N_y, self.L_x, self.L_y) == (
                other.N_x,
                other.N_y,
                other.L_x,
                other.L_y,
            )
        else:
            return NotImplemented


def build_grid(problem, N_x, N_y=None):
    """
    Build the grid for a problem.

    Parameters
    ----------
    problem : CrossProblem
        Supplies the truncation half-lengths.
    N_x : int
        Interval count along x.
    N_y : int, optional
        Interval count along y. Defaults to the count giving the same spacing as x.

    Returns
    -------
    Grid

    Raises
    ------
    InvalidGridError
        If `N` is odd or ``1/h`` is not an integer on either axis.

    """
    if N_y is None:
        N_y = N_x * problem.L_y / problem.L_x
        if not isclose(N_y, round(N_y), abs_tol=1e-9):
            raise InvalidGridError(f"No integer N_y matches the x spacing for {problem}.")
        N_y = round(N_y)
    return Grid(N_x, N_y, problem.L_x, problem.L_y)


class InteriorIndexMap:
    """
    Bijection between unknown grid nodes and matrix rows.

    Nodes are ordered lexicographically in ``(y, x)``: ``j`` is the slow index.

    Parameters
    ----------
    i, j : numpy.ndarray
        Integer node coordinates of each row.
    i_min, j_min : int
        Smallest admissible coordinates, used to offset `lookup`.
    shape : tuple of int
        Extent ``(n_j, n_i)`` of the lookup table.
    neumann_x, neumann_y : bool
        Whether the ``i = 0`` and ``j = 0`` lines are reflecting symmetry axes.

    """

    def __init__(self, i, j, i_min, j_min, shape, neumann_x=False, neumann_y=False):
        self.i = np.asarray(i, dtype=int)
        self.j = np.asarray(j, dtype=int)
        self.i_min, self.j_min = i_min, j_min
        self.neumann_x, self.neumann_y = neumann_x, neumann_y

        self.lookup = np.full(shape, -1, dtype=int)
        self.lookup[self.j - j_min, self.i - i_min] = np.arange(self.i.size)

    def __len__(self):
        return self.i.size

    @classmethod
    def build(cls, grid, sym=SymmetryClass.EVEN_EVEN, full=False, domain="cross"):
        """
        Map the unknown nodes of a grid.

        Parameters
        ----------
        grid : Grid
            Node grid.
        sym : SymmetryClass or str, optional
            Parity class; selects the quadrant boundary conditions unless `full`.
        full : bool, optional
            Map all four quadrants, with no symmetry reduction.
        domain : {"cross", "box"}, optional
            Restrict to the union of the two strips, or keep the whole rectangle.

        Returns
        -------
        InteriorIndexMap

        """
        if domain not in DOMAINS:
            raise ValueError(f"Domain must be one of {DOMAINS}.")
        sym = SymmetryClass.parse(sym)

        if full:
            i_min, j_min = -grid.n_x + 1, -grid.n_y + 1
            neumann_x = neumann_y = False
        else:
            neumann_x, neumann_y = sym.x_even, sym.y_even
            i_min, j_min = int(not neumann_x), int(not neumann_y)

        i_range = np.arange(i_min, grid.n_x)
        j_range = np.arange(j_min, grid.n_y)
        jj, ii = np.meshgrid(j_range, i_range, indexing="ij")
        if domain == "cross":
            mask = (np.abs(ii) < grid.m_x) | (np.abs(jj) < grid.m_y)
        else:
            mask = np.ones_like(ii, dtype=bool)

        # row-major over (j, i) gives the (y, x) lexicographic order
        i, j = ii[mask], jj[mask]
        shape = (grid.n_y - j_min, grid.n_x - i_min)
        return cls(i, j, i_min, j_min, shape, neumann_x, neumann_y)

    def index(self, i, j):
        """Row of node ``(i, j)``, -1 when the node is not an unknown."""
        i, j = np.asarray(i), np.asarray(j)
        li, lj = i - self.i_min, j - self.j_min
        n_j, n_i = self.lookup.shape
        valid = (li >= 0) & (li < n_i) & (lj >= 0) & (lj < n_j)
        out = np.full(np.broadcast(i, j).shape, -1, dtype=int)
        out[valid] = self.lookup[lj[valid], li[valid]]
        return out

    @property
    def on_x_axis(self):
        """Nodes on a reflecting ``x = 0`` axis."""
        return (self.i == 0) & self.neumann_x

    @property
    def on_y_axis(self):
        return (self.j == 0) & self.neumann_y

    @property
    def weights(self):
        """Quadrature weight of each node, halved per reflecting axis the node lies on."""
        return 0.5 ** (self.on_x_axis.astype(int) + self.on_y_axis.astype(int))


class OperatorMatrix:
    """
    Assembled cross operator.

    Parameters
    ----------
    matrix : scipy.sparse.csr_matrix
        Symmetric stiffness (or finite-difference) matrix.
    index_map : InteriorIndexMap
        Row-to-node map.
    grid : Grid
        Node grid.
    problem : CrossProblem
        Problem the operator was built for.
    scheme : str
        Assembly scheme.
    mass : scipy.sparse.csr_matrix, optional
        Mass matrix of a generalized problem; `None` for the identity.

    """

    def __init__(self, matrix, index_map, grid, problem, scheme="fd", mass=None):
        self.matrix = matrix
        self.index_map = index_map
        self.grid = grid
        self.problem = problem
        self.scheme = scheme
        self.mass = mass

    beta = property(lambda self: self.problem.beta)
    sym = property(lambda self: self.problem.sym)
    shape = property(lambda self: self.matrix.shape)
    generalized = property(lambda self: self.mass is not None)

    def __len__(self):
        return self.matrix.shape[0]

    def __repr__(self):
        return (
            f"OperatorMatrix(n={len(self)}, scheme={self.scheme!r}, beta={self.beta:g}, "
            f"sym={self.sym.value!r})"
        )

    @property
    def weights(self):
        """Node weights ``w``; physical node values are ``v / sqrt(w)``."""
        if self.scheme == "fd":
            return self.index_map.weights
        else:
            return np.ones(len(self))

    @property
    def gershgorin_bound(self):
        """Upper bound on the spectrum of the unfolded operator."""
        c_x, c_y = 1.0 / self.grid.h_x**2, 1.0 / (self.beta * self.grid.h_y) ** 2
        if self.scheme == "fd":
            return 4.0 * (c_x + c_y)
        else:
            return 12.0 * (c_x + c_y)

    def to_series(self, **kwargs):
        data = {
            "n": len(self),
            "nnz": self.matrix.nnz,
            "scheme": self.scheme,
            "beta": self.beta,
            "sym": self.sym.value,
            "h_x": self.grid.h_x,
            "h_y": self.grid.h_y,
            "bound": self.gershgorin_bound,
        }
        return pd.Series(data, **kwargs)

    def summary(self):
        str_ = f"{self.__class__.__name__}"
        str_ += "\n" + self.to_series(name="value").to_markdown(tablefmt="github", floatfmt=".6g")
        return str_


def assemble_operator(grid, problem, scheme="fd", full=False, domain="cross"):
    """
    Assemble the sparse operator ``-(d_x^2 + beta^-2 d_y^2)`` on the unknown nodes.

    Parameters
    ----------
    grid : Grid
        Node grid, compatible with `problem`.
    problem : CrossProblem
        Width ratio and symmetry class.
    scheme : {"fd", "galerkin"}, optional
        Nodal collocation stencil or bilinear Rayleigh-Ritz.
    full : bool, optional
        Solve on the whole cross instead of the symmetry quadrant.
    domain : {"cross", "box"}, optional
        Cross-shaped domain or the full truncation rectangle.

    Returns
    -------
    OperatorMatrix

    """
    if scheme not in SCHEMES:
        raise ValueError(f"Scheme must be one of {SCHEMES}.")
    if not (isclose(grid.L_x, problem.L_x) and isclose(grid.L_y, problem.L_y)):
        raise ValueError(f"{grid} does not match {problem}.")

    index_map = InteriorIndexMap.build(grid, problem.sym, full=full, domain=domain)
    if scheme == "fd":
        matrix = _assemble_fd(index_map, grid, problem.beta)
        mass = None
    else:
        matrix, mass = _assemble_galerkin(index_map, grid, problem.beta, full, domain)

    logger.debug(f"Assembled {scheme} operator: {len(index_map)} unknowns, {matrix.nnz} nonzeros.")
    return OperatorMatrix(matrix, index_map, grid, problem, scheme, mass)


def _assemble_fd(index_map, grid, beta):
    c_x, c_y = 1.0 / grid.h_x**2, 1.0 / (beta * grid.h_y) ** 2
    n = len(index_map)
    rows, cols, vals = [np.arange(n)], [np.arange(n)], [np.full(n, 2.0 * (c_x + c_y))]

    # each edge once, from its lower endpoint
    for di, dj, coef, on_axis in (
        (1, 0, c_x, index_map.on_x_axis),
        (0, 1, c_y, index_map.on_y_axis),
    ):
        nbr = index_map.index(index_map.i + di, index_map.j + dj)
        has = nbr >= 0
        a, b = np.flatnonzero(has), nbr[has]
        coupling = np.where(on_axis[has], -_SQRT2 * coef, -coef)
        rows += [a, b]
        cols += [b, a]
        vals += [coupling, coupling]

    rows, cols, vals = map(np.concatenate, (rows, cols, vals))
    return sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))


def _element_matrices(grid, beta):
    def stiff_1d(h):
        return np.array([[1.0, -1.0], [-1.0, 1.0]]) / h

    def mass_1d(h):
        return np.array([[2.0, 1.0], [1.0, 2.0]]) * h / 6.0

    # local node order a + 2 b for offsets (a, b) in (x, y)
    k_x, m_x = stiff_1d(grid.h_x), mass_1d(grid.h_x)
    k_y, m_y = stiff_1d(grid.h_y), mass_1d(grid.h_y)
    k_e = np.kron(m_y, k_x) + np.kron(k_y, m_x) / beta**2
    m_e = np.kron(m_y, m_x)
    return k_e, m_e


def _assemble_galerkin(index_map, grid, beta, full, domain):
    n = len(index_map)
    ci_min = -grid.n_x if full or index_map.i_min < 0 else 0
    cj_min = -grid.n_y if full or index_map.j_min < 0 else 0
    ci, cj = np.meshgrid(
        np.arange(ci_min, grid.n_x), np.arange(cj_min, grid.n_y), indexing="ij"
    )
    ci, cj = ci.ravel(), cj.ravel()
    if domain == "cross":
        in_x = (ci >= -grid.m_x) & (ci <= grid.m_x - 1)
        in_y = (cj >= -grid.m_y) & (cj <= grid.m_y - 1)
        keep = in_x | in_y
        ci, cj = ci[keep], cj[keep]

    offsets = [(0, 0), (1, 0), (0, 1), (1, 1)]
    nodes = np.stack([index_map.index(ci + a, cj + b) for a, b in offsets], axis=1)
    k_e, m_e = _element_matrices(grid, beta)

    rows, cols, k_vals, m_vals = [], [], [], []
    for p in range(4):
        for q in range(4):
            valid = (nodes[:, p] >= 0) & (nodes[:, q] >= 0)
            rows.append(nodes[valid, p])
            cols.append(nodes[valid, q])
            k_vals.append(np.full(valid.sum(), k_e[p, q]))
            m_vals.append(np.full(valid.sum(), m_e[p, q]))

    rows, cols = np.concatenate(rows), np.concatenate(cols)
    stiffness = sparse.csr_matrix((np.concatenate(k_vals), (rows, cols)), shape=(n, n))
    mass = sparse.csr_matrix((np.concatenate(m_vals), (rows, cols)), shape=(n, n))
    return _symmetric(stiffness), _symmetric(mass)


def _symmetric(matrix):
    return ((matrix + matrix.T) / 2.0).tocsr()


def transverse_energy(h, n, scheme="fd"):
    """
    Discrete transverse energy of mode `n` across a unit half-width channel.

    Parameters
    ----------
    h : float
        Spacing across the channel, with ``1/h`` an integer.
    n : int
        Transverse mode number.
    scheme : {"fd", "galerkin"}
        Assembly scheme.

    Returns
    -------
    float
        ``(4/h^2) sin^2(n pi h / 4)`` for ``"fd"``; the linear-element value otherwise. Both tend
        to ``(n pi / 2)^2`` as ``h -> 0``.

    """
    theta = n * pi * h / 2.0
    if scheme == "fd":
        return 4.0 / h**2 * sin(theta / 2.0) ** 2
    elif scheme == "galerkin":
        return 6.0 / h**2 * (1.0 - cos(theta)) / (2.0 + cos(theta))
    else:
        raise ValueError(f"Scheme must be one of {SCHEMES}.")


def discrete_threshold(grid, problem, scheme="fd"):
    """
    Continuum threshold of the discretized arms for the problem's symmetry class.

    The horizontal arm contributes its lowest transverse mode of the class's y parity (scaled by
    ``beta^-2``), the vertical arm its lowest mode of the class's x parity.

    Returns
    -------
    float
        Threshold in the same units as the operator eigenvalues.

    """
    sym = problem.sym
    e_horizontal = transverse_energy(grid.h_y, 1 if sym.y_even else 2, scheme) / problem.beta**2
    e_vertical = transverse_energy(grid.h_x, 1 if sym.x_even else 2, scheme)
    return min(e_horizontal, e_vertical)


class Field:
    """
    Node values of a computed state.

    Parameters
    ----------
    values : numpy.ndarray
        Values on the node block, shape ``(len(y), len(x))``.
    x, y : numpy.ndarray
        Rescaled node coordinates of the block columns and rows.
    beta : float
        Width ratio; original coordinates are ``(x, beta * y)``.
    sym : SymmetryClass
        Parity class, used by `unfold`.
    full : bool, optional
        Whether the block already covers all four quadrants.

    """

    def __init__(self, values, x, y, beta, sym, full=False):
        self.values = np.asarray(values, dtype=float)
        self.x, self.y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        self.beta = float(beta)
        self.sym = SymmetryClass.parse(sym)
        self.full = full
        if self.values.shape != (self.y.size, self.x.size):
            raise ValueError("Field values do not match the coordinate arrays.")

    shape = property(lambda self: self.values.shape)

    def unfold(self):
        """Extend a quadrant field to the whole cross by the parities of its class."""
        if self.full:
            return self
        values = self.values
        sign_x = 1.0 if self.sym.x_even else -1.0
        sign_y = 1.0 if self.sym.y_even else -1.0
        values = np.concatenate([sign_x * values[:, :0:-1], values], axis=1)
        values = np.concatenate([sign_y * values[:0:-1], values], axis=0)
        x = np.concatenate([-self.x[:0:-1], self.x])
        y = np.concatenate([-self.y[:0:-1], self.y])
        return Field(values, x, y, self.beta, self.sym, full=True)

    def cut_x(self, y0=0.0):
        """Values along x on the line ``y' = y0``, interpolated between grid rows."""
        return self.x, _interp_lines(self.values, self.y, y0)

    def cut_y(self, x0=0.0):
        """Values along y' on the line ``x = x0``, interpolated between grid columns."""
        return self.y, _interp_lines(self.values.T, self.x, x0)

    def original_coordinates(self):
        """Node coordinates ``(x, y)`` with the y axis stretched back by `beta`."""
        return self.x, self.beta * self.y

    def argmax(self):
        """Original coordinates of the largest absolute value."""
        j, i = np.unravel_index(np.argmax(np.abs(self.values)), self.shape)
        x, y = self.original_coordinates()
        return x[i], y[j]


def _interp_lines(values, coords, c0):
    if not coords[0] <= c0 <= coords[-1]:
        raise ValueError(f"Cut position {c0} lies outside [{coords[0]}, {coords[-1]}].")
    k = np.searchsorted(coords, c0)
    if coords[k] == c0:
        return values[k].copy()
    t = (c0 - coords[k - 1]) / (coords[k] - coords[k - 1])
    return (1.0 - t) * values[k - 1] + t * values[k]


def extract_field(vector, index_map, grid, beta=1.0, sym=None, weights=None):
    """
    Scatter a solution vector onto the node grid.

    Parameters
    ----------
    vector : numpy.ndarray
        Eigenvector, one entry per mapped node.
    index_map : InteriorIndexMap
        Row-to-node map the vector was computed on.
    grid : Grid
        Node grid.
    beta : float, optional
        Width ratio, kept for coordinate conversion.
    sym : SymmetryClass, optional
        Parity class of the state.
    weights : numpy.ndarray, optional
        Node weights of the symmetrized operator; node values are ``vector / sqrt(weights)``.

    Returns
    -------
    Field
        Zero on every node that is not an unknown (walls, exterior, odd symmetry axes).

    """
    vector = np.asarray(vector, dtype=float)
    if vector.ndim != 1 or vector.size != len(index_map):
        raise ValueError(
            f"Vector of length {vector.size} does not match {len(index_map)} mapped nodes."
        )
    if weights is not None:
        vector = vector / np.sqrt(weights)
    if sym is None:
        sym = SymmetryClass.EVEN_EVEN

    full = index_map.i_min < 0
    i_lo = index_map.i_min if full else 0
    j_lo = index_map.j_min if full else 0
    i_coords = np.arange(i_lo, grid.n_x)
    j_coords = np.arange(j_lo, grid.n_y)

    values = np.zeros((j_coords.size, i_coords.size))
    values[index_map.j - j_lo, index_map.i - i_lo] = vector
    return Field(values, i_coords * grid.h_x, j_coords * grid.h_y, beta, sym, full=full)


def operator_field(vector, operator):
    """Scatter an eigenvector of an `OperatorMatrix` onto its grid."""
    return extract_field(
        vector,
        operator.index_map,
        operator.grid,
        operator.beta,
        operator.sym,
        operator.weights,
    )


def closed_form_box_eigenvalues(grid, problem, k, scheme="fd"):
    """
    Smallest `k` eigenvalues of the full rectangle with Dirichlet outer cuts.

    Parameters
    ----------
    grid : Grid
        Node grid.
    problem : CrossProblem
        Width ratio.
    k : int
        Number of eigenvalues.
    scheme : {"fd", "galerkin"}, optional
        Assembly scheme.

    Returns
    -------
    numpy.ndarray

    """

    def modes(h, L, N):
        p = np.arange(1, N)
        theta = p * pi * h / (2.0 * L)
        if scheme == "fd":
            return 4.0 / h**2 * np.sin(theta / 2.0) ** 2
        else:
            return 6.0 / h**2 * (1.0 - np.cos(theta)) / (2.0 + np.cos(theta))

    e_x = modes(grid.h_x, grid.L_x, grid.N_x)
    e_y = modes(grid.h_y, grid.L_y, grid.N_y) / problem.beta**2
    return np.sort(np.add.outer(e_y, e_x).ravel())[:k]


__all__ = [
    "Grid",
    "build_grid",
    "InteriorIndexMap",
    "OperatorMatrix",
    "assemble_operator",
    "transverse_energy",
    "discrete_threshold",
    "Field",
    "extract_field",
    "operator_field",
    "closed_form_box_eigenvalues",
]

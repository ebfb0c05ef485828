import numpy as np
import pytest
import scipy.linalg

from cross_modes.base import InvalidGridError
from cross_modes.discretization import (
    Grid,
    InteriorIndexMap,
    assemble_operator,
    build_grid,
    closed_form_box_eigenvalues,
    discrete_threshold,
    extract_field,
    operator_field,
    transverse_energy,
)
from cross_modes.geometry import CrossProblem, SymmetryClass
from cross_modes.solvers import smallest_eigenpairs

schemes = ["fd", "galerkin"]


def _dense_eigenvalues(operator):
    mass = None if operator.mass is None else operator.mass.toarray()
    return scipy.linalg.eigh(operator.matrix.toarray(), mass, eigvals_only=True)


def test_grid():
    problem = CrossProblem(1.0, L_x=20.0)
    grid = build_grid(problem, 600)
    assert grid.m_x == 15 and np.isclose(grid.h_x, 1 / 15)
    assert grid.x.size == 599 and np.isclose(grid.x[0], -20 + 1 / 15)

    grid = build_grid(CrossProblem(1.0, L_x=100.0), 1600)
    assert np.isclose(grid.h_x, 1 / 8)

    grid = build_grid(CrossProblem(1.0, L_x=20.0, L_y=40.0), 600)
    assert grid.N_y == 1200 and np.isclose(grid.h_y, grid.h_x)

    with pytest.raises(InvalidGridError):
        build_grid(problem, 602)
    with pytest.raises(InvalidGridError):
        Grid(599, 600, 20.0, 20.0)
    with pytest.raises(InvalidGridError):
        Grid(2, 2, 1.0, 1.0)


def test_index_map():
    grid = Grid(8, 8, 2.0, 2.0)
    sizes = {sym: len(InteriorIndexMap.build(grid, sym)) for sym in SymmetryClass}
    full = InteriorIndexMap.build(grid, full=True)
    assert len(full) == 33
    assert sum(sizes.values()) == len(full)

    index_map = InteriorIndexMap.build(grid, "ee")
    # every mapped node lies in one of the strips
    assert np.all((np.abs(index_map.i) < grid.m_x) | (np.abs(index_map.j) < grid.m_y))
    # (y, x) lexicographic order
    assert np.all(np.diff(index_map.j * 100 + index_map.i) > 0)
    assert index_map.index(0, 0) == 0
    assert index_map.index(3, 3) == -1
    assert np.isclose(index_map.weights[0], 0.25)


def test_single_node():
    # the odd-odd quadrant of L = 1, N = 4 has one unknown
    beta = 1.7
    problem = CrossProblem(beta, "oo", L_x=1.0)
    grid = build_grid(problem, 4)
    operator = assemble_operator(grid, problem)
    h = grid.h_x
    assert operator.shape == (1, 1)
    assert np.isclose(operator.matrix[0, 0], 2 / h**2 + 2 / (beta**2 * h**2))


@pytest.mark.parametrize("scheme", schemes)
def test_box_closed_form(scheme):
    for beta in (1.0, 1.6):
        problem = CrossProblem(beta, L_x=2.0, L_y=3.0)
        grid = build_grid(problem, 8)
        operator = assemble_operator(grid, problem, scheme=scheme, full=True, domain="box")
        values = _dense_eigenvalues(operator)[:5]
        expected = closed_form_box_eigenvalues(grid, problem, 5, scheme)
        assert np.allclose(values, expected, rtol=1e-12, atol=0.0)


@pytest.mark.parametrize("scheme", schemes)
def test_symmetric_operator(scheme):
    problem = CrossProblem(1.3, "eo", L_x=3.0)
    grid = build_grid(problem, 12)
    operator = assemble_operator(grid, problem, scheme=scheme)
    assert (operator.matrix != operator.matrix.T).nnz == 0
    if scheme == "fd":
        assert np.all(operator.matrix.getnnz(axis=1) <= 5)

    values = _dense_eigenvalues(operator)
    assert values[0] > 0.0
    assert values[-1] <= operator.gershgorin_bound * (1 + 1e-12)


@pytest.mark.parametrize("scheme", schemes)
def test_quadrants_match_full(scheme):
    """The four symmetry quadrants together carry the spectrum of the whole cross."""
    for beta in (1.0, 1.4):
        problem = CrossProblem(beta, L_x=2.0)
        grid = build_grid(problem, 8)
        full = _dense_eigenvalues(assemble_operator(grid, problem, scheme=scheme, full=True))

        parts = []
        for sym in SymmetryClass:
            problem_q = CrossProblem(beta, sym, L_x=2.0)
            parts.append(_dense_eigenvalues(assemble_operator(grid, problem_q, scheme=scheme)))
        assert np.allclose(np.sort(np.concatenate(parts)), full, rtol=1e-8, atol=0.0)


def test_rotation_degeneracy():
    """At beta = 1 the T and the rotated T are the same region."""
    grid = Grid(12, 12, 3.0, 3.0)
    eo = _dense_eigenvalues(assemble_operator(grid, CrossProblem(1.0, "eo", 3.0)))
    oe = _dense_eigenvalues(assemble_operator(grid, CrossProblem(1.0, "oe", 3.0)))
    assert np.allclose(eo, oe, rtol=1e-10)


def test_dense_oracle():
    problem = CrossProblem(1.0, L_x=2.0)
    grid = build_grid(problem, 8)
    operator = assemble_operator(grid, problem, full=True)
    solution = smallest_eigenpairs(operator, k=3, dense_limit=0)
    assert np.allclose(solution.eigenvalues, _dense_eigenvalues(operator)[:3], rtol=1e-10)


def test_domain_monotonicity():
    values = []
    for L in (2.0, 3.0, 4.0):
        problem = CrossProblem(1.0, L_x=L)
        operator = assemble_operator(build_grid(problem, int(8 * L)), problem)
        values.append(_dense_eigenvalues(operator)[0])
    assert np.all(np.diff(values) <= 1e-12)


def test_discrete_threshold():
    problem = CrossProblem(2.0, "eo", L_x=4.0)
    grid = build_grid(problem, 32)
    h = grid.h_x
    assert np.isclose(transverse_energy(h, 1), 4 / h**2 * np.sin(np.pi * h / 4) ** 2)
    expected = min(transverse_energy(h, 2) / 4, transverse_energy(h, 1))
    assert np.isclose(discrete_threshold(grid, problem), expected)
    assert discrete_threshold(grid, problem) < (np.pi / 2) ** 2
    for scheme in ("fd", "galerkin"):
        assert np.isclose(transverse_energy(1e-3, 1, scheme), (np.pi / 2) ** 2, rtol=1e-5)


def test_extract_field():
    problem = CrossProblem(2.0, "ee", L_x=4.0)
    grid = build_grid(problem, 32)
    operator = assemble_operator(grid, problem)

    field = extract_field(np.zeros(len(operator)), operator.index_map, grid)
    assert not np.any(field.values)
    with pytest.raises(ValueError):
        extract_field(np.zeros(len(operator) + 1), operator.index_map, grid)

    solution = smallest_eigenpairs(operator)
    field = operator_field(solution.eigenvectors[:, 0], operator)
    full = field.unfold()
    assert full.values.shape == (grid.N_y - 1, grid.N_x - 1)
    assert np.all(full.values >= -1e-12)
    assert np.allclose(full.argmax(), (0.0, 0.0))

    # walls and outer cuts are zero
    n = grid.m_x
    assert np.all(field.values[n:, n:] == 0.0)
    assert np.all(field.values[-1, grid.m_x :] == 0.0)


if __name__ == "__main__":
    test_grid()
    test_index_map()
    test_single_node()
    test_box_closed_form("fd")
    test_quadrants_match_full("fd")
    test_dense_oracle()

from math import cos, pi, sin, sqrt, tan

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.linalg import eigh_tridiagonal

from cross_modes.analysis import Sweep
from cross_modes.effective1d import (
    EffectiveWell,
    effective_depth,
    effective_potential,
    effective_well,
    predictions_frame,
    qualitative_predictions,
    transverse_mode,
    well_bound_states,
)
from cross_modes.geometry import SymmetryClass
from cross_modes.policies import PublishedSets

V0 = 10.0
L_y = 5.0


def test_effective_depth():
    for w_y in (2.0, 3.0, 6.0):
        a = w_y / 2
        outside, _ = quad(lambda y: transverse_mode(y, L_y) ** 2, a, L_y)
        assert np.isclose(effective_depth(V0, w_y, L_y), 2 * V0 * outside, rtol=1e-10)

    # the transverse mode is normalized on the box
    norm, _ = quad(lambda y: transverse_mode(y, L_y) ** 2, -L_y, L_y)
    assert np.isclose(norm, 1.0)

    # wider arms leave less of the mode under the barrier
    depths = [effective_depth(V0, w_y, L_y) for w_y in (2.0, 4.0, 6.0, 8.0)]
    assert np.all(np.diff(depths) < 0)

    with pytest.raises(ValueError):
        effective_depth(V0, 2 * L_y, L_y)
    with pytest.raises(ValueError):
        effective_depth(0.0, 2.0, L_y)


def test_effective_potential():
    x = np.array([-2.0, -1.0, 0.0, 0.5, 1.5])
    values = effective_potential(x, V0, 2.0, 4.0, L_y)
    depth = effective_depth(V0, 4.0, L_y)
    assert np.allclose(values, [depth, 0.0, 0.0, 0.0, depth])


def test_weak_well():
    well = EffectiveWell(2.0, 1.0)
    assert well.strength < pi / 2
    assert len(well.bound_states()) == 1

    walled = EffectiveWell(2.0, 1.0, wall=True)
    assert well_bound_states(walled) == []

    deeper = EffectiveWell(2.0, 3.0, wall=True)
    assert deeper.strength > pi / 2
    assert len(well_bound_states(deeper)) == 1


def test_transcendental_roots():
    well = EffectiveWell(2.0, 8.0)
    z0 = well.strength
    energies = well_bound_states(well)
    assert len(energies) == int(z0 // (pi / 2)) + 1
    assert np.all(np.diff(energies) > 0)
    assert all(0 < e < well.depth for e in energies)

    # a = 1, so z = sqrt(2 E); the parities alternate from the even ground state
    for p, energy in enumerate(energies):
        z = sqrt(2 * energy)
        k = sqrt(z0**2 - z**2)
        if p % 2 == 0:
            assert np.isclose(z * tan(z), k, rtol=1e-8)
        else:
            assert np.isclose(-z * cos(z) / sin(z), k, rtol=1e-8)

    walled = well_bound_states(EffectiveWell(2.0, 8.0, wall=True))
    assert np.allclose(walled, energies[1::2])


def _grid_energies(well, R=30.0, h=0.01):
    """Bound energies from a dense finite-difference Hamiltonian of the well, walls at +-R."""
    a = 0.5 * well.width
    if well.wall:
        x = h * np.arange(1, int(round(R / h)))
    else:
        x = h * np.arange(-int(round(R / h)) + 1, int(round(R / h)))
    V = np.where(np.abs(x) <= a, 0.0, well.depth)
    diagonal = 1.0 / h**2 + V
    off_diagonal = np.full(x.size - 1, -0.5 / h**2)
    return eigh_tridiagonal(
        diagonal, off_diagonal, eigvals_only=True, select="v", select_range=(-1.0, well.depth)
    )


def test_grid_diagonalization():
    for wall in (False, True):
        well = EffectiveWell(2.0, 8.0, wall=wall)
        energies = well_bound_states(well)
        grid = _grid_energies(well)
        assert grid.size == len(energies)
        assert np.allclose(grid, energies, rtol=1e-2)


def test_existence_threshold():
    # the walled well of width 2 first binds at sqrt(2 depth) = pi / 2
    depth_star = pi**2 / 8
    below = EffectiveWell(2.0, 0.7 * depth_star, wall=True)
    assert well_bound_states(below) == []
    assert _grid_energies(below, R=40.0).size == 0

    above = EffectiveWell(2.0, 1.3 * depth_star, wall=True)
    (energy,) = well_bound_states(above)
    (grid,) = _grid_energies(above, R=40.0)
    assert np.isclose(grid, energy, rtol=1e-2)


def test_deep_well_limit():
    width = 2.0
    well = EffectiveWell(width, 1e5)
    assert sqrt(2 * well.depth) * width > 50
    assert np.isclose(well_bound_states(well)[0], pi**2 / (2 * width**2), rtol=0.01)


def test_effective_well():
    well = effective_well("oo", V0, 1.5, L_y)
    assert well.wall and well.width == 2.0
    assert np.isclose(well.depth, effective_depth(V0, 3.0, L_y))
    assert np.isclose(well.energy_offset, pi**2 / (8 * L_y**2))
    assert not effective_well("eo", V0, 1.5, L_y).wall

    with pytest.raises(ValueError):
        EffectiveWell(-1.0, 1.0)


def test_predictions():
    predictions = qualitative_predictions()
    assert set(predictions) == set(SymmetryClass)
    assert predictions[SymmetryClass.EVEN_EVEN] == (True, True)
    assert predictions[SymmetryClass.ODD_ODD].symmetric
    assert not predictions[SymmetryClass.ODD_ODD].large_beta
    assert predictions[SymmetryClass.EVEN_ODD].large_beta
    assert not any(predictions[SymmetryClass.ODD_EVEN])

    df = predictions_frame()
    assert list(df.columns) == ["symmetric", "large_beta"]
    assert df.loc["eo", "large_beta"] and not df.loc["oe", "symmetric"]


@pytest.mark.slow
@pytest.mark.parametrize("sym", list(SymmetryClass))
def test_predictions_match_2d(sym):
    prediction = qualitative_predictions()[sym]
    symmetric, wide = Sweep(sym, PublishedSets(sym))([1.0, 3.0])
    assert symmetric.bound == prediction.symmetric
    assert wide.bound == prediction.large_beta


if __name__ == "__main__":
    test_effective_depth()
    test_weak_well()
    test_transcendental_roots()
    test_grid_diagonalization()
    test_existence_threshold()
    test_deep_well_limit()
    test_predictions()

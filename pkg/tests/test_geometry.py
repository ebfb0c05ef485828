from math import isclose, pi

import numpy as np
import pytest

from cross_modes.geometry import (
    DIRICHLET,
    NEUMANN,
    CrossProblem,
    SymmetryClass,
    arm_thresholds,
    class_threshold_ratio,
    continuum_threshold,
    cut_position,
    desymmetrize,
    is_bound,
    threshold_info,
)

betas = np.linspace(1.0, 5.0, 41)


def test_continuum_threshold():
    assert isclose(continuum_threshold(1.0), pi**2 / 4, rel_tol=1e-15)
    assert isclose(continuum_threshold(2.0), 0.616850275, rel_tol=1e-9)
    assert isclose(continuum_threshold(CrossProblem(3.0)), 0.274155678, rel_tol=1e-9)

    values = [continuum_threshold(beta) for beta in betas]
    assert np.all(np.diff(values) < 0)

    with pytest.raises(ValueError):
        continuum_threshold(0.9)


def test_class_threshold_ratio():
    assert class_threshold_ratio("oo", 1.1) == 4.0
    assert isclose(class_threshold_ratio("eo", 1.513), 1.513**2)
    assert class_threshold_ratio("eo", 5.0) == 4.0
    assert class_threshold_ratio(SymmetryClass.EVEN_EVEN, 2.0) == 1.0
    assert class_threshold_ratio(SymmetryClass.ODD_EVEN, 2.0) == 1.0

    eo = np.array([class_threshold_ratio("eo", beta) for beta in betas])
    assert np.all(np.diff(eo) >= 0)
    assert np.all(eo[betas >= 2.0] == 4.0)
    assert np.all(eo[betas < 2.0] < 4.0)

    # lowest open channel of the class among the two arms
    for sym in SymmetryClass:
        for beta in betas:
            arms = arm_thresholds(beta)
            e_class = min(arms["horizontal", sym.parity_y], arms["vertical", sym.parity_x])
            assert isclose(
                class_threshold_ratio(sym, beta), e_class / continuum_threshold(beta), rel_tol=1e-12
            )


def test_threshold_info():
    info = threshold_info(CrossProblem(1.5, "eo"))
    assert isclose(info.e_th, (pi / 3.0) ** 2)
    assert isclose(info.class_threshold_ratio, 2.25)
    assert is_bound(2.2, "eo", 1.5)
    assert not is_bound(2.2, "eo", 1.5, tol=0.1)


def test_desymmetrize():
    assert desymmetrize("ee") == (NEUMANN, NEUMANN, DIRICHLET)
    assert desymmetrize("oo") == (DIRICHLET, DIRICHLET, DIRICHLET)
    plan = desymmetrize(SymmetryClass.EVEN_ODD)
    assert plan.x_axis == NEUMANN and plan.y_axis == DIRICHLET


def test_symmetry_class():
    assert SymmetryClass.parse("EO") is SymmetryClass.EVEN_ODD
    assert SymmetryClass.parse("odd_even") is SymmetryClass.ODD_EVEN
    assert SymmetryClass.EVEN_ODD.swapped() is SymmetryClass.ODD_EVEN
    assert SymmetryClass.ODD_ODD.region == "L"
    assert str(SymmetryClass.EVEN_EVEN) == "ee"
    with pytest.raises(ValueError):
        SymmetryClass.parse("xy")

    assert cut_position("ee", "x") == 0.0
    assert isclose(cut_position("eo", "x"), 1 / 3)
    assert cut_position("eo", "y") == 0.0


def test_problem():
    with pytest.raises(ValueError):
        CrossProblem(0.5)
    with pytest.raises(ValueError):
        CrossProblem(1.5, L_x=0.5)

    with pytest.warns(UserWarning):
        problem = CrossProblem.normalize(0.5, "eo", L_x=20.0, L_y=40.0)
    assert problem == CrossProblem(2.0, "oe", L_x=40.0, L_y=20.0)
    assert hash(problem) == hash(CrossProblem(2.0, "oe", 40.0, 20.0))
    assert "e_th" in problem.summary()


if __name__ == "__main__":
    test_continuum_threshold()
    test_class_threshold_ratio()
    test_threshold_info()
    test_desymmetrize()
    test_symmetry_class()

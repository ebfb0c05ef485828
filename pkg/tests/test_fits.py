import numpy as np
import pytest

from cross_modes.analysis import (
    critical_beta_report,
    extrapolate_grid_sequence,
    fit_decay_curve,
    fit_energy_curve,
    fit_pole,
    grid_power_value,
    kappa_squared,
    locate_critical_beta,
    pole_value,
    power_pair_value,
)
from cross_modes.base import IllConditionedFitError, NoTransitionError, SweepRecord
from cross_modes.reference import (
    CRITICAL_BETA,
    EXTRAPOLATED_GROUND_RATIO,
    ODD_ODD_ENERGY_MAXIMUM,
    reference_records,
)
from cross_modes.geometry import SymmetryClass

Ns = np.arange(80, 881, 40)


def _records(sym, beta, e_ratio=None, ell_x=None, ell_y=None):
    n = len(beta)
    e_ratio = [None] * n if e_ratio is None else e_ratio
    ell_x = [None] * n if ell_x is None else ell_x
    ell_y = [None] * n if ell_y is None else ell_y
    return [
        SweepRecord(float(b), sym, e, x, y, True, None, None, None)
        for b, e, x, y in zip(beta, e_ratio, ell_x, ell_y)
    ]


def test_grid_extrapolation_exact():
    params = dict(a1=0.65955, a2=-3.1, a3=60.0, a4=-600.0, gamma=1.2)
    values = grid_power_value(Ns, **params)
    fit = extrapolate_grid_sequence(values, Ns)
    assert fit.model == "grid_power"
    assert np.isclose(fit.params["a1"], params["a1"], rtol=1e-6)
    assert np.isclose(fit.params["gamma"], params["gamma"], rtol=1e-6)
    assert fit.rss < 1e-20


def test_grid_extrapolation_errors():
    with pytest.raises(ValueError):
        extrapolate_grid_sequence([1.0, 0.9, 0.8], [80, 120, 160])
    with pytest.raises(IllConditionedFitError):
        extrapolate_grid_sequence(np.full(Ns.size, 0.7), Ns)


def test_power_pair_exact():
    beta = np.linspace(1.0, 1.2, 15)
    params = dict(a=-3.0, b=12.0, c=-5.0, p=1.5)
    records = _records("oo", beta, e_ratio=power_pair_value(beta, **params))
    fit = fit_energy_curve(records)
    assert np.allclose(list(fit.params.values()), list(params.values()), rtol=1e-6)
    t_star = -params["b"] / (2 * params["c"])
    assert np.isclose(fit.extremum["beta"], t_star ** (1 / params["p"]), rtol=1e-6)
    assert fit.extremum["kind"] == "maximum"


def test_pole_exact():
    beta = np.linspace(1.0, 1.2, 12)
    c, beta_p, g = 1.3, 1.25, 2.0
    y = pole_value(beta, c, beta_p**-g, g)
    fit = fit_pole(beta, y)
    assert np.isclose(fit.singularity, beta_p, rtol=1e-5)
    assert np.isclose(fit.params["c"], c, rtol=1e-5)
    assert fit.extra["side"] == "below"

    # falling data put the pole on the left
    beta = np.linspace(1.6, 2.4, 12)
    y = pole_value(beta, 0.8, 1.5**3, -3.0)
    fit = fit_pole(beta, y)
    assert np.isclose(fit.singularity, 1.5, rtol=1e-5)
    assert fit.extra["side"] == "above"


def test_threshold_method():
    beta = np.linspace(1.0, 1.1, 6)
    kappa2 = 0.4 * (1.2 - beta)
    e_ratio = [4.0 - k / (np.pi / (2 * b)) ** 2 for k, b in zip(kappa2, beta)]
    records = _records("oo", beta, e_ratio=e_ratio)
    assert np.allclose([kappa_squared("oo", b, e) for b, e in zip(beta, e_ratio)], kappa2)

    fit = locate_critical_beta("oo", records, method="threshold")
    assert np.isclose(fit.singularity, 1.2, rtol=1e-9)
    assert fit.extra["side"] == "below"


def test_no_transition():
    beta = np.linspace(1.0, 1.1, 8)
    records = _records("oo", beta, e_ratio=np.full(8, 3.8), ell_x=np.full(8, 1.5))
    with pytest.raises(NoTransitionError):
        locate_critical_beta("oo", records, method="pole")

    # the squared gap already changes sign inside the data
    e_ratio = [4.0 - 0.4 * (1.05 - b) / (np.pi / (2 * b)) ** 2 for b in beta]
    records = _records("oo", beta, e_ratio=e_ratio)
    with pytest.raises(NoTransitionError):
        locate_critical_beta("oo", records, method="threshold")
    with pytest.raises(ValueError):
        locate_critical_beta("oo", records, method="bisection")


def test_published_odd_odd():
    records = reference_records("oo")
    fit = fit_energy_curve(records)
    assert fit.extremum["kind"] == "maximum"
    assert abs(fit.extremum["beta"] - ODD_ODD_ENERGY_MAXIMUM) <= 0.01

    pole = locate_critical_beta("oo", records, method="pole")
    assert 1.116 < pole.singularity < 1.15
    assert pole.extra["axis"] == "x"


def test_published_even_odd():
    records = reference_records(SymmetryClass.EVEN_ODD)
    pole = locate_critical_beta("eo", records, method="pole")
    assert abs(pole.singularity - CRITICAL_BETA[SymmetryClass.EVEN_ODD]) <= 0.03

    # only the narrow-arm branch below beta = 2 enters the gap extrapolation
    threshold = locate_critical_beta("eo", records, method="threshold")
    assert 1.40 < threshold.singularity < 1.53
    assert threshold.extra["side"] == "above"
    assert threshold.n_data == 5

    report = critical_beta_report("eo", records)
    assert report["pole"] is not None
    assert set(report) == {"pole", "threshold", "agree", "errors"}


def test_published_even_even():
    records = reference_records("ee")
    fit = fit_energy_curve(records, exponent_bounds=(-12.0, -0.2), extremum=False)
    assert 0.99 <= fit.params["a"] <= 1.02
    assert fit.params["a"] > EXTRAPOLATED_GROUND_RATIO


def test_decay_curve():
    beta = np.linspace(1.0, 3.0, 12)
    records = _records("ee", beta, ell_y=0.7 + 0.5 * beta**-2.0)
    fit = fit_decay_curve(records, axis="y", model="power_offset")
    assert np.allclose([fit.params[k] for k in ("a", "b", "g")], [0.7, 0.5, -2.0], rtol=1e-6)


if __name__ == "__main__":
    test_grid_extrapolation_exact()
    test_power_pair_exact()
    test_pole_exact()
    test_threshold_method()
    test_published_odd_odd()
    test_published_even_odd()

"""
Least-squares curve fits: grid extrapolation, energy curves and critical width ratios.

Notes
-----
Every model is linear in all parameters but one exponent (two for the pole model). The linear
coefficients are eliminated for each trial exponent, the exponent is scanned and refined on the
reduced residual, and a final joint Gauss-Newton polish runs from the best start.

"""

import logging
from math import isfinite, log
from warnings import warn

import numpy as np
from scipy.optimize import least_squares, minimize_scalar
from scipy.stats import linregress

from cross_modes.base import FitResult, IllConditionedFitError, NoTransitionError
from cross_modes.geometry import SymmetryClass, class_threshold_ratio, continuum_threshold
from cross_modes.reference import CRITICAL_AXIS

logger = logging.getLogger(__name__)

MODELS = ("grid_power", "power_pair", "power_offset", "pole")
MAX_COND = 1e10

_N_SCAN = 60
_N_BASINS = 3
_EXPONENT_BOUNDS = {
    "grid_power": ((0.3, 4.0),),
    "power_pair": ((-12.0, -0.2), (0.2, 12.0)),
    "power_offset": ((-15.0, -0.2), (0.2, 15.0)),
}
_ORDERS = {"grid_power": 4, "power_pair": 3, "power_offset": 2}
_POLE_OFFSETS = np.geomspace(1e-3, 0.5, 8)
_POLE_EXPONENTS = np.array([0.05, 0.2, 0.5, 1.0, 2.0])


def _series_basis(x, theta, order):
    """Columns ``x**(k theta)`` for ``k = 0 ... order - 1``."""
    return np.column_stack([x ** (k * theta) for k in range(order)])


def _series_value(x, coef, theta):
    return _series_basis(x, theta, len(coef)) @ coef


def _linear_solve(design, y, w):
    coef, *_ = np.linalg.lstsq(design * w[:, None], y * w, rcond=None)
    r = (design @ coef - y) * w
    return coef, float(r @ r)


def _check_jacobian(jac, name):
    jac = np.asarray(jac, dtype=float)
    if not np.all(np.isfinite(jac)):
        raise IllConditionedFitError(f"{name} fit has a non-finite Jacobian.")
    norms = np.linalg.norm(jac, axis=0)
    if norms.min() <= 1e-12 * norms.max():
        raise IllConditionedFitError(f"{name} fit has an unidentifiable parameter.")
    cond = np.linalg.cond(jac / norms)
    if not cond <= MAX_COND:
        raise IllConditionedFitError(f"{name} fit Jacobian condition number {cond:.2e}.")
    return cond


def _covariance(jac, rss, n_data):
    n_par = jac.shape[1]
    if n_data <= n_par:
        return np.full((n_par, n_par), np.nan)
    s2 = rss / (n_data - n_par)
    return s2 * np.linalg.inv(jac.T @ jac)


def _fit_series(x, y, order, exponent_bounds, w, name):
    """Fit ``sum_k c_k x**(k theta)``; return coefficients, exponent, rss, jacobian."""

    def reduced(theta):
        return _linear_solve(_series_basis(x, theta, order), y, w)[1]

    best = None
    for lo, hi in exponent_bounds:
        grid = np.linspace(lo, hi, _N_SCAN)
        rss = np.array([reduced(theta) for theta in grid])
        padded = np.concatenate([[np.inf], np.nan_to_num(rss, nan=np.inf), [np.inf]])
        minima = np.flatnonzero((padded[1:-1] <= padded[:-2]) & (padded[1:-1] <= padded[2:]))
        # refine the deepest basins of the scan
        for i in minima[np.argsort(rss[minima])][:_N_BASINS]:
            bracket = (grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)])
            res = minimize_scalar(
                reduced, bounds=bracket, method="bounded", options={"xatol": 1e-12}
            )
            theta = res.x if res.fun <= rss[i] else grid[i]
            rss_theta = min(res.fun, rss[i])
            if best is None or rss_theta < best[1]:
                best = (theta, rss_theta)
    if best is None:
        raise IllConditionedFitError(f"{name} fit has no finite residual on the exponent scan.")

    theta0 = best[0]
    coef0, _ = _linear_solve(_series_basis(x, theta0, order), y, w)
    k = np.arange(order)
    log_x = np.log(x)

    def residuals(p):
        return (_series_value(x, p[:-1], p[-1]) - y) * w

    def jacobian(p):
        basis = _series_basis(x, p[-1], order)
        d_theta = (basis * (k * log_x[:, None])) @ p[:-1]
        return np.column_stack([basis, d_theta]) * w[:, None]

    p0 = np.append(coef0, theta0)
    sol = least_squares(
        residuals, p0, jac=jacobian, method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15
    )
    p = sol.x if 2.0 * sol.cost <= _rss(residuals(p0)) else p0
    rss = _rss(residuals(p))
    jac = jacobian(p)

    if not (np.all(np.isfinite(p)) and isfinite(rss)):
        raise IllConditionedFitError(f"{name} fit produced non-finite parameters.")
    _check_jacobian(jac, name)
    return p[:-1], p[-1], rss, jac


def _rss(r):
    return float(r @ r)


def grid_power_value(N, a1, a2, a3, a4, gamma):
    """``a1 + a2 / N**gamma + a3 / N**(2 gamma) + a4 / N**(3 gamma)``."""
    inv = np.asarray(N, dtype=float) ** -gamma
    return a1 + a2 * inv + a3 * inv**2 + a4 * inv**3


def power_pair_value(beta, a, b, c, p):
    """``a + b beta**p + c beta**(2 p)``."""
    t = np.asarray(beta, dtype=float) ** p
    return a + b * t + c * t**2


def power_offset_value(beta, a, b, g):
    """``a + b beta**g``."""
    return a + b * np.asarray(beta, dtype=float) ** g


def pole_value(beta, c, a, g):
    """``c / (1 - a beta**g)``, singular at ``beta = a**(-1/g)``."""
    return c / (1.0 - a * np.asarray(beta, dtype=float) ** g)


def extrapolate_grid_sequence(values, Ns):
    """
    Extrapolate a grid-refinement sequence to ``N -> infinity``.

    Parameters
    ----------
    values : Collection of float
        Eigenvalue ratios, one per grid.
    Ns : Collection of int
        Interval counts, at least six distinct grids.

    Returns
    -------
    FitResult
        Model ``"grid_power"`` with parameters ``a1 ... a4, gamma``; `a1` is the limit.

    Raises
    ------
    IllConditionedFitError
        If the parameters are not identifiable; add grids.

    """
    values, Ns = np.asarray(values, dtype=float), np.asarray(Ns, dtype=float)
    if values.shape != Ns.shape:
        raise ValueError("Values and grid sizes must have the same length.")
    order = np.argsort(Ns)
    values, Ns = values[order], Ns[order]
    if np.unique(Ns).size < 6:
        raise ValueError("Grid extrapolation needs at least 6 distinct grids.")
    diffs = np.diff(values)
    if not (np.all(diffs <= 0) or np.all(diffs >= 0)):
        warn("Grid sequence is not monotonic; the extrapolation may be unreliable.")

    N0 = Ns[0]
    x = N0 / Ns
    coef, gamma, rss, jac = _fit_series(
        x, values, 4, _EXPONENT_BOUNDS["grid_power"], np.ones(x.size), "grid_power"
    )
    scale = N0 ** (np.arange(4) * gamma)
    cov = _covariance(jac, rss, x.size)
    stderr_coef = np.sqrt(np.abs(np.diag(cov)))
    params = dict(zip(("a1", "a2", "a3", "a4"), coef * scale)) | {"gamma": gamma}
    stderr = dict(zip(("a1", "a2", "a3", "a4"), stderr_coef[:4] * scale))
    stderr["gamma"] = stderr_coef[4]

    a1 = params["a1"]
    if np.all(diffs <= 0) and a1 >= values.min():
        warn(f"Limit {a1:.6g} is not below a decreasing sequence.")
    elif np.all(diffs >= 0) and a1 <= values.max():
        warn(f"Limit {a1:.6g} is not above an increasing sequence.")

    logger.info(f"Grid extrapolation: a1 = {a1:.6g} +/- {stderr['a1']:.2g}, gamma = {gamma:.4g}.")
    return FitResult("grid_power", params, rss, None, stderr, None, x.size, {"N0": N0})


def _records_xy(records, field, bound_only=True):
    beta, y = [], []
    for record in records:
        value = getattr(record, field)
        if value is None or (bound_only and not record.bound):
            continue
        if isfinite(value):
            beta.append(record.beta)
            y.append(value)
    order = np.argsort(beta)
    return np.asarray(beta, dtype=float)[order], np.asarray(y, dtype=float)[order]


def _fit_power_model(beta, y, model, exponent_bounds=None, weights=None, extremum=False):
    if model not in ("power_pair", "power_offset"):
        raise ValueError(f"Model must be 'power_pair' or 'power_offset', got {model!r}.")
    order = _ORDERS[model]
    n_par = order + 1
    if beta.size < 2 * n_par:
        raise ValueError(f"{model} needs at least {2 * n_par} data points, got {beta.size}.")
    if exponent_bounds is None:
        exponent_bounds = _EXPONENT_BOUNDS[model]
    elif np.ndim(exponent_bounds) == 1:
        exponent_bounds = (tuple(exponent_bounds),)
    w = np.ones(beta.size) if weights is None else np.asarray(weights, dtype=float)

    coef, theta, rss, jac = _fit_series(beta, y, order, exponent_bounds, w, model)
    cov = _covariance(jac, rss, beta.size)
    stderr_all = np.sqrt(np.abs(np.diag(cov)))
    if model == "power_pair":
        names = ("a", "b", "c", "p")
    else:
        names = ("a", "b", "g")
    params = dict(zip(names, np.append(coef, theta)))
    stderr = dict(zip(names, stderr_all))

    extremum_ = None
    if extremum and model == "power_pair":
        extremum_ = _power_pair_extremum(params, beta)
    return FitResult(model, params, rss, None, stderr, extremum_, beta.size, None)


def _power_pair_extremum(params, beta):
    a, b, c, p = (params[k] for k in ("a", "b", "c", "p"))
    if c == 0.0 or -b / (2.0 * c) <= 0.0:
        return None
    beta_star = (-b / (2.0 * c)) ** (1.0 / p)
    # second derivative at the stationary point: 2 c p**2 beta**(2p - 2) t with t = beta**p
    curvature = 2.0 * c * p**2 * beta_star ** (2.0 * p - 2.0)
    kind = "maximum" if curvature < 0 else "minimum"
    return {
        "beta": beta_star,
        "value": float(power_pair_value(beta_star, a, b, c, p)),
        "kind": kind,
        "interior": bool(beta.min() <= beta_star <= beta.max()),
    }


def fit_energy_curve(records, model="power_pair", exponent_bounds=None, extremum=True):
    """
    Fit energy ratios against the width ratio.

    Parameters
    ----------
    records : Collection of SweepRecord
        Sweep records; only bound records are used.
    model : {"power_pair", "power_offset"}, optional
        ``a + b beta**p + c beta**(2p)`` or ``a + b beta**g``.
    exponent_bounds : tuple, optional
        Search interval for the exponent, or a tuple of intervals.
    extremum : bool, optional
        Report the stationary point of a `"power_pair"` curve.

    Returns
    -------
    FitResult

    """
    beta, y = _records_xy(records, "e_ratio")
    return _fit_power_model(beta, y, model, exponent_bounds, extremum=extremum)


def fit_pole(beta, y):
    """
    Fit ``c / (1 - (beta / beta_p)**g)`` to data approaching the pole from one side.

    Data rising with `beta` put the pole to the right (``g > 0``), falling data to the left
    (``g < 0``). Residuals are relative.

    Returns
    -------
    FitResult
        Parameters ``c, a, g, beta_p`` with ``a = beta_p**(-g)``; `singularity` is `beta_p`.

    """
    beta, y = np.asarray(beta, dtype=float), np.asarray(y, dtype=float)
    if beta.size < 6:
        raise ValueError(f"Pole fit needs at least 6 data points, got {beta.size}.")
    if np.any(y <= 0):
        raise ValueError("Pole fit needs positive data.")
    w = 1.0 / y
    right = y[np.argmax(beta)] > y[np.argmin(beta)]
    b_lo, b_hi = beta.min(), beta.max()

    if right:
        starts_bp = b_hi * (1.0 + _POLE_OFFSETS)
        starts_g = _POLE_EXPONENTS
        bounds = ([-np.inf, b_hi * (1.0 + 1e-9), 1e-4], [np.inf, 10.0 * b_hi, 50.0])
    else:
        starts_bp = b_lo / (1.0 + _POLE_OFFSETS)
        starts_g = -_POLE_EXPONENTS
        bounds = ([-np.inf, 1e-3, -50.0], [np.inf, b_lo * (1.0 - 1e-9), -1e-4])

    def basis(bp, g):
        return 1.0 / (1.0 - (beta / bp) ** g)

    def residuals(p):
        return (p[0] * basis(p[1], p[2]) - y) * w

    def jacobian(p):
        c, bp, g = p
        r = (beta / bp) ** g
        phi = 1.0 / (1.0 - r)
        d_bp = -c * phi**2 * r * g / bp
        d_g = c * phi**2 * r * np.log(beta / bp)
        return np.column_stack([phi, d_bp, d_g]) * w[:, None]

    best = None
    for bp in starts_bp:
        for g in starts_g:
            c, _ = _linear_solve(basis(bp, g)[:, None], y, w)
            p0 = np.array([c[0], bp, g])
            try:
                sol = least_squares(residuals, p0, jac=jacobian, bounds=bounds, x_scale="jac")
            except ValueError:
                continue
            if np.all(np.isfinite(sol.x)) and (best is None or sol.cost < best.cost):
                best = sol
    if best is None:
        raise IllConditionedFitError("Pole fit failed from every start.")

    p = best.x
    rss = _rss(residuals(p))
    jac = jacobian(p)
    _check_jacobian(jac, "pole")
    cov = _covariance(jac, rss, beta.size)
    stderr_all = np.sqrt(np.abs(np.diag(cov)))

    c, bp, g = p
    a = bp ** (-g)
    # delta method for a = bp**(-g)
    grad_a = np.array([0.0, -g * a / bp, -a * log(bp)])
    stderr_a = float(np.sqrt(abs(grad_a @ cov @ grad_a)))
    params = {"c": c, "a": a, "g": g, "beta_p": bp}
    stderr = {"c": stderr_all[0], "a": stderr_a, "g": stderr_all[2], "beta_p": stderr_all[1]}
    extra = {"side": "below" if right else "above"}
    return FitResult("pole", params, rss, bp, stderr, None, beta.size, extra)


def fit_decay_curve(records, axis="x", model="pole", exponent_bounds=None):
    """
    Fit decay lengths against the width ratio.

    Parameters
    ----------
    records : Collection of SweepRecord
        Bound records with decay lengths.
    axis : {"x", "y"}, optional
        Which decay length to fit.
    model : {"pole", "power_offset", "power_pair"}, optional
        Singular pole form or a smooth power form.
    exponent_bounds : tuple, optional
        Exponent search interval(s) for the power forms.

    Returns
    -------
    FitResult

    """
    beta, y = _records_xy(records, f"ell_{axis}")
    if model == "pole":
        return fit_pole(beta, y)
    else:
        return _fit_power_model(beta, y, model, exponent_bounds, extremum=False)


def kappa_squared(sym, beta, e_ratio):
    """Gap ``(class ratio - E/E_TH) E_TH`` below the class threshold, ``-Laplacian`` units."""
    return (class_threshold_ratio(sym, beta) - e_ratio) * continuum_threshold(beta)


def locate_critical_beta(sym, records, method="pole", axis=None, n_tail=5):
    """
    Width ratio at which a class's bound state reaches the continuum.

    Parameters
    ----------
    sym : SymmetryClass or str
        Odd-odd or even-odd (other classes need an explicit `axis`).
    records : Collection of SweepRecord
        Bound records on one side of the transition.
    method : {"pole", "threshold"}, optional
        Pole of the decay-length fit, or linear extrapolation of the squared gap to zero using
        the `n_tail` contiguous records at the end of the range where the gap closes. Even-odd
        records at beta >= 2, where the class threshold is fixed at 4, are left out.
    axis : {"x", "y"}, optional
        Decay length used by the pole method. Defaults to x for odd-odd and y for even-odd.
    n_tail : int, optional
        Records used by the threshold method.

    Returns
    -------
    FitResult
        `singularity` holds the critical ratio; ``stderr["beta_star"]`` its uncertainty.

    Raises
    ------
    NoTransitionError
        If the records show no approach to the threshold.

    """
    sym = SymmetryClass.parse(sym)
    records = [r for r in records if r.bound and r.e_ratio is not None]
    if method == "pole":
        if axis is None:
            try:
                axis = CRITICAL_AXIS[sym]
            except KeyError:
                raise ValueError(f"Class {sym} needs an explicit decay axis.") from None
        beta, y = _records_xy(records, f"ell_{axis}")
        if beta.size < 6 or y.max() < 2.0 * y.min():
            raise NoTransitionError(f"Decay lengths along {axis} show no divergence.")
        fit = fit_pole(beta, y)
        stderr = fit.stderr | {"beta_star": fit.stderr["beta_p"]}
        extra = fit.extra | {"method": "pole", "axis": axis}
        return fit._replace(stderr=stderr, extra=extra)

    elif method == "threshold":
        if sym is SymmetryClass.EVEN_ODD:
            # beyond beta = 2 the class threshold no longer moves with the narrow arm
            records = [r for r in records if r.beta < 2.0]
        records = sorted(records, key=lambda r: r.beta)
        if len(records) < 3:
            raise NoTransitionError("Threshold extrapolation needs at least 3 bound records.")
        beta = np.array([r.beta for r in records], dtype=float)
        kappa2 = np.array([kappa_squared(sym, r.beta, r.e_ratio) for r in records])

        # contiguous records at the end of the range where the gap closes
        n = min(n_tail, beta.size)
        tail = np.arange(n) if kappa2[0] < kappa2[-1] else np.arange(beta.size - n, beta.size)
        b_t, k_t = beta[tail], kappa2[tail]
        res = linregress(b_t, k_t)
        m, b = res.slope, res.intercept
        if m == 0.0:
            raise NoTransitionError("Squared gap does not change with beta.")
        root = -b / m
        if (m < 0 and root < b_t.max()) or (m > 0 and root > b_t.min()):
            raise NoTransitionError(
                f"Squared gap extrapolates to zero at {root:.4g}, inside the data."
            )

        var_m = res.stderr**2
        var_b = res.intercept_stderr**2
        cov_mb = -b_t.mean() * var_m
        grad = np.array([b / m**2, -1.0 / m])
        cov = np.array([[var_m, cov_mb], [cov_mb, var_b]])
        stderr_root = float(np.sqrt(abs(grad @ cov @ grad)))
        rss = _rss(m * b_t + b - k_t)
        params = {"slope": m, "intercept": b}
        stderr = {"slope": res.stderr, "intercept": res.intercept_stderr, "beta_star": stderr_root}
        extra = {"method": "threshold", "side": "below" if m < 0 else "above"}
        return FitResult("threshold", params, rss, root, stderr, None, tail.size, extra)

    else:
        raise ValueError(f"Method must be 'pole' or 'threshold', got {method!r}.")


def critical_beta_report(sym, records, axis=None, n_tail=5):
    """
    Run both critical-ratio methods and compare them.

    Returns
    -------
    dict
        ``{"pole": FitResult or None, "threshold": FitResult or None, "agree": bool or None,
        "errors": dict}``. Agreement means the estimates differ by at most the combined
        standard error.

    """
    out = {"pole": None, "threshold": None, "agree": None, "errors": {}}
    for method in ("pole", "threshold"):
        try:
            out[method] = locate_critical_beta(sym, records, method, axis=axis, n_tail=n_tail)
        except (NoTransitionError, IllConditionedFitError, ValueError) as err:
            out["errors"][method] = str(err)
            logger.info(f"Critical ratio by {method} method failed: {err}")

    if out["pole"] is not None and out["threshold"] is not None:
        fits = out["pole"], out["threshold"]
        diff = abs(fits[0].singularity - fits[1].singularity)
        combined = np.hypot(*(np.nan_to_num(f.stderr["beta_star"]) for f in fits))
        out["agree"] = bool(diff <= combined)
    return out


__all__ = [
    "MODELS",
    "grid_power_value",
    "power_pair_value",
    "power_offset_value",
    "pole_value",
    "extrapolate_grid_sequence",
    "fit_energy_curve",
    "fit_pole",
    "fit_decay_curve",
    "kappa_squared",
    "locate_critical_beta",
    "critical_beta_report",
]

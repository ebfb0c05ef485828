"""Published reference values for the asymmetric cross."""

from cross_modes.base import SweepRecord
from cross_modes.geometry import SymmetryClass

# ground-state ratios of the symmetric cross from a conformal-map calculation
CCM_GROUND_RATIO = 0.659611
CCM_ODD_ODD_RATIO = 3.71648
EXTRAPOLATED_GROUND_RATIO = 0.65955
CCM_RATIOS = {
    SymmetryClass.EVEN_EVEN: CCM_GROUND_RATIO,
    SymmetryClass.ODD_ODD: CCM_ODD_ODD_RATIO,
}

CRITICAL_BETA = {SymmetryClass.ODD_ODD: 1.2279, SymmetryClass.EVEN_ODD: 1.513}
# decay length that diverges at the critical ratio
CRITICAL_AXIS = {SymmetryClass.ODD_ODD: "x", SymmetryClass.EVEN_ODD: "y"}
ODD_ODD_ENERGY_MAXIMUM = 1.12288

# label -> (L, N)
SETS = {"I": (20.0, 600), "II": (40.0, 800), "III": (100.0, 1600)}

# published curve fits, keyed by (class, quantity)
PUBLISHED_FITS = {
    ("ee", "e_ratio"): ("power_pair", {"a": 1.003, "b": -0.505, "c": 0.165, "p": -3.23725}),
    ("oo", "e_ratio"): ("power_pair", {"a": -15.61, "b": 34.88, "c": -15.56, "p": 0.9869}),
    ("eo", "e_ratio"): ("power_pair", {"a": 3.96521, "b": -10.156, "c": 11.0968, "p": -3.69462}),
    ("oo", "ell_x"): ("pole", {"c": 0.0108614, "a": 0.992232, "g": 0.0673327}),
    ("oo", "ell_y"): ("power_offset", {"a": 0.514767, "b": 0.81312, "g": -12.3632}),
    ("eo", "ell_y"): ("pole", {"c": 0.604788, "a": 2.16467, "g": -1.86384}),
}

# beta, set, E/E_TH, ell_x, ell_y
TABLE_EVEN_EVEN = [
    (1.0, "I", 0.662960, 1.098, 1.098),
    (1.1, "I", 0.723925, 1.335, 1.006),
    (1.2, "I", 0.774665, 1.613, 0.938),
    (1.3, "I", 0.816242, 1.936, 0.887),
    (1.4, "I", 0.849968, 2.309, 0.847),
    (1.5, "II", 0.879058, 2.770, 0.818),
    (1.6, "II", 0.900702, 3.267, 0.793),
    (1.7, "II", 0.918059, 3.830, 0.773),
    (1.8, "II", 0.931999, 4.463, 0.757),
    (1.9, "II", 0.943228, 5.172, 0.744),
    (2.0, "II", 0.952308, 5.960, 0.733),
    (2.1, "II", 0.959682, 6.832, 0.723),
    (2.2, "III", 0.965821, 7.959, 0.717),
    (2.3, "III", 0.970627, 9.053, 0.711),
    (2.4, "III", 0.974578, 10.252, 0.705),
    (2.5, "III", 0.977844, 11.564, 0.700),
    (2.6, "III", 0.980557, 12.992, 0.696),
    (2.7, "III", 0.982821, 14.542, 0.695),
    (2.8, "III", 0.984719, 16.219, 0.690),
    (2.9, "III", 0.986319, 18.026, 0.689),
    (3.0, "III", 0.987674, 19.965, 0.685),
]

# beta, E/E_TH, ell_x, ell_y; all on set III
TABLE_ODD_ODD = [
    (1.00, 3.72042, 1.332, 1.332),
    (1.01, 3.75611, 1.465, 1.232),
    (1.02, 3.78877, 1.623, 1.148),
    (1.03, 3.81839, 1.816, 1.076),
    (1.04, 3.84499, 2.055, 1.014),
    (1.05, 3.86855, 2.359, 0.960),
    (1.06, 3.88909, 2.760, 0.912),
    (1.07, 3.90659, 3.313, 0.870),
    (1.08, 3.92107, 4.125, 0.832),
    (1.09, 3.93252, 5.429, 0.797),
    (1.10, 3.94095, 7.875, 0.766),
    (1.11, 3.94635, 14.119, 0.739),
    (1.111, 3.94673, 15.322, 0.735),
    (1.112, 3.94707, 16.745, 0.733),
    (1.113, 3.94739, 18.456, 0.730),
    (1.114, 3.94767, 20.549, 0.728),
    (1.115, 3.94792, 23.167, 0.726),
    (1.116, 3.94815, 26.528, 0.722),
]

TABLE_EVEN_ODD = [
    (1.530, 2.33233, 0.767, 29.993),
    (1.531, 2.33526, 0.768, 28.322),
    (1.532, 2.33817, 0.769, 26.830),
    (1.533, 2.34108, 0.771, 25.490),
    (1.534, 2.34399, 0.772, 24.279),
    (1.535, 2.34689, 0.773, 23.179),
    (1.536, 2.34978, 0.774, 22.176),
    (1.537, 2.35267, 0.775, 21.258),
    (1.538, 2.35555, 0.777, 20.415),
    (1.539, 2.35843, 0.778, 19.637),
    (1.54, 2.36130, 0.779, 18.917),
    (1.55, 2.38974, 0.791, 13.879),
    (1.56, 2.41764, 0.803, 10.999),
    (1.57, 2.44502, 0.816, 9.136),
    (1.58, 2.47190, 0.828, 7.832),
    (1.59, 2.49827, 0.841, 6.869),
    (1.6, 2.52415, 0.854, 6.127),
    (1.7, 2.75775, 0.992, 3.087),
    (1.8, 2.95102, 1.148, 2.172),
    (1.9, 3.11087, 1.322, 1.734),
    (2.0, 3.24315, 1.516, 1.478),
    (2.1, 3.35274, 1.732, 1.311),
    (2.2, 3.44367, 1.971, 1.195),
    (2.3, 3.51929, 2.235, 1.109),
    (2.4, 3.58233, 2.525, 1.043),
    (2.5, 3.63503, 2.842, 0.992),
    (2.6, 3.67922, 3.189, 0.951),
    (2.7, 3.71638, 3.567, 0.917),
    (2.8, 3.74774, 3.977, 0.890),
    (2.9, 3.77430, 4.421, 0.866),
    (3.0, 3.79685, 4.902, 0.847),
    (4.0, 3.90424, 12.077, 0.747),
    (5.0, 3.93252, 24.947, 0.717),
]


def reference_records(sym):
    """
    Published table rows as sweep records.

    Parameters
    ----------
    sym : SymmetryClass or str
        Even-even, odd-odd or even-odd; no odd-even state is bound.

    Returns
    -------
    list of SweepRecord

    """
    sym = SymmetryClass.parse(sym)
    if sym is SymmetryClass.EVEN_EVEN:
        rows = TABLE_EVEN_EVEN
    elif sym is SymmetryClass.ODD_ODD:
        rows = [(beta, "III", *rest) for beta, *rest in TABLE_ODD_ODD]
    elif sym is SymmetryClass.EVEN_ODD:
        rows = [(beta, "III", *rest) for beta, *rest in TABLE_EVEN_ODD]
    else:
        return []

    records = []
    for beta, label, e_ratio, ell_x, ell_y in rows:
        L, N = SETS[label]
        records.append(
            SweepRecord(beta, sym.value, e_ratio, ell_x, ell_y, True, label, L, N)
        )
    return records


def reference_lookup(sym, beta, tol=1e-9):
    """Published record for a width ratio, or `None`."""
    for record in reference_records(sym):
        if abs(record.beta - beta) <= tol:
            return record
    return None


def published_pole(sym, axis=None):
    """
    Singular width ratio ``a**(-1/g)`` of a published pole fit of the decay lengths.

    Returns `None` if the class has no published pole fit along `axis` (default: the axis
    whose decay length diverges at the critical ratio).
    """
    sym = SymmetryClass.parse(sym)
    if axis is None:
        axis = CRITICAL_AXIS.get(sym)
    model, params = PUBLISHED_FITS.get((sym.value, f"ell_{axis}"), (None, None))
    if model != "pole":
        return None
    return params["a"] ** (-1.0 / params["g"])

__version__ = "0.1.0"

from . import analysis, discretization, effective1d, geometry, policies, reference, solvers, util

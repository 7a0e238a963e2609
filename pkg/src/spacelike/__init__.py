"""Curvature of spacelike graphs under the Euclidean and Lorentz-Minkowski metrics,
the H_R = H_L surface equation, and numerical checks of its geometric properties.
"""

from . import analysis, catalog, curvature, field, solver
from .errors import SpacelikeError
from .field import DomainMask, GridField, ScalarJet, sample
from .solver import SolverParams, solve_dirichlet

__version__ = "0.1.0"

__all__ = [
    "DomainMask",
    "GridField",
    "ScalarJet",
    "SolverParams",
    "SpacelikeError",
    "analysis",
    "catalog",
    "curvature",
    "field",
    "sample",
    "solve_dirichlet",
    "solver",
]

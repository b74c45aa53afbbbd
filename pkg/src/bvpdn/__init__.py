"""Explicit solver and bound checks for the biharmonic Dirichlet-Neumann problem in the unit disk."""

from .bounds import BoundParams, LandauResult, landau_radius
from .problems import BihPolynomial, FourierTrace, ProblemData, load_problem, manufactured_problem, polynomial
from .quadrature import QuadConfig
from .solver import eval_w, eval_w_dz, eval_w_dzbar, evaluate, jacobian

__version__ = "0.1.0"

__all__ = [
    "BihPolynomial",
    "BoundParams",
    "FourierTrace",
    "LandauResult",
    "ProblemData",
    "QuadConfig",
    "eval_w",
    "eval_w_dz",
    "eval_w_dzbar",
    "evaluate",
    "jacobian",
    "landau_radius",
    "load_problem",
    "manufactured_problem",
    "polynomial",
]

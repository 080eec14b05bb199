"""Guaranteed two-sided bounds for the quadratic Lagrange interpolation constant."""
__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AssemblyRankError,
    DegenerateTriangle,
    EmptySpectrum,
    InconsistentBounds,
    InterpConstError,
    InvalidDegree,
    MidpointNotANode,
    NoConvergence,
    NotSPD,
    SingularDofMatrix,
)
from .geometry import Triangle, make_triangle, mesh_size, uniform_refine  # noqa: E402
from .bounds import BoundsReport, ct_bounds, fm_lambda, liu_lower_bound, rayleigh_ritz_upper  # noqa: E402

__all__ = [
    "AssemblyRankError",
    "BoundsReport",
    "DegenerateTriangle",
    "EmptySpectrum",
    "InconsistentBounds",
    "InterpConstError",
    "InvalidDegree",
    "MidpointNotANode",
    "NoConvergence",
    "NotSPD",
    "SingularDofMatrix",
    "Triangle",
    "ct_bounds",
    "fm_lambda",
    "liu_lower_bound",
    "make_triangle",
    "mesh_size",
    "rayleigh_ritz_upper",
    "uniform_refine",
]

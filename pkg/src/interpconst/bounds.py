"""Two-sided bounds for the smallest eigenvalue and the interpolation constant.

``C_T = lambda^{-1/2}`` where ``lambda`` is the infimum of the quotient of
the H^2 seminorm energy over the gradient energy of the interpolation
residual.  The Fujino-Morley eigenvalue together with the projection-error
constant ``0.1893 h`` gives a guaranteed lower bound of ``lambda``;
Rayleigh-Ritz over polynomials vanishing at the vertices gives an upper
bound.  Floating-point eigenvalues are widened by their residual radius
before entering either bound.
"""
from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from . import __version__
from .assembly import assemble_pair
from .eig import solve_dense_full, solve_largest
from .errors import InconsistentBounds, InvalidDegree
from .geometry import Triangle, canonical_form, mesh_size, uniform_refine
from .polyquad import apply_pi2, monomial_gram, p2_basis, pk0_basis, poly_gradient, poly_hessian

PROJECTION_CONSTANT = 0.1893
DEFAULT_LEVEL = 6
DEFAULT_DEGREE = 6

log = logging.getLogger(__name__)


def liu_lower_bound(lambda_h: float, h: float) -> float:
    """``lambda_h / (1 + lambda_h (0.1893 h)^2)``."""
    if lambda_h <= 0 or h <= 0:
        raise ValueError("lambda_h and h must be positive")
    ch = PROJECTION_CONSTANT * h
    return lambda_h / (1.0 + lambda_h * ch * ch)


def rayleigh_ritz_matrices(t: Triangle, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact Gram matrices of the two forms over the degree-``k`` vertex-vanishing basis."""
    if k <= 2:
        raise InvalidDegree(f"Rayleigh-Ritz needs degree >= 3, got {k}")
    basis = pk0_basis(t, k)
    p2 = p2_basis(t)
    hess = [[], [], []]
    grads = [[], []]
    for phi in basis.functions:
        for store, part in zip(hess, poly_hessian(phi, t)):
            store.append(part.coeff_vector(k - 2))
        resid = (phi - apply_pi2(phi, p2)).homogenize(k)
        for store, part in zip(grads, poly_gradient(resid, t)):
            store.append(part.coeff_vector(k - 1))
    G2 = monomial_gram(k - 2, k - 2, t.area)
    G1 = monomial_gram(k - 1, k - 1, t.area)
    Hxx, Hxy, Hyy = (np.array(h) for h in hess)
    Gx, Gy = (np.array(g) for g in grads)
    A = Hxx @ G2 @ Hxx.T + 2.0 * (Hxy @ G2 @ Hxy.T) + Hyy @ G2 @ Hyy.T
    B = Gx @ G1 @ Gx.T + Gy @ G1 @ Gy.T
    return 0.5 * (A + A.T), 0.5 * (B + B.T)


@dataclass(frozen=True)
class RitzResult:
    lambda_upper: float  # widened by the residual radius
    lambda_raw: float
    residual: float


def rayleigh_ritz(t: Triangle, k: int = DEFAULT_DEGREE) -> RitzResult:
    A, B = rayleigh_ritz_matrices(t, k)
    r = solve_dense_full(B, A)
    mu, radius = float(r.eigenvalues[0]), float(r.error_bounds[0])
    if mu - radius <= 0:
        raise InconsistentBounds("Rayleigh-Ritz eigenvalue not separated from zero")
    return RitzResult(1.0 / (mu - radius), 1.0 / mu, float(r.residuals[0]))


def rayleigh_ritz_upper(t: Triangle, k: int = DEFAULT_DEGREE) -> tuple[float, float]:
    """``(lambda_upper, residual)`` from Rayleigh-Ritz over degree ``k``."""
    r = rayleigh_ritz(t, k)
    return r.lambda_upper, r.residual


@dataclass(frozen=True)
class FmResult:
    lambda_h1: float
    lambda_h1_low: float  # 1 / (eta + radius)
    h: float
    residual: float
    level: int
    n_dofs: int


def fm_lambda(t: Triangle, level: int = DEFAULT_LEVEL, tol: float = 1e-8) -> FmResult:
    """Smallest Fujino-Morley eigenvalue on the level-``level`` red refinement of ``t``."""
    m = uniform_refine(t, level)
    pair = assemble_pair(m, t)
    r = solve_largest(pair.B, pair.A, count=1, tol=tol)
    eta, radius = float(r.eigenvalues[0]), float(r.error_bounds[0])
    return FmResult(1.0 / eta, 1.0 / (eta + radius), mesh_size(m), float(r.residuals[0]), level, pair.A.shape[0])


def level_for_mesh_size(t: Triangle, h_max: float) -> int:
    """Smallest refinement level whose mesh size does not exceed ``h_max``."""
    if h_max <= 0:
        raise ValueError("h_max must be positive")
    level = max(1, math.ceil(math.log2(t.longest_edge / h_max) - 1e-12))
    return level


@dataclass(frozen=True)
class BoundsReport:
    triangle: tuple[float, float]
    level: int
    h: float
    poly_degree: int
    lambda_h1: float
    lambda_low: float
    lambda_upper: float
    c_low: float
    c_upper: float
    residual_fm: float
    residual_rr: float

    def to_dict(self) -> dict:
        d = asdict(self)
        d["triangle"] = list(self.triangle)
        d["version"] = __version__
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "BoundsReport":
        names = {f.name for f in fields(cls)}
        kw = {k: v for k, v in d.items() if k in names}
        kw["triangle"] = tuple(float(x) for x in kw["triangle"])
        return cls(**kw)

    @classmethod
    def from_json(cls, s: str) -> "BoundsReport":
        return cls.from_dict(json.loads(s))


def ct_bounds(t: Triangle, level: int = DEFAULT_LEVEL, k: int = DEFAULT_DEGREE) -> BoundsReport:
    fm = fm_lambda(t, level)
    rr = rayleigh_ritz(t, k)
    lam_low = liu_lower_bound(fm.lambda_h1_low, fm.h)
    lam_up = rr.lambda_upper
    if lam_low > lam_up * (1 + 1e-8):
        raise InconsistentBounds(f"lower bound {lam_low} exceeds upper bound {lam_up}")
    a, b, _ = canonical_form(t)
    return BoundsReport(
        triangle=(a, b),
        level=level,
        h=fm.h,
        poly_degree=k,
        lambda_h1=fm.lambda_h1,
        lambda_low=lam_low,
        lambda_upper=lam_up,
        c_low=lam_up**-0.5,
        c_upper=lam_low**-0.5,
        residual_fm=fm.residual,
        residual_rr=rr.residual,
    )


def lower_bound_sequence(t: Triangle, levels) -> list[float]:
    """Lower bounds over several levels; warns if refinement makes one worse."""
    out = []
    for level in levels:
        fm = fm_lambda(t, level)
        out.append(liu_lower_bound(fm.lambda_h1_low, fm.h))
        if len(out) > 1 and out[-1] < out[-2] - 1e-9:
            log.warning("lower bound decreased from level %d to %d: %.10g -> %.10g", level - 1, level, out[-2], out[-1])
    return out


def floor_to(x: float, decimals: int = 4) -> float:
    s = 10.0**decimals
    return math.floor(x * s) / s


def ceil_to(x: float, decimals: int = 4) -> float:
    s = 10.0**decimals
    return math.ceil(x * s) / s


def rounded(report: BoundsReport, decimals: int = 4) -> dict:
    """Outward-rounded bounds for display: lower bounds down, upper bounds up."""
    return {
        "lambda_low": floor_to(report.lambda_low, decimals),
        "lambda_upper": ceil_to(report.lambda_upper, decimals),
        "c_low": floor_to(report.c_low, decimals),
        "c_upper": ceil_to(report.c_upper, decimals),
    }

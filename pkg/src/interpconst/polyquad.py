"""Polynomials in barycentric monomial form, exact integration and Pi_2.

A :class:`BaryPoly` is a finite sum ``sum c[a,b,c] * l1**a * l2**b * l3**c``
of barycentric monomials.  Integrals over the triangle are exact, so the
Rayleigh-Ritz matrices built from these polynomials carry only rounding
error.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import InvalidDegree
from .geometry import Triangle

Exponent = tuple[int, int, int]


def integrate_bary_monomial(a: int, b: int, c: int, area: float) -> float:
    """Exact integral of ``l1**a * l2**b * l3**c`` over a triangle of the given area.

    Uses ``2 A a! b! c! / (a+b+c+2)!``, evaluated as the reciprocal of an
    integer multinomial so nothing overflows.
    """
    if min(a, b, c) < 0:
        raise ValueError("exponents must be nonnegative")
    n = a + b + c
    multinomial = math.comb(n, a) * math.comb(n - a, b)
    return 2.0 * area / ((n + 1) * (n + 2) * multinomial)


@lru_cache(maxsize=None)
def monomials(degree: int) -> tuple[Exponent, ...]:
    """Homogeneous barycentric exponents of the given total degree, in a fixed order."""
    return tuple((degree - b - c, b, c) for b in range(degree, -1, -1) for c in range(degree - b, -1, -1))


@lru_cache(maxsize=None)
def _unit_monomial_gram(d1: int, d2: int) -> np.ndarray:
    m1, m2 = monomials(d1), monomials(d2)
    g = np.empty((len(m1), len(m2)))
    for i, e in enumerate(m1):
        for j, f in enumerate(m2):
            g[i, j] = integrate_bary_monomial(e[0] + f[0], e[1] + f[1], e[2] + f[2], 1.0)
    g.setflags(write=False)
    return g


def monomial_gram(d1: int, d2: int, area: float) -> np.ndarray:
    """``G[i, j] = integral of monomials(d1)[i] * monomials(d2)[j]``."""
    return area * _unit_monomial_gram(d1, d2)


class BaryPoly:
    """Polynomial in the barycentric coordinates of some triangle.

    Keys are unique exponent triples; the represented function is not
    unique in general since ``l1 + l2 + l3 = 1``.  :meth:`homogenize`
    returns the canonical homogeneous form of a fixed degree.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Exponent, float] | None = None):
        clean: dict[Exponent, float] = {}
        for k, v in (coeffs or {}).items():
            k = tuple(int(e) for e in k)
            if len(k) != 3 or min(k) < 0:
                raise ValueError(f"bad exponent {k}")
            v = float(v)
            if not math.isfinite(v):
                raise ValueError("coefficients must be finite")
            if v != 0.0:
                clean[k] = clean.get(k, 0.0) + v
        self.coeffs = clean

    @classmethod
    def constant(cls, c: float) -> "BaryPoly":
        return cls({(0, 0, 0): c})

    @classmethod
    def linear(cls, c1: float, c2: float, c3: float) -> "BaryPoly":
        return cls({(1, 0, 0): c1, (0, 1, 0): c2, (0, 0, 1): c3})

    @classmethod
    def monomial(cls, a: int, b: int, c: int, coeff: float = 1.0) -> "BaryPoly":
        return cls({(a, b, c): coeff})

    @classmethod
    def from_vector(cls, vec: Iterable[float], degree: int) -> "BaryPoly":
        return cls(dict(zip(monomials(degree), vec)))

    @property
    def degree(self) -> int:
        return max((sum(k) for k in self.coeffs), default=0)

    def __repr__(self):
        terms = " + ".join(f"{v:g}*L{k}" for k, v in sorted(self.coeffs.items()))
        return f"BaryPoly({terms or '0'})"

    def __add__(self, other):
        if not isinstance(other, BaryPoly):
            other = BaryPoly.constant(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return BaryPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return BaryPoly({k: -v for k, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, BaryPoly) else -float(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, BaryPoly):
            s = float(other)
            return BaryPoly({k: s * v for k, v in self.coeffs.items()})
        out: dict[Exponent, float] = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = (k1[0] + k2[0], k1[1] + k2[1], k1[2] + k2[2])
                out[k] = out.get(k, 0.0) + v1 * v2
        return BaryPoly(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        out = BaryPoly.constant(1.0)
        for _ in range(n):
            out = out * self
        return out

    def __call__(self, lam) -> np.ndarray:
        return self.evaluate(lam)

    def evaluate(self, lam) -> np.ndarray:
        """Evaluate at barycentric points ``lam`` of shape ``(..., 3)``."""
        lam = np.asarray(lam, dtype=float)
        out = np.zeros(lam.shape[:-1])
        for (a, b, c), v in self.coeffs.items():
            out = out + v * lam[..., 0] ** a * lam[..., 1] ** b * lam[..., 2] ** c
        return out

    def diff_bary(self, i: int) -> "BaryPoly":
        """Formal partial derivative with respect to ``l_{i+1}``."""
        out: dict[Exponent, float] = {}
        for k, v in self.coeffs.items():
            if k[i] == 0:
                continue
            kk = list(k)
            kk[i] -= 1
            kk = tuple(kk)
            out[kk] = out.get(kk, 0.0) + v * k[i]
        return BaryPoly(out)

    def homogenize(self, degree: int | None = None) -> "BaryPoly":
        """Rewrite every term at one total degree using ``l1 + l2 + l3 = 1``."""
        d = self.degree if degree is None else degree
        if d < self.degree:
            raise ValueError("cannot homogenize below the polynomial degree")
        one = BaryPoly.linear(1.0, 1.0, 1.0)
        powers = [BaryPoly.constant(1.0)]
        out = BaryPoly()
        for k, v in self.coeffs.items():
            lift = d - sum(k)
            while len(powers) <= lift:
                powers.append(powers[-1] * one)
            out = out + BaryPoly.monomial(*k, coeff=v) * powers[lift]
        return out

    def coeff_vector(self, degree: int | None = None) -> np.ndarray:
        """Coefficients of the homogeneous form over ``monomials(degree)``."""
        h = self.homogenize(degree)
        d = self.degree if degree is None else degree
        return np.array([h.coeffs.get(e, 0.0) for e in monomials(d)])

    def integrate(self, area: float) -> float:
        return sum(v * integrate_bary_monomial(*k, area) for k, v in self.coeffs.items())

    def max_abs_coeff(self) -> float:
        return max((abs(v) for v in self.coeffs.values()), default=0.0)


def cartesian_coordinate(t: Triangle, axis: int) -> BaryPoly:
    """The function ``x`` (axis 0) or ``y`` (axis 1) on ``t`` in barycentric form."""
    v = t.vertices[:, axis]
    return BaryPoly.linear(*v)


def poly_gradient(p: BaryPoly, t: Triangle) -> tuple[BaryPoly, BaryPoly]:
    """Cartesian partial derivatives of ``p`` via the barycentric chain rule."""
    g = t.barycentric_gradients()
    parts = [p.diff_bary(i) for i in range(3)]
    dx = parts[0] * g[0, 0] + parts[1] * g[1, 0] + parts[2] * g[2, 0]
    dy = parts[0] * g[0, 1] + parts[1] * g[1, 1] + parts[2] * g[2, 1]
    return dx, dy


def poly_hessian(p: BaryPoly, t: Triangle) -> tuple[BaryPoly, BaryPoly, BaryPoly]:
    """``(p_xx, p_xy, p_yy)``."""
    px, py = poly_gradient(p, t)
    pxx, pxy = poly_gradient(px, t)
    _, pyy = poly_gradient(py, t)
    return pxx, pxy, pyy


LAGRANGE_POINTS = np.array(
    [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.0, 0.5, 0.5],
        [0.5, 0.0, 0.5],
    ]
)
LAGRANGE_LABELS = ("p1", "p2", "p3", "m12", "m23", "m31")


@dataclass(frozen=True)
class P2LagrangeBasis:
    """Quadratic Lagrange basis on ``triangle``, ordered as ``LAGRANGE_LABELS``."""

    triangle: Triangle
    functions: tuple[BaryPoly, ...]

    @property
    def points(self) -> np.ndarray:
        return LAGRANGE_POINTS

    @property
    def midpoint_functions(self) -> tuple[BaryPoly, BaryPoly, BaryPoly]:
        return self.functions[3:]


def p2_basis(t: Triangle) -> P2LagrangeBasis:
    """``l_i (2 l_i - 1)`` at the vertices and ``4 l_i l_j`` at the midpoints."""
    funcs = []
    for i in range(3):
        li = BaryPoly.monomial(*[1 if k == i else 0 for k in range(3)])
        funcs.append((li * (2.0 * li - 1.0)).homogenize(2))
    for i, j in ((0, 1), (1, 2), (2, 0)):
        e = [0, 0, 0]
        e[i] += 1
        e[j] += 1
        funcs.append(BaryPoly.monomial(*e, coeff=4.0))
    return P2LagrangeBasis(t, tuple(funcs))


def apply_pi2(p: BaryPoly, basis: P2LagrangeBasis) -> BaryPoly:
    """Quadratic interpolant of ``p`` at the six Lagrange points."""
    vals = p.evaluate(LAGRANGE_POINTS)
    out = BaryPoly()
    for v, f in zip(vals, basis.functions):
        out = out + f * float(v)
    return out.homogenize(2)


@dataclass(frozen=True)
class Pk0Basis:
    triangle: Triangle
    degree: int
    functions: tuple[BaryPoly, ...]
    exponents: tuple[Exponent, ...]

    @property
    def dim(self) -> int:
        return len(self.functions)


def pk0_basis(t: Triangle, k: int) -> Pk0Basis:
    """Basis of the degree-``k`` polynomials vanishing at the three vertices.

    Homogeneous Bernstein polynomials ``k!/(a!b!c!) l1**a l2**b l3**c`` form
    a basis of P_k; the value at vertex ``i`` is the coefficient of
    ``l_i**k``, so dropping the three pure powers leaves a basis of the
    constrained space.
    """
    if k < 2:
        raise InvalidDegree(f"degree must be >= 2, got {k}")
    exps = tuple(e for e in monomials(k) if max(e) < k)
    funcs = tuple(
        BaryPoly.monomial(*e, coeff=math.factorial(k) / (math.factorial(e[0]) * math.factorial(e[1]) * math.factorial(e[2])))
        for e in exps
    )
    return Pk0Basis(t, k, funcs, exps)


def m_form(p: BaryPoly, q: BaryPoly, t: Triangle) -> float:
    """Exact ``int D^2 p . D^2 q`` with the mixed derivative counted twice."""
    hp, hq = poly_hessian(p, t), poly_hessian(q, t)
    integrand = hp[0] * hq[0] + 2.0 * (hp[1] * hq[1]) + hp[2] * hq[2]
    return integrand.integrate(t.area)


def h1_form(p: BaryPoly, q: BaryPoly, t: Triangle) -> float:
    """Exact ``int grad p . grad q``."""
    gp, gq = poly_gradient(p, t), poly_gradient(q, t)
    return (gp[0] * gq[0] + gp[1] * gq[1]).integrate(t.area)


def n_form(p: BaryPoly, q: BaryPoly, basis: P2LagrangeBasis) -> float:
    """Exact ``int grad(p - Pi2 p) . grad(q - Pi2 q)``."""
    t = basis.triangle
    return h1_form(p - apply_pi2(p, basis), q - apply_pi2(q, basis), t)

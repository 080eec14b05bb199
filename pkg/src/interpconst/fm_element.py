"""Local Fujino-Morley (quadratic Morley) element.

Local degrees of freedom on an element with vertices ``v1, v2, v3``:
the three vertex values, then for ``k = 1, 2, 3`` the integral over the
edge opposite ``v_k`` of the outward normal derivative.  The basis is the
inverse of the DOF-evaluation matrix applied to the six barycentric
quadratic monomials ``l1^2, l2^2, l3^2, l1 l2, l2 l3, l3 l1``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import SingularDofMatrix
from .geometry import Triangle
from .polyquad import BaryPoly, poly_gradient

GAUSS_X, GAUSS_W = np.polynomial.legendre.leggauss(6)


@dataclass(frozen=True)
class FmLocalBasis:
    element: Triangle
    coef: np.ndarray  # (6 monomials, 6 basis functions)

    @property
    def functions(self) -> tuple[BaryPoly, ...]:
        return tuple(
            BaryPoly(dict(zip(_kernels.QUAD_EXPONENTS, self.coef[:, i]))) for i in range(6)
        )


@dataclass(frozen=True)
class LocalMatrices:
    m_local: np.ndarray
    g_local: np.ndarray


def fm_basis(k_elem: Triangle) -> FmLocalBasis:
    coef, _, _ = _local_batch(k_elem.vertices[None])
    return FmLocalBasis(k_elem, coef[0])


def local_matrices(k_elem: Triangle, basis: FmLocalBasis | None = None) -> LocalMatrices:
    coef, m, g = _local_batch(k_elem.vertices[None])
    if basis is not None and not np.allclose(basis.coef, coef[0], rtol=1e-12, atol=0):
        raise ValueError("basis was not built for this element")
    return LocalMatrices(m[0], g[0])


def _local_batch(verts):
    try:
        coef, m, g = _kernels.fm_local_batch(verts)
    except (ZeroDivisionError, np.linalg.LinAlgError) as exc:
        raise SingularDofMatrix("Morley DOF matrix is singular") from exc
    if not (np.all(np.isfinite(coef)) and np.all(np.isfinite(m))):
        raise SingularDofMatrix("Morley DOF matrix is singular")
    return coef, m, g


def local_batch(verts: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Basis coefficients, Hessian and gradient matrices for ``(F, 3, 2)`` elements."""
    return _local_batch(np.asarray(verts, dtype=float))


def edge_normal_integral(element: Triangle, p_grad, k: int) -> float:
    """``int_{e_k} grad(p) . n ds`` with the outward normal, by 6-point Gauss.

    ``p_grad`` maps points ``(m, 2)`` to gradients ``(m, 2)``.
    """
    v = element.vertices
    a, b = v[(k + 1) % 3], v[(k + 2) % 3]
    d = b - a
    scaled_normal = np.array([d[1], -d[0]])  # |e| n
    s = 0.5 * (GAUSS_X + 1.0)
    pts = a[None] + s[:, None] * d[None]
    vals = p_grad(pts) @ scaled_normal
    return float(0.5 * np.dot(GAUSS_W, vals))


def local_dofs(element: Triangle, p: BaryPoly, parent: Triangle | None = None) -> np.ndarray:
    """The six local DOFs of a polynomial ``p``.

    ``p`` is given in the barycentric coordinates of ``parent`` (the element
    itself when ``parent`` is None).
    """
    parent = parent or element
    px, py = poly_gradient(p, parent)

    def grad(pts):
        lam = parent.to_barycentric(pts)
        return np.stack([px.evaluate(lam), py.evaluate(lam)], axis=-1)

    vals = p.evaluate(parent.to_barycentric(element.vertices))
    edges = [edge_normal_integral(element, grad, k) for k in range(3)]
    return np.concatenate([vals, edges])


def dof_matrix(element: Triangle, basis: FmLocalBasis) -> np.ndarray:
    """``D[d, i]`` = DOF ``d`` applied to basis function ``i``."""
    return np.stack([local_dofs(element, f) for f in basis.functions], axis=1)

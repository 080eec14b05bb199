"""Global Fujino-Morley space and the matrices of the two quadratic forms.

Free DOFs are the vertex values at all mesh nodes except the three corners
of the parent triangle (constrained to zero and eliminated), followed by one
normal-derivative DOF per edge, measured with the canonical edge normal.

The interpolation-residual form is kept in factored form::

    B = S - C^T P - P^T C + P^T Q P

with ``S`` the broken gradient stiffness, ``P`` the 3 x N selection of the
parent-midpoint values, ``C[m] = int grad(phi_m) . grad(psi_j)`` for the
parent P2 midpoint functions ``phi_m`` and ``Q`` their exact gradient Gram
matrix.  Corner values vanish, so ``Pi_2 u_h = sum_m u_h(mid_m) phi_m``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import LinearOperator

from .errors import AssemblyRankError, MidpointNotANode, NotSPD
from .fm_element import GAUSS_W, GAUSS_X, local_batch
from .geometry import Mesh, Triangle
from .polyquad import BaryPoly, h1_form, p2_basis, poly_gradient

CONSTRAINED = -1


@dataclass(frozen=True, eq=False)
class DofMap:
    node_dof: np.ndarray  # (n_nodes,), CONSTRAINED at the parent corners
    edge_dof: np.ndarray  # (n_edges,)
    n_free: int
    midpoint_dofs: tuple[int, int, int]
    elem_dofs: np.ndarray  # (F, 6)
    elem_signs: np.ndarray  # (F, 6), +-1.0


def build_dof_map(m: Mesh) -> DofMap:
    node_dof = np.full(m.n_nodes, CONSTRAINED, dtype=np.int64)
    free = np.ones(m.n_nodes, dtype=bool)
    free[list(m.corner_nodes)] = False
    n_free_nodes = int(free.sum())
    node_dof[free] = np.arange(n_free_nodes)
    edge_dof = n_free_nodes + np.arange(m.n_edges, dtype=np.int64)
    elem_dofs = np.concatenate([node_dof[m.elements], edge_dof[m.elem_edges]], axis=1)
    elem_signs = np.concatenate([np.ones((m.n_elements, 3)), m.elem_signs.astype(float)], axis=1)
    mids = tuple(int(node_dof[i]) for i in m.midpoint_nodes)
    if len(set(mids)) != 3 or min(mids) < 0:
        raise MidpointNotANode("parent midpoints are not free mesh nodes")
    for arr in (node_dof, edge_dof, elem_dofs, elem_signs):
        arr.setflags(write=False)
    return DofMap(node_dof, edge_dof, n_free_nodes + m.n_edges, mids, elem_dofs, elem_signs)


@dataclass(frozen=True, eq=False)
class ElementData:
    coef: np.ndarray
    m_local: np.ndarray
    g_local: np.ndarray


def element_data(m: Mesh) -> ElementData:
    return ElementData(*local_batch(m.element_vertices()))


def _assemble_upper(local: np.ndarray, d: DofMap) -> sp.csr_matrix:
    signed = local * d.elem_signs[:, :, None] * d.elem_signs[:, None, :]
    rows = np.broadcast_to(d.elem_dofs[:, :, None], signed.shape)
    cols = np.broadcast_to(d.elem_dofs[:, None, :], signed.shape)
    keep = (rows >= 0) & (cols >= 0) & (rows <= cols)
    U = sp.coo_matrix((signed[keep], (rows[keep], cols[keep])), shape=(d.n_free, d.n_free)).tocsr()
    U.sum_duplicates()
    full = U + U.T - sp.diags(U.diagonal())
    return full.tocsr()


def is_spd(A) -> bool:
    from .eig import factorize_spd

    try:
        factorize_spd(A)
    except NotSPD:
        return False
    return True


def assemble_A(m: Mesh, d: DofMap, data: ElementData | None = None, check: bool = True) -> sp.csr_matrix:
    """Broken Hessian form ``sum_K int_K D^2 u . D^2 v`` on the free DOFs."""
    data = data or element_data(m)
    A = _assemble_upper(data.m_local, d)
    if check and not is_spd(A):
        raise AssemblyRankError("assembled A is not positive definite")
    return A


def assemble_S(m: Mesh, d: DofMap, data: ElementData | None = None) -> sp.csr_matrix:
    """Broken gradient stiffness ``sum_K int_K grad u . grad v``."""
    data = data or element_data(m)
    return _assemble_upper(data.g_local, d)


def _midpoint_function_dofs_local(m: Mesh, t: Triangle) -> np.ndarray:
    """Local (outward-normal) DOFs of the three parent P2 midpoint functions, (3, F, 6)."""
    basis = p2_basis(t)
    verts = m.element_vertices()
    out = np.empty((3, m.n_elements, 6))
    for r, phi in enumerate(basis.midpoint_functions):
        px, py = poly_gradient(phi, t)
        lam_v = t.to_barycentric(verts)
        out[r, :, :3] = phi.evaluate(lam_v)
        for k in range(3):
            a, b = verts[:, (k + 1) % 3], verts[:, (k + 2) % 3]
            mid = t.to_barycentric(0.5 * (a + b))
            grad = np.stack([px.evaluate(mid), py.evaluate(mid)], axis=-1)
            scaled_normal = np.stack([b[:, 1] - a[:, 1], -(b[:, 0] - a[:, 0])], axis=-1)
            # the normal derivative is linear along the edge: midpoint rule is exact
            out[r, :, 3 + k] = np.sum(grad * scaled_normal, axis=-1)
    return out


@dataclass(frozen=True, eq=False)
class BOperator:
    """Matrix-free ``B = S - C^T P - P^T C + P^T Q P``."""

    S: sp.csr_matrix
    C: np.ndarray  # (3, N)
    midpoint_dofs: tuple[int, int, int]
    Q: np.ndarray  # (3, 3)

    @property
    def shape(self) -> tuple[int, int]:
        return self.S.shape

    def matvec(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        idx = list(self.midpoint_dofs)
        px = x[idx]
        y = self.S @ x - self.C.T @ px
        y[idx] += self.Q @ px - self.C @ x
        return y

    def matmat(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        idx = list(self.midpoint_dofs)
        PX = X[idx]
        Y = self.S @ X - self.C.T @ PX
        Y[idx] += self.Q @ PX - self.C @ X
        return Y

    __matmul__ = matmat

    def aslinearoperator(self) -> LinearOperator:
        return LinearOperator(self.shape, matvec=self.matvec, rmatvec=self.matvec, matmat=self.matmat, dtype=float)

    def toarray(self) -> np.ndarray:
        return self.matmat(np.eye(self.shape[0]))

    def norm_estimate(self, iters: int = 30, seed: int = 0) -> float:
        """Power-iteration estimate of the spectral norm (a lower estimate)."""
        rng = np.random.default_rng(seed)
        x = rng.standard_normal(self.shape[0])
        x /= np.linalg.norm(x)
        est = 0.0
        for _ in range(iters):
            y = self.matvec(x)
            est = float(np.linalg.norm(y))
            if est == 0.0:
                return 0.0
            x = y / est
        return est


def assemble_B(m: Mesh, d: DofMap, t: Triangle, data: ElementData | None = None) -> BOperator:
    data = data or element_data(m)
    if list(t.midpoints) != [tuple(m.nodes[i]) for i in m.midpoint_nodes]:
        raise MidpointNotANode("mesh midpoint nodes do not coincide with the parent midpoints")
    S = assemble_S(m, d, data)
    loc = _midpoint_function_dofs_local(m, t)
    C = np.zeros((3, d.n_free))
    for r in range(3):
        c_elem = np.einsum("fij,fj->fi", data.g_local, loc[r]) * d.elem_signs
        mask = d.elem_dofs >= 0
        np.add.at(C[r], d.elem_dofs[mask], c_elem[mask])
    basis = p2_basis(t)
    mids = basis.midpoint_functions
    Q = np.array([[h1_form(p, q, t) for q in mids] for p in mids])
    return BOperator(S, C, d.midpoint_dofs, Q)


@dataclass(frozen=True, eq=False)
class SymPair:
    A: sp.csr_matrix
    B: BOperator
    mesh: Mesh
    dofmap: DofMap


def assemble_pair(m: Mesh, t: Triangle | None = None, check: bool = True) -> SymPair:
    t = t or m.parent
    d = build_dof_map(m)
    data = element_data(m)
    A = assemble_A(m, d, data, check=check)
    B = assemble_B(m, d, t, data)
    return SymPair(A, B, m, d)


def fm_interpolate(m: Mesh, d: DofMap, p: BaryPoly, t: Triangle | None = None) -> np.ndarray:
    """Global DOF vector of a polynomial given in the barycentric coordinates of ``t``.

    Vertex DOFs are point values; edge DOFs integrate the normal derivative
    (canonical normal) with 6-point Gauss, exact up to degree 12.
    """
    t = t or m.parent
    x = np.zeros(d.n_free)
    lam_nodes = t.to_barycentric(m.nodes)
    vals = p.evaluate(lam_nodes)
    free = d.node_dof >= 0
    x[d.node_dof[free]] = vals[free]
    px, py = poly_gradient(p, t)
    a, b = m.nodes[m.edges[:, 0]], m.nodes[m.edges[:, 1]]
    dvec = b - a
    scaled_normal = np.stack([dvec[:, 1], -dvec[:, 0]], axis=-1)
    acc = np.zeros(m.n_edges)
    for s, w in zip(0.5 * (GAUSS_X + 1.0), GAUSS_W):
        lam = t.to_barycentric(a + s * dvec)
        grad = np.stack([px.evaluate(lam), py.evaluate(lam)], axis=-1)
        acc += 0.5 * w * np.sum(grad * scaled_normal, axis=-1)
    x[d.edge_dof] = acc
    return x


def write_coo(path, matrix) -> None:
    """Dump a sparse matrix as ``row col value`` lines with 1-based indices."""
    coo = sp.coo_matrix(matrix)
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", newline="\n") as fh:
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r + 1} {c + 1} {float(v)!r}\n")

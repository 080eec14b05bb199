import numpy as np
import pytest
import scipy.sparse as sp

from interpconst.assembly import (
    assemble_A,
    assemble_B,
    assemble_pair,
    assemble_S,
    build_dof_map,
    element_data,
    fm_interpolate,
    write_coo,
)
from interpconst.eig import factorize_spd, solve_dense_full
from interpconst.errors import MidpointNotANode
from interpconst.geometry import make_triangle, uniform_refine
from interpconst.polyquad import BaryPoly, apply_pi2, h1_form, m_form, p2_basis
from oracles import quad_poly_derivs, triangle_rule

P20 = [BaryPoly.monomial(1, 1, 0), BaryPoly.monomial(0, 1, 1), BaryPoly.monomial(1, 0, 1)]


@pytest.mark.parametrize("level,n_free", [(1, 12), (2, 42), (6, 8382)])
def test_dof_counts(level, n_free):
    m = uniform_refine(make_triangle(0, 1), level)
    d = build_dof_map(m)
    assert d.n_free == (m.n_nodes - 3) + m.n_edges == n_free
    assert len(set(d.midpoint_dofs)) == 3
    assert np.sum(d.elem_dofs < 0) == 3  # each corner belongs to exactly one element


def test_A_energy_of_global_quadratics(table_triangle):
    t = table_triangle
    m = uniform_refine(t, 2)
    pair = assemble_pair(m)
    X = np.column_stack([fm_interpolate(m, pair.dofmap, q) for q in P20])
    exact = np.array([[m_form(p, q, t) for q in P20] for p in P20])
    np.testing.assert_allclose(X.T @ pair.A @ X, exact, rtol=1e-10, atol=1e-10 * np.abs(exact).max())


def test_A_spd_and_exactly_symmetric():
    m = uniform_refine(make_triangle(0.3, 0.6), 3)
    d = build_dof_map(m)
    A = assemble_A(m, d)
    assert abs(A - A.T).max() == 0
    solve = factorize_spd(A)  # raises if a pivot is not positive
    assert np.all(np.isfinite(solve(np.ones(d.n_free))))
    assert np.linalg.eigvalsh(A.toarray()).min() > 0


def test_B_annihilates_p20(table_triangle):
    m = uniform_refine(table_triangle, 3)
    pair = assemble_pair(m)
    bnorm = np.linalg.norm(pair.B.toarray(), 2)
    for q in P20:
        x = fm_interpolate(m, pair.dofmap, q)
        assert np.linalg.norm(pair.B.matvec(x)) < 1e-10 * bnorm * np.linalg.norm(x)
        assert x @ pair.B.matvec(x) <= 1e-12 * (x @ pair.A @ x)


def _b_energy_oracle(m, d, x, t):
    """sum_K int_K |grad(u_h - Pi2 u_h)|^2 by elementwise quadrature of the local polynomials."""
    data = element_data(m)
    basis = p2_basis(t)
    mids = basis.midpoint_functions
    u_mid = x[list(d.midpoint_dofs)]
    pi2 = sum((float(c) * f for c, f in zip(u_mid, mids)), BaryPoly())
    from interpconst.polyquad import poly_gradient

    pgx, pgy = poly_gradient(pi2, t)
    total = 0.0
    verts = m.element_vertices()
    for k in range(m.n_elements):
        loc = np.where(d.elem_dofs[k] >= 0, x[np.maximum(d.elem_dofs[k], 0)], 0.0) * d.elem_signs[k]
        coef = data.coef[k] @ loc
        from interpconst.geometry import Triangle

        K = Triangle(*map(tuple, verts[k]))
        pts, w, lam = triangle_rule(verts[k], 6)
        _, grad, _ = quad_poly_derivs(coef, K.barycentric_gradients(), lam)
        lam_t = t.to_barycentric(pts)
        grad = grad - np.stack([pgx.evaluate(lam_t), pgy.evaluate(lam_t)], axis=1)
        total += np.dot(w, np.sum(grad * grad, axis=1))
    return total


def test_B_energy_vs_quadrature_oracle(rng):
    t = make_triangle(0.2, 0.7)
    m = uniform_refine(t, 2)
    pair = assemble_pair(m)
    u = BaryPoly.monomial(1, 1, 1) + 0.7 * BaryPoly.monomial(1, 1, 0) - 0.3 * BaryPoly.monomial(0, 1, 1)
    for x in (fm_interpolate(m, pair.dofmap, u), rng.standard_normal(pair.dofmap.n_free)):
        ref = _b_energy_oracle(m, pair.dofmap, x, t)
        assert x @ pair.B.matvec(x) == pytest.approx(ref, rel=1e-10)


def test_B_psd_random_vectors(rng):
    m = uniform_refine(make_triangle(-0.6, 0.4), 3)
    pair = assemble_pair(m)
    bnorm = pair.B.norm_estimate()
    for _ in range(50):
        x = rng.standard_normal(pair.dofmap.n_free)
        assert x @ pair.B.matvec(x) >= -1e-12 * bnorm * (x @ x)


def test_cross_stiffness_matches_global_interpolant():
    t = make_triangle(0.4, 0.9)
    m = uniform_refine(t, 3)
    d = build_dof_map(m)
    S = assemble_S(m, d)
    B = assemble_B(m, d, t)
    Z = np.column_stack([fm_interpolate(m, d, f) for f in p2_basis(t).midpoint_functions])
    np.testing.assert_allclose(B.C, (S @ Z).T, atol=1e-12 * np.abs(B.C).max())
    np.testing.assert_allclose(B.Q, Z.T @ S @ Z, rtol=1e-11)
    np.testing.assert_allclose(Z[list(d.midpoint_dofs)], np.eye(3), atol=1e-15)


def test_B_dense_equals_factored_form():
    t = make_triangle(0.4, 0.9)
    m = uniform_refine(t, 2)
    pair = assemble_pair(m)
    Bd = pair.B.toarray()
    n = pair.dofmap.n_free
    P = np.zeros((3, n))
    P[range(3), list(pair.dofmap.midpoint_dofs)] = 1
    S = pair.B.S.toarray()
    ref = S - pair.B.C.T @ P - P.T @ pair.B.C + P.T @ pair.B.Q @ P
    np.testing.assert_allclose(Bd, ref, atol=1e-14 * np.abs(ref).max())
    x = np.random.default_rng(3).standard_normal((n, 4))
    np.testing.assert_allclose(pair.B.matmat(x), Bd @ x, atol=1e-12 * np.abs(Bd).max())


@pytest.mark.parametrize("level", [1, 2, 3])
def test_kernel_dimension_is_three(level, table_triangle):
    pair = assemble_pair(uniform_refine(table_triangle, level))
    r = solve_dense_full(pair.B, pair.A)
    assert r.zero_count == 3


def test_q_is_exact_gradient_gram():
    t = make_triangle(0.1, 0.5)
    m = uniform_refine(t, 1)
    B = assemble_B(m, build_dof_map(m), t)
    mids = p2_basis(t).midpoint_functions
    np.testing.assert_allclose(B.Q, [[h1_form(p, q, t) for q in mids] for p in mids], rtol=1e-14)


def test_midpoint_check():
    m = uniform_refine(make_triangle(0, 1), 2)
    with pytest.raises(MidpointNotANode):
        assemble_B(m, build_dof_map(m), make_triangle(0.1, 1))


def test_midpoint_dofs_hold_midpoint_values():
    t = make_triangle(0.3, 0.8)
    u = BaryPoly.monomial(2, 1, 0)
    m = uniform_refine(t, 3)
    d = build_dof_map(m)
    x = fm_interpolate(m, d, u)
    mids = p2_basis(t).points[3:]
    np.testing.assert_allclose(x[list(d.midpoint_dofs)], u.evaluate(mids), rtol=1e-13, atol=1e-15)


def test_write_coo(tmp_path):
    A = sp.csr_matrix(np.array([[2.0, -1.0], [-1.0, 3.5]]))
    path = tmp_path / "a.coo"
    write_coo(path, A)
    lines = path.read_text().splitlines()
    assert lines == ["1 1 2.0", "1 2 -1.0", "2 1 -1.0", "2 2 3.5"]

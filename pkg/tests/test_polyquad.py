import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from interpconst.errors import InvalidDegree
from interpconst.geometry import make_triangle
from interpconst.polyquad import (
    LAGRANGE_POINTS,
    BaryPoly,
    apply_pi2,
    cartesian_coordinate,
    h1_form,
    integrate_bary_monomial,
    m_form,
    monomials,
    p2_basis,
    pk0_basis,
    poly_gradient,
)
from oracles import bary_monomial_values, triangle_rule


def random_poly(rng, degree):
    return BaryPoly({e: rng.standard_normal() for d in range(degree + 1) for e in monomials(d)})


@pytest.mark.parametrize("abc,expected", [((0, 0, 0), 1.0), ((1, 1, 0), 1 / 12), ((2, 0, 0), 1 / 6)])
def test_integrate_monomial_small(abc, expected):
    assert integrate_bary_monomial(*abc, 0.37) == pytest.approx(expected * 0.37, rel=1e-15)


def test_integrate_monomial_large_exponents_do_not_overflow():
    v = integrate_bary_monomial(200, 150, 100, 1.0)
    assert 0 < v < 1e-100 and math.isfinite(v)


def test_integrate_monomial_vs_quadrature(rng):
    verts = make_triangle(0.3, 0.8).vertices
    _, w, lam = triangle_rule(verts, 12)  # exact to degree 22
    for _ in range(100):
        a, b, c = rng.integers(0, 8, size=3)
        while a + b + c > 20:
            a, b, c = rng.integers(0, 8, size=3)
        ref = np.dot(w, bary_monomial_values(lam, a, b, c))
        assert integrate_bary_monomial(a, b, c, 0.4) == pytest.approx(ref, rel=1e-12)


def test_integrate_negative_exponent():
    with pytest.raises(ValueError):
        integrate_bary_monomial(-1, 0, 0, 1.0)


def test_gradient_of_constant_and_x():
    t = make_triangle(0.3, 0.8)
    gx, gy = poly_gradient(BaryPoly.constant(3.0), t)
    assert gx.coeffs == {} and gy.coeffs == {}
    gx, gy = poly_gradient(cartesian_coordinate(t, 0), t)
    assert gx.coeffs and gx.homogenize(0).coeffs[(0, 0, 0)] == pytest.approx(1.0)
    assert abs(gy.homogenize(0).coeffs.get((0, 0, 0), 0.0)) < 1e-15


def test_gradient_vs_finite_differences(rng):
    t = make_triangle(-0.4, 0.7)
    p = random_poly(rng, 4)
    gx, gy = poly_gradient(p, t)
    lam = rng.dirichlet([1, 1, 1], size=10)
    xy = t.to_cartesian(lam)
    step = 1e-6

    def f(pts):
        return p.evaluate(t.to_barycentric(pts))

    fd_x = (f(xy + [step, 0]) - f(xy - [step, 0])) / (2 * step)
    fd_y = (f(xy + [0, step]) - f(xy - [0, step])) / (2 * step)
    scale = max(np.abs(fd_x).max(), np.abs(fd_y).max())
    np.testing.assert_allclose(gx.evaluate(lam), fd_x, rtol=0, atol=1e-8 * scale)
    np.testing.assert_allclose(gy.evaluate(lam), fd_y, rtol=0, atol=1e-8 * scale)


def test_p2_basis_kronecker():
    basis = p2_basis(make_triangle(0.2, 0.6))
    vals = np.array([f.evaluate(LAGRANGE_POINTS) for f in basis.functions])
    np.testing.assert_allclose(vals, np.eye(6), atol=1e-15)
    centroid = np.full(3, 1 / 3)
    assert sum(float(f.evaluate(centroid)) for f in basis.functions) == pytest.approx(1.0, abs=1e-15)


def test_p2_vertex_function_matches_interpolation_solve():
    # oracle: solve the 6x6 interpolation system over the quadratic monomials
    exps = monomials(2)
    V = np.array([[np.prod(pt**np.array(e)) for e in exps] for pt in LAGRANGE_POINTS])
    coeffs = np.linalg.solve(V, np.eye(6))
    basis = p2_basis(make_triangle(0.9, 0.2))
    for i, f in enumerate(basis.functions):
        np.testing.assert_allclose(f.coeff_vector(2), coeffs[:, i], atol=1e-14)
    l1 = BaryPoly.monomial(1, 0, 0)
    np.testing.assert_allclose(basis.functions[0].coeff_vector(2), (l1 * (2 * l1 - 1)).coeff_vector(2), atol=1e-15)


@pytest.mark.parametrize("k,dim", [(2, 3), (3, 7), (4, 12), (6, 25), (8, 42)])
def test_pk0_dimension(k, dim):
    b = pk0_basis(make_triangle(0.1, 0.9), k)
    assert b.dim == dim == (k + 1) * (k + 2) // 2 - 3


def test_pk0_degree2_span():
    b = pk0_basis(make_triangle(0.1, 0.9), 2)
    assert set(b.exponents) == {(1, 1, 0), (0, 1, 1), (1, 0, 1)}


@pytest.mark.parametrize("k", [3, 5, 7])
def test_pk0_vanish_at_vertices_and_independent(k):
    t = make_triangle(-0.2, 0.4)
    b = pk0_basis(t, k)
    for f in b.functions:
        assert np.abs(f.evaluate(np.eye(3))).max() < 1e-14
    # Gram matrix of the L2 inner product is nonsingular
    G = np.array([[(f * g).integrate(t.area) for g in b.functions] for f in b.functions])
    assert np.linalg.matrix_rank(G, tol=1e-14 * np.abs(G).max()) == b.dim


def test_pk0_invalid_degree():
    with pytest.raises(InvalidDegree):
        pk0_basis(make_triangle(0, 1), 1)


def test_pi2_reproduces_quadratics(rng):
    basis = p2_basis(make_triangle(0.3, 0.5))
    q = BaryPoly.from_vector(rng.standard_normal(6), 2)
    np.testing.assert_allclose(apply_pi2(q, basis).coeff_vector(2), q.coeff_vector(2), atol=1e-13)


def test_pi2_kills_bubble():
    basis = p2_basis(make_triangle(0.3, 0.5))
    assert apply_pi2(BaryPoly.monomial(1, 1, 1), basis).max_abs_coeff() == 0.0


def test_pi2_of_cubic_matches_at_points(rng):
    t = make_triangle(0.3, 0.5)
    basis = p2_basis(t)
    p = BaryPoly.monomial(3, 0, 0)
    q = apply_pi2(p, basis)
    np.testing.assert_allclose(q.evaluate(LAGRANGE_POINTS), p.evaluate(LAGRANGE_POINTS), atol=1e-15)
    lam = rng.dirichlet([1, 1, 1], size=20)
    # a quadratic agreeing at the six points is unique: compare with the explicit Lagrange sum
    direct = sum(float(p.evaluate(pt)) * f.evaluate(lam) for pt, f in zip(LAGRANGE_POINTS, basis.functions))
    np.testing.assert_allclose(q.evaluate(lam), direct, atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_pi2_projection_properties(seed, degree):
    rng = np.random.default_rng(seed)
    basis = p2_basis(make_triangle(-0.3, 0.9))
    p = random_poly(rng, degree)
    q = apply_pi2(p, basis)
    np.testing.assert_allclose(apply_pi2(q, basis).coeff_vector(2), q.coeff_vector(2), atol=1e-13 * max(1, q.max_abs_coeff()))
    scale = max(1.0, np.abs(p.evaluate(rng.dirichlet([1, 1, 1], size=50))).max())
    assert np.abs((p - q).evaluate(LAGRANGE_POINTS)).max() <= 1e-12 * scale


def test_m_form_counts_mixed_derivative_twice():
    t = make_triangle(0.2, 0.7)
    x, y = cartesian_coordinate(t, 0), cartesian_coordinate(t, 1)
    # u = x y: u_xy = 1, so |D^2 u|^2 = 2
    assert m_form(x * y, x * y, t) == pytest.approx(2 * t.area, rel=1e-13)
    # u = x^2 + 3 y^2: 4 + 36
    u = x * x + 3.0 * (y * y)
    assert m_form(u, u, t) == pytest.approx(40 * t.area, rel=1e-13)


def test_h1_form_vs_quadrature(rng):
    t = make_triangle(0.6, 0.4)
    p, q = random_poly(rng, 3), random_poly(rng, 4)
    pts, w, lam = triangle_rule(t.vertices, 8)
    gp = np.stack([g.evaluate(lam) for g in poly_gradient(p, t)], axis=1)
    gq = np.stack([g.evaluate(lam) for g in poly_gradient(q, t)], axis=1)
    assert h1_form(p, q, t) == pytest.approx(np.dot(w, np.sum(gp * gq, axis=1)), rel=1e-12)


def test_homogenize_preserves_values(rng):
    p = random_poly(rng, 3)
    lam = rng.dirichlet([1, 1, 1], size=15)
    np.testing.assert_allclose(p.homogenize(5).evaluate(lam), p.evaluate(lam), atol=1e-12)
    with pytest.raises(ValueError):
        p.homogenize(2)


def test_barypoly_rejects_bad_input():
    with pytest.raises(ValueError):
        BaryPoly({(-1, 0, 0): 1.0})
    with pytest.raises(ValueError):
        BaryPoly({(1, 0, 0): float("nan")})

"""Independent reference computations used only by the tests."""
import numpy as np


def triangle_rule(verts, n):
    """Collapsed-coordinate Gauss rule on a triangle, exact to degree 2n - 2.

    Returns ``(points (m, 2), weights (m,))``.
    """
    verts = np.asarray(verts, dtype=float)
    x, w = np.polynomial.legendre.leggauss(n)
    x = 0.5 * (x + 1.0)
    w = 0.5 * w
    u, v = np.meshgrid(x, x, indexing="ij")
    wu, wv = np.meshgrid(w, w, indexing="ij")
    l2 = u.ravel()
    l3 = (v * (1.0 - u)).ravel()
    l1 = 1.0 - l2 - l3
    lam = np.stack([l1, l2, l3], axis=1)
    e1, e2 = verts[1] - verts[0], verts[2] - verts[0]
    area = 0.5 * abs(e1[0] * e2[1] - e1[1] * e2[0])
    weights = (wu * wv).ravel() * (1.0 - u.ravel()) * 2.0 * area
    return lam @ verts, weights, lam


def bary_monomial_values(lam, a, b, c):
    return lam[:, 0] ** a * lam[:, 1] ** b * lam[:, 2] ** c


def quad_poly_derivs(coef, g, lam):
    """Values, gradients, Hessians of sum_m coef[m] * q_m for the Morley monomials.

    ``g`` is the (3, 2) barycentric gradient matrix.
    """
    from interpconst._kernels import QUAD_EXPONENTS

    val = np.zeros(len(lam))
    grad = np.zeros((len(lam), 2))
    hess = np.zeros((2, 2))
    for c, (e) in zip(coef, QUAD_EXPONENTS):
        idx = [i for i in range(3) for _ in range(e[i])]
        a, b = idx
        val += c * lam[:, a] * lam[:, b]
        grad += c * (lam[:, a, None] * g[b][None] + lam[:, b, None] * g[a][None])
        hess += c * (np.outer(g[a], g[b]) + np.outer(g[b], g[a]))
    return val, grad, hess


def dense_jacobi_reference(A, B):
    """Plain symmetric reference for ``B x = mu A x`` via an eigendecomposition of A."""
    w, V = np.linalg.eigh(A)
    Ah = V @ np.diag(w**-0.5) @ V.T
    C = Ah @ B @ Ah
    return np.sort(np.linalg.eigvalsh(0.5 * (C + C.T)))[::-1]


def random_triangle(rng, min_quality=0.15):
    """Random positively oriented triangle, rejecting very flat shapes."""
    while True:
        v = rng.uniform(-2, 2, size=(3, 2))
        e1, e2 = v[1] - v[0], v[2] - v[0]
        area = 0.5 * (e1[0] * e2[1] - e1[1] * e2[0])
        longest = max(np.linalg.norm(v[i] - v[(i + 1) % 3]) for i in range(3))
        if abs(area) > min_quality * longest**2:
            if area < 0:
                v = v[[0, 2, 1]]
            return v


def ritz_reference(verts, k):
    """Rayleigh-Ritz matrices by symbolic differentiation and Gauss quadrature.

    Same trial basis (scaled Bernstein monomials without the pure powers),
    but built in Cartesian coordinates with sympy and integrated numerically.
    """
    import math

    import sympy

    x, y = sympy.symbols("x y")
    v = [tuple(sympy.Float(c, 30) for c in p) for p in np.asarray(verts, dtype=float)]
    M = sympy.Matrix([[1, 1, 1], [v[0][0], v[1][0], v[2][0]], [v[0][1], v[1][1], v[2][1]]])
    lam = list(M.inv() * sympy.Matrix([1, x, y]))
    nodes = list(v) + [tuple((v[i][j] + v[(i + 1) % 3][j]) / 2 for j in range(2)) for i in range(3)]
    p2 = [lam[i] * (2 * lam[i] - 1) for i in range(3)] + [4 * lam[i] * lam[(i + 1) % 3] for i in range(3)]
    exps = [(k - b - c, b, c) for b in range(k, -1, -1) for c in range(k - b, -1, -1) if max(k - b - c, b, c) < k]
    funcs = []
    for a, b, c in exps:
        coeff = math.factorial(k) // (math.factorial(a) * math.factorial(b) * math.factorial(c))
        funcs.append(sympy.expand(coeff * lam[0] ** a * lam[1] ** b * lam[2] ** c))
    pts, w, _ = triangle_rule(verts, k + 2)

    def ev(expr):
        f = sympy.lambdify((x, y), expr, "numpy")
        return np.broadcast_to(np.asarray(f(pts[:, 0], pts[:, 1]), dtype=float), w.shape)

    hess, grads = [], []
    for f in funcs:
        interp = sum(f.subs({x: px, y: py}) * q for (px, py), q in zip(nodes, p2))
        r = sympy.expand(f - interp)
        hess.append([ev(sympy.diff(f, x, 2)), ev(sympy.diff(f, x, y)), ev(sympy.diff(f, y, 2))])
        grads.append([ev(sympy.diff(r, x)), ev(sympy.diff(r, y))])
    n = len(funcs)
    A = np.empty((n, n))
    B = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            hi, hj = hess[i], hess[j]
            A[i, j] = np.dot(w, hi[0] * hj[0] + 2 * hi[1] * hj[1] + hi[2] * hj[2])
            B[i, j] = np.dot(w, grads[i][0] * grads[j][0] + grads[i][1] * grads[j][1])
    return A, B


def quadrature_local_matrices(verts, coef):
    """Morley local Hessian and gradient Gram matrices by a degree-10 Gauss rule."""
    from interpconst.geometry import Triangle

    t = Triangle(*map(tuple, verts))
    g = t.barycentric_gradients()
    _, w, lam = triangle_rule(verts, 6)  # exact to degree 10
    grads, hess = [], []
    for i in range(6):
        _, gr, he = quad_poly_derivs(coef[:, i], g, lam)
        grads.append(gr)
        hess.append(he)
    M = np.array([[t.area * np.sum(hess[i] * hess[j]) for j in range(6)] for i in range(6)])
    G = np.array([[np.dot(w, np.sum(grads[i] * grads[j], axis=1)) for j in range(6)] for i in range(6)])
    return M, G

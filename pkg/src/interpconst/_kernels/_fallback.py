"""Pure-Python/numpy implementations of the hot kernels.

Kept behaviourally identical to the compiled ``_core`` module; selected at
import when the extension is missing or ``INTERPCONST_PURE_PYTHON`` is set.
"""
import math

import numpy as np

# local quadratic monomials: l1^2, l2^2, l3^2, l1 l2, l2 l3, l3 l1
QUAD_EXPONENTS = ((2, 0, 0), (0, 2, 0), (0, 0, 2), (1, 1, 0), (0, 1, 1), (1, 0, 1))
_PAIRS = ((0, 0), (1, 1), (2, 2), (0, 1), (1, 2), (2, 0))


def _grad_weights(g):
    """w[m, c] such that grad q_m = sum_c l_c * w[m, c]; g is (F, 3, 2)."""
    F = g.shape[0]
    w = np.zeros((F, 6, 3, 2))
    for m, (a, b) in enumerate(_PAIRS):
        if a == b:
            w[:, m, a] = 2.0 * g[:, a]
        else:
            w[:, m, a] += g[:, b]
            w[:, m, b] += g[:, a]
    return w


def fm_local_batch(verts):
    """Morley basis coefficients and local matrices for a batch of elements.

    Parameters
    ----------
    verts : (F, 3, 2) array
        Positively oriented element vertices.

    Returns
    -------
    coef : (F, 6, 6)
        ``coef[t, m, i]`` is the coefficient of monomial ``m`` in basis
        function ``i``.  DOFs 0-2 are vertex values, 3-5 the integrals of
        the outward normal derivative over the edge opposite vertex 0-2.
    m_local, g_local : (F, 6, 6)
        Hessian (Frobenius, mixed term twice) and gradient Gram matrices.
    """
    verts = np.ascontiguousarray(verts, dtype=float)
    F = verts.shape[0]
    x, y = verts[..., 0], verts[..., 1]
    twice_area = (x[:, 1] - x[:, 0]) * (y[:, 2] - y[:, 0]) - (x[:, 2] - x[:, 0]) * (y[:, 1] - y[:, 0])
    area = 0.5 * twice_area
    g = np.empty((F, 3, 2))
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        g[:, i, 0] = (y[:, j] - y[:, k]) / twice_area
        g[:, i, 1] = (x[:, k] - x[:, j]) / twice_area

    w = _grad_weights(g)
    D = np.zeros((F, 6, 6))
    D[:, 0, 0] = D[:, 1, 1] = D[:, 2, 2] = 1.0
    for k in range(3):
        j, l = (k + 1) % 3, (k + 2) % 3
        # |e| n for the edge v_j -> v_l of a counter-clockwise element
        scaled_normal = np.stack([y[:, l] - y[:, j], -(x[:, l] - x[:, j])], axis=1)
        grad_mid = 0.5 * (w[:, :, j] + w[:, :, l])
        D[:, 3 + k, :] = np.einsum("fmd,fd->fm", grad_mid, scaled_normal)
    coef = np.linalg.inv(D)

    H = np.zeros((F, 6, 2, 2))
    for m, (a, b) in enumerate(_PAIRS):
        ga, gb = g[:, a], g[:, b]
        H[:, m] = ga[:, :, None] * gb[:, None, :] + gb[:, :, None] * ga[:, None, :]
    Mq = area[:, None, None] * np.einsum("fmij,fnij->fmn", H, H)

    lam_gram = (np.ones((3, 3)) + np.eye(3)) / 12.0
    Gq = area[:, None, None] * np.einsum("fmcd,fned,ce->fmn", w, w, lam_gram)

    m_local = np.einsum("fmi,fmn,fnj->fij", coef, Mq, coef)
    g_local = np.einsum("fmi,fmn,fnj->fij", coef, Gq, coef)
    m_local = 0.5 * (m_local + m_local.transpose(0, 2, 1))
    g_local = 0.5 * (g_local + g_local.transpose(0, 2, 1))
    return coef, m_local, g_local


def jacobi_eigh(a, tol=1e-15, max_sweeps=60):
    """Cyclic Jacobi eigen-decomposition of a symmetric matrix.

    Returns ``(w, v, sweeps)`` with ascending eigenvalues ``w`` and
    orthonormal eigenvectors in the columns of ``v``.  An off-diagonal pair
    is rotated away unless ``|a_pq| <= tol * sqrt(|a_pp a_qq|)`` (or below
    machine precision relative to ``||a||_F``), in which case it is zeroed;
    iteration stops after the first sweep without rotations.
    """
    a = np.array(a, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    floor = 2.220446049250313e-16 * (math.sqrt(float(np.sum(a * a))) or 1.0)
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        rotated = 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app, aqq = a[p, p], a[q, q]
                if abs(apq) <= max(tol * math.sqrt(abs(app * aqq)), floor):
                    a[p, q] = a[q, p] = 0.0
                    continue
                rotated += 1
                theta = (aqq - app) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
        if rotated == 0:
            break
    else:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order], sweeps

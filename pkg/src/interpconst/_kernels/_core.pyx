# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the hot kernels; see ``_fallback`` for the contracts."""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs, copysign

cnp.import_array()

cdef int PA[6]
cdef int PB[6]
PA[:] = [0, 1, 2, 0, 1, 2]
PB[:] = [0, 1, 2, 1, 2, 0]


cdef int _invert6(double[:, ::1] d, double[:, ::1] out) noexcept nogil:
    """Gauss-Jordan with partial pivoting; returns 0 on success."""
    cdef double aug[6][12]
    cdef int i, j, k, piv
    cdef double best, f, tmp
    for i in range(6):
        for j in range(6):
            aug[i][j] = d[i, j]
            aug[i][6 + j] = 1.0 if i == j else 0.0
    for k in range(6):
        piv = k
        best = fabs(aug[k][k])
        for i in range(k + 1, 6):
            if fabs(aug[i][k]) > best:
                best = fabs(aug[i][k])
                piv = i
        if best == 0.0:
            return 1
        if piv != k:
            for j in range(12):
                tmp = aug[k][j]
                aug[k][j] = aug[piv][j]
                aug[piv][j] = tmp
        f = 1.0 / aug[k][k]
        for j in range(12):
            aug[k][j] *= f
        for i in range(6):
            if i != k and aug[i][k] != 0.0:
                f = aug[i][k]
                for j in range(12):
                    aug[i][j] -= f * aug[k][j]
    for i in range(6):
        for j in range(6):
            out[i, j] = aug[i][6 + j]
    return 0


def fm_local_batch(verts):
    cdef double[:, :, ::1] V = np.ascontiguousarray(verts, dtype=np.float64)
    cdef Py_ssize_t F = V.shape[0]
    coef_a = np.empty((F, 6, 6))
    m_a = np.empty((F, 6, 6))
    g_a = np.empty((F, 6, 6))
    cdef double[:, :, ::1] coef = coef_a
    cdef double[:, :, ::1] mloc = m_a
    cdef double[:, :, ::1] gloc = g_a
    cdef double[:, ::1] D = np.zeros((6, 6))
    cdef double[:, ::1] C = np.zeros((6, 6))
    cdef double g[3][2]
    cdef double w[6][3][2]
    cdef double H[6][2][2]
    cdef double Mq[6][6]
    cdef double Gq[6][6]
    cdef double lg[3][3]
    cdef double tmp[6][6]
    cdef double x0, y0, x1, y1, x2, y2, ta, area, nx, ny, s, acc
    cdef double xs[3]
    cdef double ys[3]
    cdef Py_ssize_t t
    cdef int i, j, k, l, m, n, a, b, c, e, r
    for i in range(3):
        for j in range(3):
            lg[i][j] = (2.0 if i == j else 1.0) / 12.0
    for t in range(F):
        for i in range(3):
            xs[i] = V[t, i, 0]
            ys[i] = V[t, i, 1]
        ta = (xs[1] - xs[0]) * (ys[2] - ys[0]) - (xs[2] - xs[0]) * (ys[1] - ys[0])
        area = 0.5 * ta
        for i in range(3):
            j = (i + 1) % 3
            k = (i + 2) % 3
            g[i][0] = (ys[j] - ys[k]) / ta
            g[i][1] = (xs[k] - xs[j]) / ta
        for m in range(6):
            for c in range(3):
                w[m][c][0] = 0.0
                w[m][c][1] = 0.0
            a = PA[m]
            b = PB[m]
            if a == b:
                w[m][a][0] = 2.0 * g[a][0]
                w[m][a][1] = 2.0 * g[a][1]
            else:
                w[m][a][0] += g[b][0]
                w[m][a][1] += g[b][1]
                w[m][b][0] += g[a][0]
                w[m][b][1] += g[a][1]
            for i in range(2):
                for j in range(2):
                    H[m][i][j] = g[a][i] * g[b][j] + g[b][i] * g[a][j]
        for i in range(6):
            for j in range(6):
                D[i, j] = 0.0
        D[0, 0] = 1.0
        D[1, 1] = 1.0
        D[2, 2] = 1.0
        for k in range(3):
            j = (k + 1) % 3
            l = (k + 2) % 3
            nx = ys[l] - ys[j]
            ny = -(xs[l] - xs[j])
            for m in range(6):
                D[3 + k, m] = 0.5 * ((w[m][j][0] + w[m][l][0]) * nx + (w[m][j][1] + w[m][l][1]) * ny)
        if _invert6(D, C) != 0:
            raise ZeroDivisionError("singular Morley DOF matrix")
        for m in range(6):
            for n in range(6):
                acc = 0.0
                for i in range(2):
                    for j in range(2):
                        acc += H[m][i][j] * H[n][i][j]
                Mq[m][n] = area * acc
                acc = 0.0
                for c in range(3):
                    for e in range(3):
                        acc += lg[c][e] * (w[m][c][0] * w[n][e][0] + w[m][c][1] * w[n][e][1])
                Gq[m][n] = area * acc
        for m in range(6):
            for i in range(6):
                coef[t, m, i] = C[m, i]
        # m_local = C^T Mq C and g_local = C^T Gq C, then symmetrized
        for r in range(2):
            for m in range(6):
                for j in range(6):
                    acc = 0.0
                    for n in range(6):
                        acc += (Mq[m][n] if r == 0 else Gq[m][n]) * C[n, j]
                    tmp[m][j] = acc
            for i in range(6):
                for j in range(6):
                    acc = 0.0
                    for m in range(6):
                        acc += C[m, i] * tmp[m][j]
                    if r == 0:
                        mloc[t, i, j] = acc
                    else:
                        gloc[t, i, j] = acc
        for i in range(6):
            for j in range(i + 1, 6):
                s = 0.5 * (mloc[t, i, j] + mloc[t, j, i])
                mloc[t, i, j] = s
                mloc[t, j, i] = s
                s = 0.5 * (gloc[t, i, j] + gloc[t, j, i])
                gloc[t, i, j] = s
                gloc[t, j, i] = s
    return coef_a, m_a, g_a


def jacobi_eigh(a_in, double tol=1e-15, int max_sweeps=60):
    a_np = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] a = a_np
    cdef Py_ssize_t n = a.shape[0]
    v_np = np.eye(n)
    cdef double[:, ::1] v = v_np
    cdef double floor = 2.220446049250313e-16 * (sqrt(float(np.sum(a_np * a_np))) or 1.0)
    cdef int sweeps = 0
    cdef long rotated
    cdef Py_ssize_t p, q, r
    cdef double apq, app, aqq, theta, t, c, s, x, y, thr
    converged = False
    while sweeps < max_sweeps:
        sweeps += 1
        rotated = 0
        with nogil:
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    app = a[p, p]
                    aqq = a[q, q]
                    thr = tol * sqrt(fabs(app * aqq))
                    if thr < floor:
                        thr = floor
                    if fabs(apq) <= thr:
                        a[p, q] = 0.0
                        a[q, p] = 0.0
                        continue
                    rotated += 1
                    theta = (aqq - app) / (2.0 * apq)
                    t = copysign(1.0, theta) / (fabs(theta) + sqrt(theta * theta + 1.0))
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    for r in range(n):
                        x = a[r, p]
                        y = a[r, q]
                        a[r, p] = c * x - s * y
                        a[r, q] = s * x + c * y
                    for r in range(n):
                        x = a[p, r]
                        y = a[q, r]
                        a[p, r] = c * x - s * y
                        a[q, r] = s * x + c * y
                    a[p, p] = app - t * apq
                    a[q, q] = aqq + t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(n):
                        x = v[r, p]
                        y = v[r, q]
                        v[r, p] = c * x - s * y
                        v[r, q] = s * x + c * y
        if rotated == 0:
            converged = True
            break
    if not converged:
        raise RuntimeError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    w = np.diag(a_np).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v_np[:, order], sweeps

"""Symmetric-definite generalized eigenproblems ``B x = eta A x``.

Two independent routes:

* :func:`solve_largest` factors ``A`` once (sparse LU in symmetric mode)
  and runs implicitly restarted Lanczos (ARPACK) on ``A^{-1} B`` in the
  ``A`` inner product, for the few largest ``eta``.
* :func:`solve_dense_full` reduces with a Cholesky factor of the
  diagonally scaled ``A`` and diagonalizes ``L^{-1} B L^{-T}`` with cyclic
  Jacobi, giving the full spectrum.

Every reported pair carries a relative residual and the radius
``sqrt(r^T A^{-1} r)`` (``x^T A x = 1``), which bounds the distance from the
computed ``eta`` to an exact eigenvalue of the pencil.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, aslinearoperator, eigsh, splu

from . import _kernels
from .errors import EmptySpectrum, NoConvergence, NotSPD

log = logging.getLogger(__name__)

KERNEL_TOL = 1e-9
DEFAULT_SEED = 20170101


@dataclass(frozen=True, eq=False)
class EigResult:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # columns, A-orthonormal
    residuals: np.ndarray
    error_bounds: np.ndarray
    zero_count: int
    kernel_tol: float = KERNEL_TOL

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if len(self.residuals) else 0.0


def factorize_spd(A):
    """Return a solver ``b -> A^{-1} b``; raise :class:`NotSPD` if ``A`` is not SPD."""
    if sp.issparse(A):
        A = sp.csc_matrix(A)
        try:
            lu = splu(
                A,
                permc_spec="MMD_AT_PLUS_A",
                diag_pivot_thresh=0.0,
                options={"SymmetricMode": True},
            )
        except RuntimeError as exc:
            raise NotSPD(f"sparse factorization failed: {exc}") from exc
        if not np.array_equal(lu.perm_r, lu.perm_c):
            raise NotSPD("factorization needed off-diagonal pivoting")
        if not np.all(lu.U.diagonal() > 0):
            raise NotSPD("non-positive pivot in symmetric factorization")
        return lu.solve
    A = np.asarray(A, dtype=float)
    try:
        c = sla.cho_factor(A, lower=True)
    except np.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc
    return lambda b: sla.cho_solve(c, b)


def _as_operator(B):
    if hasattr(B, "aslinearoperator"):
        return B.aslinearoperator()
    return aslinearoperator(B)


def _dense(B) -> np.ndarray:
    if hasattr(B, "toarray"):
        return np.asarray(B.toarray(), dtype=float)
    return np.asarray(B, dtype=float)


def _norm_estimate(B) -> float:
    if hasattr(B, "norm_estimate"):
        return B.norm_estimate()
    if sp.issparse(B):
        return float(sp.linalg.norm(B, 1))
    return float(np.linalg.norm(np.asarray(B), 2))


def _certify(Bop, A, solve, eta, X, b_norm):
    Bx = Bop.matmat(X) if hasattr(Bop, "matmat") else Bop @ X
    Ax = A @ X
    R = Bx - Ax * eta[None, :]
    xnorm = np.linalg.norm(X, axis=0)
    scale = b_norm if b_norm > 0 else 1.0
    residuals = np.linalg.norm(R, axis=0) / (scale * np.where(xnorm > 0, xnorm, 1.0))
    AinvR = solve(R) if R.shape[1] else R
    radius = np.sqrt(np.maximum(np.einsum("ij,ij->j", R, AinvR), 0.0))
    return residuals, radius


def solve_dense_full(B, A, kernel_tol: float = KERNEL_TOL) -> EigResult:
    """Full spectrum of the pencil by Cholesky reduction and cyclic Jacobi."""
    Bd = _dense(B)
    Ad = _dense(A)
    n = Ad.shape[0]
    if Bd.shape != (n, n):
        raise ValueError("dimension mismatch")
    diag = np.diag(Ad)
    if np.any(diag <= 0):
        raise NotSPD("non-positive diagonal entry")
    d = 1.0 / np.sqrt(diag)
    As = Ad * d[:, None] * d[None, :]
    Bs = Bd * d[:, None] * d[None, :]
    try:
        L = np.linalg.cholesky(0.5 * (As + As.T))
    except np.linalg.LinAlgError as exc:
        raise NotSPD(str(exc)) from exc
    Y = sla.solve_triangular(L, Bs, lower=True)
    Cm = sla.solve_triangular(L, Y.T, lower=True)
    Cm = 0.5 * (Cm + Cm.T)
    try:
        w, V, _ = _kernels.jacobi_eigh(Cm)
    except RuntimeError as exc:
        raise NoConvergence(60, float("nan"), str(exc)) from exc
    X = sla.solve_triangular(L.T, V, lower=False) * d[:, None]
    w, X = w[::-1].copy(), X[:, ::-1].copy()
    solve = factorize_spd(Ad)
    residuals, radius = _certify(Bd, Ad, solve, w, X, float(np.linalg.norm(Bd, 2)))
    top = w[0] if n else 0.0
    zero_count = int(np.sum(w < kernel_tol * top)) if top > 0 else n
    return EigResult(w, X, residuals, radius, zero_count, kernel_tol)


def solve_largest(
    Bop,
    A,
    count: int = 1,
    tol: float = 1e-10,
    seed: int = DEFAULT_SEED,
    kernel_tol: float = KERNEL_TOL,
    maxiter: int | None = None,
) -> EigResult:
    """The ``count`` largest eigenvalues of ``B x = eta A x``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    n = A.shape[0]
    if Bop.shape != (n, n):
        raise ValueError("dimension mismatch")
    if n <= max(count + 2, 24):
        full = solve_dense_full(Bop, A, kernel_tol)
        res = EigResult(
            full.eigenvalues[:count],
            full.eigenvectors[:, :count],
            full.residuals[:count],
            full.error_bounds[:count],
            int(np.sum(full.eigenvalues[:count] < kernel_tol * full.eigenvalues[0])),
            kernel_tol,
        )
        _check_tol(res, tol)
        return res

    solve = factorize_spd(A)
    Minv = LinearOperator((n, n), matvec=solve, dtype=float)
    Bl = _as_operator(Bop)
    v0 = np.random.default_rng(seed).standard_normal(n)
    ncv = min(n, max(2 * count + 1, 20))
    try:
        w, X = eigsh(Bl, k=count, M=A, Minv=Minv, which="LA", v0=v0, ncv=ncv, tol=tol * 1e-2, maxiter=maxiter)
    except ArpackNoConvergence as exc:
        best = np.inf
        if len(exc.eigenvalues):
            r, _ = _certify(Bop, A, solve, exc.eigenvalues, exc.eigenvectors, _norm_estimate(Bop))
            best = float(r.min())
        raise NoConvergence(maxiter or 10 * n, best) from exc
    order = np.argsort(w)[::-1]
    w, X = w[order], X[:, order]
    anorm = np.sqrt(np.einsum("ij,ij->j", X, A @ X))
    X = X / anorm[None, :]
    residuals, radius = _certify(Bop, A, solve, w, X, _norm_estimate(Bop))
    zero_count = int(np.sum(w < kernel_tol * w[0])) if w[0] > 0 else count
    res = EigResult(w, X, residuals, radius, zero_count, kernel_tol)
    _check_tol(res, tol)
    log.debug("largest eta %s, residuals %s", w, residuals)
    return res


def _check_tol(res: EigResult, tol: float) -> None:
    if res.max_residual > tol:
        raise NoConvergence(0, res.max_residual)


def eta_to_lambda(r: EigResult, kernel_tol: float = KERNEL_TOL) -> np.ndarray:
    """``lambda_i = 1 / eta_i`` for the non-kernel eigenvalues, ascending."""
    eta = np.asarray(r.eigenvalues, dtype=float)
    if len(eta) == 0 or eta.max() <= 0:
        raise EmptySpectrum("no positive eigenvalues")
    top = eta.max()
    keep = eta[eta > kernel_tol * top]
    return np.sort(1.0 / keep)

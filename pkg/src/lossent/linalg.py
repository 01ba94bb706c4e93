"""Dense complex linear algebra for small Hermitian problems.

Everything in this package runs on matrices of dimension at most a few
dozen (two truncated bosonic modes), so the kernels below favour
unconditional stability over asymptotic speed: a cyclic Jacobi
eigensolver for Hermitian matrices and a one-sided Jacobi SVD.  Both are
JIT-compiled element loops; neither calls into LAPACK.

Precision contracts (absolute unless stated otherwise):

* ``hermitian_eigensystem`` admits inputs with ``max|H - H^dag| <= 1e-8``
  and returns a system whose reconstruction error and orthonormality
  defect are below ``1e-10 * max|H|``.
* ``singular_values`` satisfies ``sum(s^2) = ||M||_F^2`` to ``1e-10``
  relative.
* Jacobi sweeps stop once the off-diagonal Frobenius mass drops below
  ``1e-14 * ||H||_F``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import ContractViolationError

HERMITICITY_TOL = 1e-8
JACOBI_RELATIVE_TOL = 1e-14
_MAX_SWEEPS = 64


@dataclass(frozen=True)
class EigenSystem:
    """Eigenvalues in ascending order and the matching eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@njit(cache=True)
def _jacobi_rotation(a, b, r):
    """Rotation parameters (cos, sin·tan-sign) that zero a 2x2 pivot.

    ``a``, ``b`` are the diagonal entries, ``r`` the modulus of the
    off-diagonal one.  Returns ``(cs, sn)`` with ``t = sn/cs`` the
    smaller-magnitude root of ``t^2 - 2*tau*t - 1 = 0``.
    """
    tau = (b - a) / (2.0 * r)
    if tau > 1e150 or tau < -1e150:
        t = -0.5 / tau
    elif tau >= 0.0:
        t = -1.0 / (tau + np.sqrt(1.0 + tau * tau))
    else:
        t = 1.0 / (-tau + np.sqrt(1.0 + tau * tau))
    cs = 1.0 / np.sqrt(1.0 + t * t)
    return cs, t * cs


@njit(cache=True)
def _jacobi_sweeps(h, v, accumulate):
    """Cyclic Jacobi diagonalization of the Hermitian matrix ``h`` in place.

    When ``accumulate`` is true the unitary product is collected in ``v``
    (which must start as the identity).  Returns the number of sweeps
    used, or -1 if the off-diagonal mass failed to converge.
    """
    n = h.shape[0]
    fro2 = 0.0
    for i in range(n):
        for j in range(n):
            x = h[i, j]
            fro2 += x.real * x.real + x.imag * x.imag
    if fro2 == 0.0:
        return 0
    thresh2 = (JACOBI_RELATIVE_TOL * JACOBI_RELATIVE_TOL) * fro2
    for sweep in range(_MAX_SWEEPS):
        off2 = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                x = h[i, j]
                off2 += 2.0 * (x.real * x.real + x.imag * x.imag)
        if off2 <= thresh2:
            return sweep
        for p in range(n - 1):
            for q in range(p + 1, n):
                hpq = h[p, q]
                r = abs(hpq)
                if r == 0.0:
                    continue
                phase = hpq / r
                cs, sn = _jacobi_rotation(h[p, p].real, h[q, q].real, r)
                pc = np.conj(phase)
                for i in range(n):
                    hip = h[i, p]
                    hiq = h[i, q]
                    h[i, p] = cs * hip + sn * pc * hiq
                    h[i, q] = -sn * phase * hip + cs * hiq
                for j in range(n):
                    hpj = h[p, j]
                    hqj = h[q, j]
                    h[p, j] = cs * hpj + sn * phase * hqj
                    h[q, j] = -sn * pc * hpj + cs * hqj
                # kill rounding residue on the pivot, keep diagonals real
                h[p, q] = 0.0
                h[q, p] = 0.0
                h[p, p] = h[p, p].real + 0.0j
                h[q, q] = h[q, q].real + 0.0j
                if accumulate:
                    for i in range(n):
                        vip = v[i, p]
                        viq = v[i, q]
                        v[i, p] = cs * vip + sn * pc * viq
                        v[i, q] = -sn * phase * vip + cs * viq
    return -1


@njit(cache=True)
def _onesided_jacobi(a, v):
    """One-sided Jacobi orthogonalization of the columns of ``a`` (m >= n).

    Accumulates the right factor in ``v`` so that on return
    ``a_in = a_out @ v^dag`` with the columns of ``a_out`` mutually
    orthogonal.  Returns sweeps used or -1 on non-convergence.
    """
    m, n = a.shape
    for sweep in range(_MAX_SWEEPS):
        offmax = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                app = 0.0
                aqq = 0.0
                apq = 0.0 + 0.0j
                for i in range(m):
                    x = a[i, p]
                    y = a[i, q]
                    app += x.real * x.real + x.imag * x.imag
                    aqq += y.real * y.real + y.imag * y.imag
                    apq += np.conj(x) * y
                r = abs(apq)
                if app == 0.0 or aqq == 0.0 or r == 0.0:
                    continue
                rel = r / np.sqrt(app * aqq)
                if rel > offmax:
                    offmax = rel
                if rel <= 1e-15:
                    continue
                phase = apq / r
                cs, sn = _jacobi_rotation(app, aqq, r)
                pc = np.conj(phase)
                for i in range(m):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = cs * xp + sn * pc * xq
                    a[i, q] = -sn * phase * xp + cs * xq
                for i in range(n):
                    xp = v[i, p]
                    xq = v[i, q]
                    v[i, p] = cs * xp + sn * pc * xq
                    v[i, q] = -sn * phase * xp + cs * xq
        if offmax <= JACOBI_RELATIVE_TOL:
            return sweep
    return -1


def _as_square_complex(matrix) -> np.ndarray:
    m = np.ascontiguousarray(matrix, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ContractViolationError(
            f"hermitian kernel requires a square matrix, got shape {m.shape}"
        )
    if not np.all(np.isfinite(m.view(np.float64))):
        raise ContractViolationError("matrix entries must be finite")
    return m


def _admit_hermitian(matrix) -> np.ndarray:
    m = _as_square_complex(matrix)
    defect = np.max(np.abs(m - m.conj().T)) if m.size else 0.0
    if defect > HERMITICITY_TOL:
        raise ContractViolationError(
            f"matrix is not Hermitian: max|H - H^dag| = {defect:.3e} "
            f"exceeds {HERMITICITY_TOL:.0e}"
        )
    return 0.5 * (m + m.conj().T)


def hermitian_eigensystem(matrix) -> EigenSystem:
    """Full eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    matrix : array_like
        Square matrix with ``max|H - H^dag| <= 1e-8``.  It is
        symmetrized before diagonalization.

    Returns
    -------
    EigenSystem
        Ascending eigenvalues and orthonormal eigenvector columns with
        ``H @ V = V @ diag(w)`` to ``1e-10 * max|H|``.
    """
    h = _admit_hermitian(matrix)
    n = h.shape[0]
    v = np.eye(n, dtype=np.complex128)
    if _jacobi_sweeps(h, v, True) < 0:
        raise ContractViolationError("jacobi eigensolver failed to converge")
    w = np.diag(h).real.copy()
    order = np.argsort(w, kind="stable")
    return EigenSystem(w[order], np.ascontiguousarray(v[:, order]))


def hermitian_eigenvalues(matrix) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix (no eigenvectors)."""
    h = _admit_hermitian(matrix)
    dummy = np.empty((1, 1), dtype=np.complex128)
    if _jacobi_sweeps(h, dummy, False) < 0:
        raise ContractViolationError("jacobi eigensolver failed to converge")
    return np.sort(np.diag(h).real)


def trace_norm(matrix) -> float:
    """Sum of absolute eigenvalues of a Hermitian matrix."""
    return float(np.sum(np.abs(hermitian_eigenvalues(matrix))))


def _complete_orthonormal(u, filled):
    """Fill the unfilled columns of ``u`` with an orthonormal completion."""
    m = u.shape[0]
    for k in np.flatnonzero(~filled):
        best_vec = None
        best_norm = -1.0
        for cand in range(m):
            w = np.zeros(m, dtype=np.complex128)
            w[cand] = 1.0
            for j in np.flatnonzero(filled):
                w -= u[:, j] * np.vdot(u[:, j], w)
            nrm = np.linalg.norm(w)
            if nrm > best_norm:
                best_norm = nrm
                best_vec = w
        # second orthogonalization pass tightens the defect to ~1e-15
        for j in np.flatnonzero(filled):
            best_vec -= u[:, j] * np.vdot(u[:, j], best_vec)
        u[:, k] = best_vec / np.linalg.norm(best_vec)
        filled[k] = True
    return u


def svd(matrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Compact singular value decomposition ``M = U @ diag(s) @ Vh``.

    ``s`` is descending with ``k = min(M.shape)`` entries; ``U`` is
    ``m x k`` and ``Vh`` is ``k x n``, both with orthonormal rows/columns
    (zero singular directions are completed to an orthonormal set).
    """
    m0 = np.ascontiguousarray(matrix, dtype=np.complex128)
    if m0.ndim != 2:
        raise ContractViolationError("svd requires a 2-d matrix")
    if not np.all(np.isfinite(m0.view(np.float64))):
        raise ContractViolationError("matrix entries must be finite")
    transposed = m0.shape[0] < m0.shape[1]
    work = m0.conj().T.copy() if transposed else m0.copy()
    m, n = work.shape
    v = np.eye(n, dtype=np.complex128)
    if _onesided_jacobi(work, v) < 0:
        raise ContractViolationError("jacobi svd failed to converge")
    s = np.linalg.norm(work, axis=0)
    order = np.argsort(-s, kind="stable")
    s = s[order]
    work = work[:, order]
    v = v[:, order]
    u = np.zeros((m, n), dtype=np.complex128)
    cutoff = s[0] * max(m, n) * 1e-15 if n and s[0] > 0 else 0.0
    filled = s > cutoff
    for k in np.flatnonzero(filled):
        u[:, k] = work[:, k] / s[k]
    u = _complete_orthonormal(u, filled.copy())
    if transposed:
        return v, s, u.conj().T
    return u, s, v.conj().T


def singular_values(matrix) -> np.ndarray:
    """Descending singular values; ``sum(s^2)`` matches ``||M||_F^2``."""
    m0 = np.ascontiguousarray(matrix, dtype=np.complex128)
    if m0.ndim != 2:
        raise ContractViolationError("singular_values requires a 2-d matrix")
    if not np.all(np.isfinite(m0.view(np.float64))):
        raise ContractViolationError("matrix entries must be finite")
    work = m0.conj().T.copy() if m0.shape[0] < m0.shape[1] else m0.copy()
    v = np.eye(work.shape[1], dtype=np.complex128)
    if _onesided_jacobi(work, v) < 0:
        raise ContractViolationError("jacobi svd failed to converge")
    return np.sort(np.linalg.norm(work, axis=0))[::-1]

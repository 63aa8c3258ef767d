"""Cyclic Jacobi eigensolver for real symmetric matrices."""
import numpy as np
from numba import njit

from .errors import NonConvergenceError

JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100


@njit(cache=True, nogil=True)
def _off_norm(a):
    n = a.shape[0]
    s = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                s += a[i, j] * a[i, j]
    return np.sqrt(s)


@njit(cache=True, nogil=True)
def _jacobi(a, v, want_vectors, tol, max_sweeps):
    # Rotates `a` in place towards diagonal form; returns sweeps used or -1.
    n = a.shape[0]
    scale = max(1.0, np.sqrt(np.sum(a * a)))
    for sweep in range(max_sweeps + 1):
        if _off_norm(a) < tol * scale:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                app = a[p, p]
                aqq = a[q, q]
                theta = (aqq - app) / (2.0 * apq)
                if theta >= 0.0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for i in range(n):
                    aip = a[i, p]
                    aiq = a[i, q]
                    a[i, p] = c * aip - s * aiq
                    a[i, q] = s * aip + c * aiq
                for i in range(n):
                    api = a[p, i]
                    aqi = a[q, i]
                    a[p, i] = c * api - s * aqi
                    a[q, i] = s * api + c * aqi
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                if want_vectors:
                    for i in range(n):
                        vip = v[i, p]
                        viq = v[i, q]
                        v[i, p] = c * vip - s * viq
                        v[i, q] = s * vip + c * viq
    return -1


def jacobi_eigh(a, vectors=False, tol=JACOBI_TOL, max_sweeps=JACOBI_MAX_SWEEPS):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues sorted in descending order and, if ``vectors`` is
    set, the matching orthonormal eigenvectors as columns.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.allclose(a, a.T, rtol=0, atol=1e-12 * max(1.0, np.abs(a).max())):
        raise ValueError("matrix is not symmetric")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    v = np.eye(n) if vectors else np.empty((1, 1))
    sweeps = _jacobi(a, v, vectors, tol, max_sweeps)
    if sweeps < 0:
        raise NonConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps")
    w = np.diag(a).copy()
    order = np.argsort(-w, kind="stable")
    if vectors:
        return w[order], v[:, order]
    return w[order]


def reconstruction_residual(a, w, v):
    """max |Q diag(w) Q^T - A|, the eigensolver self-check."""
    return float(np.abs((v * w) @ v.T - a).max())

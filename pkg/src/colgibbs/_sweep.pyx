# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled coefficient-block sweep (hot kernel of every sampling scheme).

Mirrors :mod:`colgibbs._sweep_pure`: same block schedule, same normal
consumption, same Cholesky-based draw, with the per-move linear algebra
done through direct LAPACK/BLAS calls to avoid Python overhead.
"""
import numpy as np

cimport numpy as cnp
from scipy.linalg.cython_blas cimport ddot, dtrsv
from scipy.linalg.cython_lapack cimport dpotrf, dpotrs

COMPILED = True


def theta_sweep(double[::1] theta,
                double[:, ::1] GtG,
                double[::1] GtY,
                double[:, ::1] K_inv,
                double[::1] lam,
                double sigma2,
                long[::1] block_i,
                long[::1] block_j,
                double[::1] z):
    """In-place block sweep; see the pure backend for the contract."""
    cdef int p = K_inv.shape[0]
    cdef int mp = GtG.shape[0]
    cdef int n_sub = block_i.shape[0]
    cdef int kmax = 2 * p
    prec_buf = np.empty((kmax, kmax), dtype=np.float64, order="F")
    rhs_buf = np.empty(kmax, dtype=np.float64)
    zbuf = np.empty(kmax, dtype=np.float64)
    cdef double[::1, :] prec = prec_buf
    cdef double[::1] rhs = rhs_buf
    cdef double[::1] zk = zbuf
    cdef int s, i, j, k, a, b, ra, rb, info, one = 1
    cdef long pos = 0
    cdef double own, full, inv_s2 = 1.0 / sigma2
    cdef double inv_li, inv_lj
    cdef int incx = 1

    for s in range(n_sub):
        i = <int> block_i[s]
        j = <int> block_j[s]
        k = p if j < 0 else 2 * p
        inv_li = 1.0 / lam[i]
        inv_lj = 0.0 if j < 0 else 1.0 / lam[j]

        # precision: kernel part (block diagonal) + data part
        for a in range(k):
            ra = _row(i, j, a, p)
            for b in range(k):
                rb = _row(i, j, b, p)
                prec[a, b] = GtG[ra, rb] * inv_s2
        for a in range(p):
            for b in range(p):
                prec[a, b] += K_inv[a, b] * inv_li
        if j >= 0:
            for a in range(p):
                for b in range(p):
                    prec[p + a, p + b] += K_inv[a, b] * inv_lj

        # rhs: channel cross-products against the residual of other blocks
        for a in range(k):
            ra = _row(i, j, a, p)
            full = ddot(&mp, &GtG[ra, 0], &incx, &theta[0], &incx)
            own = 0.0
            for b in range(k):
                rb = _row(i, j, b, p)
                own += GtG[ra, rb] * theta[rb]
            rhs[a] = (GtY[ra] - full + own) * inv_s2

        info = 0
        dpotrf("L", &k, &prec[0, 0], &kmax, &info)
        if info != 0:
            raise np.linalg.LinAlgError(
                f"block precision not positive definite (dpotrf info={info})")
        dpotrs("L", &k, &one, &prec[0, 0], &kmax, &rhs[0], &kmax, &info)
        if info != 0:
            raise np.linalg.LinAlgError(f"dpotrs failed (info={info})")
        for a in range(k):
            zk[a] = z[pos + a]
        dtrsv("L", "T", "N", &k, &prec[0, 0], &kmax, &zk[0], &incx)
        for a in range(k):
            theta[_row(i, j, a, p)] = rhs[a] + zk[a]
        pos += k


cdef inline int _row(int i, int j, int a, int p) nogil:
    if a < p:
        return i * p + a
    return j * p + (a - p)

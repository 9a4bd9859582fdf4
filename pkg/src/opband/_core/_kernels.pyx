# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled kernels for mixed-norm block computations.

Same contract as ``_kernels_py``; see that module for the documented
reference implementations.  The power iteration here fuses the CSR matvec,
block norms and duality scaling into C loops.
"""

import numpy as np

from libc.math cimport pow, sqrt, fabs


cdef void _block_norms(const double complex[::1] x,
                       const long long[::1] starts,
                       double[::1] out) noexcept nogil:
    cdef Py_ssize_t k, j
    cdef double s
    cdef double complex v
    for k in range(out.shape[0]):
        s = 0.0
        for j in range(starts[k], starts[k + 1]):
            v = x[j]
            s += v.real * v.real + v.imag * v.imag
        out[k] = sqrt(s)


cdef double _pnorm(const double[::1] bn, double p) noexcept nogil:
    cdef Py_ssize_t k
    cdef double m = 0.0, s = 0.0
    for k in range(bn.shape[0]):
        if bn[k] > m:
            m = bn[k]
    if m == 0.0:
        return 0.0
    for k in range(bn.shape[0]):
        s += pow(bn[k] / m, p)
    return m * pow(s, 1.0 / p)


cdef void _duality_scale(const double complex[::1] x,
                         const long long[::1] starts,
                         const double[::1] bn,
                         double total, double p,
                         double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t k, j
    cdef double c
    for k in range(bn.shape[0]):
        if bn[k] > 0.0:
            c = pow(bn[k] / total, p - 2.0) / total
        else:
            c = 0.0
        for j in range(starts[k], starts[k + 1]):
            out[j] = c * x[j]


cdef void _csr_matvec(const double complex[::1] data,
                      const int[::1] indices,
                      const int[::1] indptr,
                      const double complex[::1] x,
                      double complex[::1] out) noexcept nogil:
    cdef Py_ssize_t i, jj
    cdef double complex acc
    for i in range(indptr.shape[0] - 1):
        acc = 0.0
        for jj in range(indptr[i], indptr[i + 1]):
            acc = acc + data[jj] * x[indices[jj]]
        out[i] = acc


def block_norms(const double complex[::1] x, const long long[::1] starts):
    out = np.empty(starts.shape[0] - 1, dtype=np.float64)
    cdef double[::1] mv = out
    _block_norms(x, starts, mv)
    return out


def mixed_norm(const double complex[::1] x, const long long[::1] starts, double p):
    bn = np.empty(starts.shape[0] - 1, dtype=np.float64)
    cdef double[::1] mv = bn
    _block_norms(x, starts, mv)
    return _pnorm(mv, p)


def duality_scaled(const double complex[::1] x, const long long[::1] starts, double p):
    cdef Py_ssize_t n = x.shape[0]
    bn = np.empty(starts.shape[0] - 1, dtype=np.float64)
    out = np.empty(n, dtype=np.complex128)
    cdef double[::1] bnv = bn
    cdef double complex[::1] outv = out
    _block_norms(x, starts, bnv)
    cdef double total = _pnorm(bnv, p)
    _duality_scale(x, starts, bnv, total, p, outv)
    return out


def power_iteration(const double complex[::1] adata,
                    const int[::1] aind,
                    const int[::1] aptr,
                    const double complex[::1] hdata,
                    const int[::1] hind,
                    const int[::1] hptr,
                    const long long[::1] starts,
                    double p,
                    const double complex[::1] x0,
                    int max_iter,
                    double tol):
    cdef Py_ssize_t n = x0.shape[0]
    cdef Py_ssize_t nb = starts.shape[0] - 1
    cdef double q = p / (p - 1.0)

    x_arr = np.empty(n, dtype=np.complex128)
    xbest_arr = np.empty(n, dtype=np.complex128)
    y_arr = np.empty(n, dtype=np.complex128)
    u_arr = np.empty(n, dtype=np.complex128)
    g_arr = np.empty(n, dtype=np.complex128)
    bn_arr = np.empty(nb, dtype=np.float64)

    cdef double complex[::1] x = x_arr
    cdef double complex[::1] xbest = xbest_arr
    cdef double complex[::1] y = y_arr
    cdef double complex[::1] u = u_arr
    cdef double complex[::1] g = g_arr
    cdef double[::1] bn = bn_arr

    cdef Py_ssize_t j
    cdef int it = 0
    cdef double nx, ny, ng, prev = -1.0, best = -1.0
    cdef bint converged = False

    _block_norms(x0, starts, bn)
    nx = _pnorm(bn, p)
    if nx == 0.0:
        raise ValueError("power iteration needs a nonzero start vector")
    for j in range(n):
        x[j] = x0[j] / nx
        xbest[j] = x[j]

    with nogil:
        for it in range(1, max_iter + 1):
            _csr_matvec(adata, aind, aptr, x, y)
            _block_norms(y, starts, bn)
            ny = _pnorm(bn, p)
            if ny > best:
                best = ny
                for j in range(n):
                    xbest[j] = x[j]
            if ny == 0.0:
                break
            if prev >= 0.0 and fabs(ny - prev) <= tol * (ny if ny > 1.0 else 1.0):
                converged = True
                break
            prev = ny
            _duality_scale(y, starts, bn, ny, p, u)
            _csr_matvec(hdata, hind, hptr, u, g)
            _block_norms(g, starts, bn)
            ng = _pnorm(bn, q)
            if ng == 0.0:
                break
            _duality_scale(g, starts, bn, ng, q, x)

    if best < 0.0:
        best = 0.0
    return xbest_arr, best, it, converged

# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled RK4 transport kernel; same contract as ``_kernels_py.rk4_sweep``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline void _matmul(double complex[:, :] A, double complex* Y,
                         double complex* out, Py_ssize_t n, Py_ssize_t m) noexcept nogil:
    cdef Py_ssize_t r, c, q
    cdef double complex acc
    for r in range(n):
        for c in range(m):
            acc = 0
            for q in range(n):
                acc = acc + A[r, q] * Y[q * m + c]
            out[r * m + c] = acc


def rk4_sweep(G, Y0, double tau):
    cdef double complex[:, :, :, :, ::1] g = np.ascontiguousarray(G, dtype=np.complex128)
    cdef double complex[:, :, ::1] y0 = np.ascontiguousarray(Y0, dtype=np.complex128)
    cdef Py_ssize_t B = g.shape[0], K = g.shape[1], S2 = g.shape[2], n = g.shape[3]
    cdef Py_ssize_t m = y0.shape[2]
    cdef Py_ssize_t nsub = (S2 - 1) // 2
    out_arr = np.empty((B, K + 1, n, m), dtype=np.complex128)
    cdef double complex[:, :, :, ::1] out = out_arr
    cdef double complex[::1] work = np.empty(6 * n * m, dtype=np.complex128)
    cdef double complex* Y = &work[0]
    cdef double complex* k1 = Y + n * m
    cdef double complex* k2 = k1 + n * m
    cdef double complex* k3 = k2 + n * m
    cdef double complex* k4 = k3 + n * m
    cdef double complex* tmp = k4 + n * m
    cdef Py_ssize_t b, k, s, e, nm = n * m
    cdef double half = 0.5 * tau, sixth = tau / 6.0
    with nogil:
        for b in range(B):
            for e in range(nm):
                Y[e] = y0[b, e // m, e % m]
                out[b, 0, e // m, e % m] = Y[e]
            for k in range(K):
                for s in range(nsub):
                    _matmul(g[b, k, 2 * s], Y, k1, n, m)
                    for e in range(nm):
                        tmp[e] = Y[e] + half * k1[e]
                    _matmul(g[b, k, 2 * s + 1], tmp, k2, n, m)
                    for e in range(nm):
                        tmp[e] = Y[e] + half * k2[e]
                    _matmul(g[b, k, 2 * s + 1], tmp, k3, n, m)
                    for e in range(nm):
                        tmp[e] = Y[e] + tau * k3[e]
                    _matmul(g[b, k, 2 * s + 2], tmp, k4, n, m)
                    for e in range(nm):
                        Y[e] = Y[e] + sixth * (k1[e] + 2.0 * k2[e] + 2.0 * k3[e] + k4[e])
                for e in range(nm):
                    out[b, k + 1, e // m, e % m] = Y[e]
    return out_arr

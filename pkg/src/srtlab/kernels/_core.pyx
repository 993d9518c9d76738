# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled backprojection kernels (OpenMP over image points).

Semantics match kernels.pykernels exactly: cubic Lagrange interpolation in
the radius variable on stencil offsets {-1, 0, 1, 2}, detectors accumulated
in index order per image point (results independent of thread count).
"""

from cython.parallel import prange
from libc.math cimport sqrt, floor

import numpy as np

BACKEND = "cython"


cdef inline double _interp_row(const double* g, double u) noexcept nogil:
    cdef Py_ssize_t j = <Py_ssize_t> floor(u)
    cdef double s = u - j
    cdef double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0
    cdef double w1 = (s * s - 1.0) * (s - 2.0) / 2.0
    cdef double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0
    cdef double w3 = s * (s * s - 1.0) / 6.0
    return w0 * g[j - 1] + w1 * g[j] + w2 * g[j + 1] + w3 * g[j + 2]


def backproject_2d(double[:, ::1] values, double t_start, double t_step,
                   double[::1] z, double[::1] wz,
                   double[::1] x1, double[::1] x2, int nthreads=1):
    cdef Py_ssize_t nz = z.shape[0]
    cdef Py_ssize_t nt = values.shape[1]
    cdef Py_ssize_t n1 = x1.shape[0]
    cdef Py_ssize_t n2 = x2.shape[0]
    out_arr = np.zeros((n1, n2))
    flag_arr = np.zeros(1, dtype=np.intc)
    cdef double[:, ::1] out = out_arr
    cdef int[::1] flag = flag_arr
    cdef Py_ssize_t ip, i1, i2, iz
    cdef double d2, dist, u, acc, xx1, xx2
    cdef double umax = nt - 2.0
    cdef int nth = nthreads if nthreads > 0 else 1

    for ip in prange(n1 * n2, nogil=True, schedule="static", num_threads=nth):
        i1 = ip // n2
        i2 = ip - i1 * n2
        xx1 = x1[i1]
        xx2 = x2[i2]
        acc = 0.0
        for iz in range(nz):
            d2 = xx2 - z[iz]
            dist = sqrt(xx1 * xx1 + d2 * d2)
            u = (dist - t_start) / t_step
            if u < 1.0 or u >= umax:
                flag[0] = 1
                break
            acc = acc + wz[iz] * _interp_row(&values[iz, 0], u)
        out[i1, i2] = acc
    if flag_arr[0]:
        raise ValueError("backprojection radius outside the sampled t range")
    return out_arr


def backproject_3d(double[:, :, ::1] values, double t_start, double t_step,
                   double[::1] z2, double[::1] z3,
                   double[::1] w2, double[::1] w3,
                   double[::1] x1, double[::1] x2, double[::1] x3,
                   int nthreads=1):
    cdef Py_ssize_t nz2 = z2.shape[0]
    cdef Py_ssize_t nz3 = z3.shape[0]
    cdef Py_ssize_t nt = values.shape[2]
    cdef Py_ssize_t n1 = x1.shape[0]
    cdef Py_ssize_t n2 = x2.shape[0]
    cdef Py_ssize_t n3 = x3.shape[0]
    out_arr = np.zeros((n1, n2, n3))
    flag_arr = np.zeros(1, dtype=np.intc)
    cdef double[:, :, ::1] out = out_arr
    cdef int[::1] flag = flag_arr
    cdef Py_ssize_t ip, i1, i2, i3, i23, iz2, iz3
    cdef double dist, u, acc, xx1sq, xx2, xx3, d2, d3, base
    cdef double umax = nt - 2.0
    cdef int nth = nthreads if nthreads > 0 else 1

    for ip in prange(n1 * n2 * n3, nogil=True, schedule="static",
                     num_threads=nth):
        i1 = ip // (n2 * n3)
        i23 = ip - i1 * (n2 * n3)
        i2 = i23 // n3
        i3 = i23 - i2 * n3
        xx1sq = x1[i1] * x1[i1]
        xx2 = x2[i2]
        xx3 = x3[i3]
        acc = 0.0
        for iz2 in range(nz2):
            d2 = xx2 - z2[iz2]
            base = xx1sq + d2 * d2
            for iz3 in range(nz3):
                d3 = xx3 - z3[iz3]
                dist = sqrt(base + d3 * d3)
                u = (dist - t_start) / t_step
                if u < 1.0 or u >= umax:
                    flag[0] = 1
                    break
                acc = acc + (w2[iz2] * w3[iz3]) * _interp_row(
                    &values[iz2, iz3, 0], u)
            if flag[0]:
                break
        out[i1, i2, i3] = acc
    if flag_arr[0]:
        raise ValueError("backprojection radius outside the sampled t range")
    return out_arr

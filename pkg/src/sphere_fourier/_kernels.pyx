# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled quadrature kernels with compensated reductions.

Each output entry is reduced sequentially in node order; threads only split
independent output rows, so results are bit-identical for any thread count.
"""

import numpy as np

from libc.math cimport cos, sin, fabs
from cython.parallel cimport prange


cdef inline void _acc(double* s, double* c, double v) noexcept nogil:
    # branch-free TwoSum; the rounding error of s + v goes into c
    cdef double t = s[0] + v
    cdef double z = t - s[0]
    c[0] += (s[0] - (t - z)) + (v - z)
    s[0] = t


def weighted_sum(const double complex[:, ::1] values, const double[::1] weights, int num_threads=1):
    cdef Py_ssize_t F = values.shape[0], N = values.shape[1], f, i
    cdef double sr, si, cr, ci, w
    out = np.empty(F, dtype=np.complex128)
    cdef double complex[::1] o = out
    with nogil:
        for f in prange(F, num_threads=max(num_threads, 1), schedule="static"):
            sr = 0.0
            si = 0.0
            cr = 0.0
            ci = 0.0
            for i in range(N):
                w = weights[i]
                _acc(&sr, &cr, w * values[f, i].real)
                _acc(&si, &ci, w * values[f, i].imag)
            o[f] = (sr + cr) + 1j * (si + ci)
    return out


def projections(const double[:, ::1] cart, const double[:, ::1] dirs):
    cdef Py_ssize_t N = cart.shape[0], d = cart.shape[1], P = dirs.shape[0], p, i, j
    out = np.zeros((P, N), dtype=np.float64)
    cdef double[:, ::1] s = out
    for p in range(P):
        for j in range(d):
            for i in range(N):
                s[p, i] = s[p, i] + dirs[p, j] * cart[i, j]
    return out


DEF BLOCK = 512
DEF LANES = 4


def plane_wave_moments(const double complex[:, ::1] values, const double[::1] weights,
                       const double[:, ::1] cart, const double[:, ::1] dirs,
                       const double[::1] rhos, int num_threads=1):
    # Nodes are visited in fixed-size blocks so each row of ``values`` is
    # streamed once, and LANES phase columns share one pass over a row.
    # Within a block terms are summed in node order; block partials are
    # folded into the running total with TwoSum compensation.
    cdef Py_ssize_t F = values.shape[0], N = values.shape[1]
    cdef Py_ssize_t P = dirs.shape[0], R = rhos.shape[0], Q = P * R
    cdef Py_ssize_t Qp = ((Q + LANES - 1) // LANES) * LANES
    cdef Py_ssize_t f, i, q, g, lane, lo, hi, nb
    cdef double vr, vi, er, ei, arg
    cdef double sr[LANES]
    cdef double si[LANES]
    cdef double[:, ::1] s = projections(cart, dirs)
    cdef double[:, ::1] ph_re = np.zeros((Qp, BLOCK), dtype=np.float64)
    cdef double[:, ::1] ph_im = np.zeros((Qp, BLOCK), dtype=np.float64)
    acc = np.zeros((4, F, Qp), dtype=np.float64)
    cdef double[:, :, ::1] a = acc
    for lo in range(0, N, BLOCK):
        hi = min(lo + BLOCK, N)
        nb = hi - lo
        for q in range(Q):
            for i in range(nb):
                arg = rhos[q % R] * s[q // R, lo + i]
                ph_re[q, i] = weights[lo + i] * cos(arg)
                ph_im[q, i] = weights[lo + i] * sin(arg)
        with nogil:
            for f in prange(F, num_threads=max(num_threads, 1), schedule="static"):
                for g in range(0, Qp, LANES):
                    for lane in range(LANES):
                        sr[lane] = 0.0
                        si[lane] = 0.0
                    for i in range(nb):
                        vr = values[f, lo + i].real
                        vi = values[f, lo + i].imag
                        for lane in range(LANES):
                            er = ph_re[g + lane, i]
                            ei = ph_im[g + lane, i]
                            sr[lane] += vr * er - vi * ei
                            si[lane] += vr * ei + vi * er
                    for lane in range(LANES):
                        _acc(&a[0, f, g + lane], &a[1, f, g + lane], sr[lane])
                        _acc(&a[2, f, g + lane], &a[3, f, g + lane], si[lane])
    out = (acc[0, :, :Q] + acc[1, :, :Q]) + 1j * (acc[2, :, :Q] + acc[3, :, :Q])
    return out.reshape(F, P, R)

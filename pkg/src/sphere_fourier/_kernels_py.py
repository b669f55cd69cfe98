"""Numpy reference implementation of the quadrature kernels.

Reductions use ``np.sum`` along the contiguous node axis (pairwise
summation), so results are reproducible run to run.
"""

import numpy as np

_CHUNK = 1 << 21  # complex entries per temporary block


def _rows_per_block(F, N):
    return max(1, min(F, _CHUNK // max(N, 1)))


def weighted_sum(values, weights, num_threads=1):
    values = np.ascontiguousarray(values, dtype=complex)
    weights = np.ascontiguousarray(weights, dtype=float)
    F, N = values.shape
    out = np.empty(F, dtype=complex)
    step = _rows_per_block(F, N)
    for lo in range(0, F, step):
        out[lo:lo + step] = np.sum(values[lo:lo + step] * weights, axis=1)
    return out


def projections(cart, dirs):
    """``s[p, i] = dirs[p] . cart[i]`` accumulated coordinate by coordinate."""
    cart = np.ascontiguousarray(cart, dtype=float)
    dirs = np.ascontiguousarray(dirs, dtype=float)
    s = np.zeros((dirs.shape[0], cart.shape[0]))
    for j in range(cart.shape[1]):
        s += dirs[:, j:j + 1] * cart[:, j]
    return s


def plane_wave_moments(values, weights, cart, dirs, rhos, num_threads=1):
    """``out[f, p, r] = sum_i w_i values[f, i] exp(1j rhos[r] dirs[p] . cart[i])``."""
    values = np.ascontiguousarray(values, dtype=complex)
    weights = np.ascontiguousarray(weights, dtype=float)
    rhos = np.ascontiguousarray(rhos, dtype=float)
    F, N = values.shape
    P, R = dirs.shape[0], rhos.shape[0]
    out = np.empty((F, P, R), dtype=complex)
    s_all = projections(cart, dirs)
    step = _rows_per_block(F, N)
    for p in range(P):
        s = s_all[p]
        for r in range(R):
            arg = rhos[r] * s
            phase = weights * (np.cos(arg) + 1j * np.sin(arg))
            for lo in range(0, F, step):
                out[lo:lo + step, p, r] = np.sum(values[lo:lo + step] * phase, axis=1)
    return out

"""Backend selection for the quadrature kernels.

The compiled extension is used when it was built; ``SPHERE_FOURIER_PURE=1``
forces the numpy implementation.  ``SPHERE_FOURIER_THREADS`` caps the
number of worker threads the compiled kernels may use.
"""

import os

import numpy as np

from . import _kernels_py

if os.environ.get("SPHERE_FOURIER_PURE", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"


def thread_count() -> int:
    raw = os.environ.get("SPHERE_FOURIER_THREADS", "")
    try:
        cap = int(raw)
    except ValueError:
        cap = 0
    avail = os.cpu_count() or 1
    return max(1, min(cap, avail)) if cap > 0 else 1


def weighted_sum(values, weights, backend=None):
    impl = _pick(backend)
    return impl.weighted_sum(
        np.ascontiguousarray(values, dtype=complex),
        np.ascontiguousarray(weights, dtype=float),
        num_threads=thread_count(),
    )


def plane_wave_moments(values, weights, cart, dirs, rhos, backend=None):
    """Stack of integrals ``sum_i w_i v_f(x_i) exp(1j rho p . x_i)``, shape (F, P, R)."""
    impl = _pick(backend)
    return impl.plane_wave_moments(
        np.ascontiguousarray(values, dtype=complex),
        np.ascontiguousarray(weights, dtype=float),
        np.ascontiguousarray(cart, dtype=float),
        np.ascontiguousarray(np.atleast_2d(dirs), dtype=float),
        np.ascontiguousarray(np.atleast_1d(rhos), dtype=float),
        num_threads=thread_count(),
    )


def _pick(backend):
    if backend is None:
        return _impl
    if backend == "python":
        return _kernels_py
    if backend == "cython":
        if BACKEND != "cython":
            raise RuntimeError("compiled kernels are not available")
        return _impl
    raise ValueError(f"unknown backend {backend!r}")

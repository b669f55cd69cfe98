"""Points, charts and product quadrature on S^n.

Angles follow the chart ``(theta_n, ..., theta_2, phi)``::

    x_1     = cos(theta_n)
    x_2     = sin(theta_n) cos(theta_{n-1})
    ...
    x_n     = sin(theta_n) ... sin(theta_2) cos(phi)
    x_{n+1} = sin(theta_n) ... sin(theta_2) sin(phi)

with every ``theta_i`` in ``[0, pi]`` and ``phi`` in ``[0, 2 pi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .exceptions import DomainError, ResolutionError
from .specfun import gamma, sphere_volume

__all__ = [
    "SpherePoint",
    "QuadratureGrid",
    "sph_to_cart",
    "cart_to_sph",
    "gauss_legendre",
    "gauss_gegenbauer",
    "sphere_grid",
    "great_subsphere_grid",
    "integrate_sphere",
    "random_points",
    "random_rotation",
]

_TWO_PI = 2.0 * math.pi
_ANGLE_SLACK = 1e-12


def _check_angles(angles: np.ndarray, n: int) -> None:
    if angles.shape[-1] != n:
        raise DomainError(f"S^{n} needs {n} angles, got {angles.shape[-1]}")
    polar = angles[..., :-1]
    phi = angles[..., -1]
    if np.any(polar < -_ANGLE_SLACK) or np.any(polar > math.pi + _ANGLE_SLACK):
        raise DomainError("polar angles must lie in [0, pi]")
    if np.any(phi < -_ANGLE_SLACK) or np.any(phi >= _TWO_PI + _ANGLE_SLACK):
        raise DomainError("phi must lie in [0, 2 pi)")


def sph_to_cart(angles, n: int) -> np.ndarray:
    """Map chart angles ``(..., n)`` to unit vectors ``(..., n + 1)``."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    a = np.asarray(angles, dtype=float)
    if a.ndim == 0:
        a = a.reshape(1)
    _check_angles(a, n)
    out = np.empty(a.shape[:-1] + (n + 1,))
    tail = np.ones(a.shape[:-1])
    for col in range(n - 1):
        th = a[..., col]
        out[..., col] = tail * np.cos(th)
        tail = tail * np.sin(th)
    phi = a[..., -1]
    out[..., n - 1] = tail * np.cos(phi)
    out[..., n] = tail * np.sin(phi)
    return out


def cart_to_sph(x, n: Optional[int] = None) -> np.ndarray:
    """Inverse chart.  Angles left undetermined at a pole are set to 0."""
    v = np.asarray(x, dtype=float)
    if n is None:
        n = v.shape[-1] - 1
    if v.shape[-1] != n + 1 or n < 1:
        raise DomainError(f"expected vectors of length {n + 1}")
    norm = np.linalg.norm(v, axis=-1)
    if np.any(np.abs(norm - 1.0) > 1e-12):
        raise DomainError("cart_to_sph needs unit vectors")
    out = np.empty(v.shape[:-1] + (n,))
    # r[..., j] = |x_{j+1..n+1}|, accumulated from the end for accuracy
    sq = np.cumsum((v * v)[..., ::-1], axis=-1)[..., ::-1]
    r = np.sqrt(sq)
    for col in range(n - 1):
        rest = r[..., col + 1]
        ang = np.arctan2(rest, v[..., col])
        out[..., col] = np.where(r[..., col] == 0.0, 0.0, ang)
    phi = np.arctan2(v[..., n], v[..., n - 1])
    phi = np.where(r[..., n - 1] == 0.0, 0.0, phi)
    phi = np.where(phi < 0.0, phi + _TWO_PI, phi)
    phi = np.where(phi >= _TWO_PI, 0.0, phi)
    out[..., n - 1] = phi + 0.0  # normalises -0.0
    return out


@dataclass(frozen=True)
class SpherePoint:
    """A point on S^n carrying both its chart angles and unit vector."""

    n: int
    angles: tuple
    cart: np.ndarray = field(repr=False, compare=False)

    @classmethod
    def from_angles(cls, angles: Sequence[float], n: Optional[int] = None) -> "SpherePoint":
        a = np.atleast_1d(np.asarray(angles, dtype=float))
        n = a.shape[-1] if n is None else n
        c = sph_to_cart(a, n)
        c.setflags(write=False)
        return cls(n, tuple(float(t) for t in a), c)

    @classmethod
    def from_cart(cls, x: Sequence[float]) -> "SpherePoint":
        v = np.asarray(x, dtype=float)
        n = v.shape[-1] - 1
        a = cart_to_sph(v, n)
        c = v.copy()
        c.setflags(write=False)
        return cls(n, tuple(float(t) for t in a), c)

    def antipode(self) -> "SpherePoint":
        return SpherePoint.from_cart(-self.cart)

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.cart, dtype=dtype)


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and positive weights for a product rule on a (sub)sphere.

    ``n`` is always the dimension of the ambient sphere the nodes live on;
    for a great-subsphere grid the nodes span an S^{n-1} orthogonal to
    ``pole``.
    """

    n: int
    cart: np.ndarray
    weights: np.ndarray
    degree: int
    res: int
    kind: str = "full-sphere"
    pole: Optional[SpherePoint] = None

    def __len__(self) -> int:
        return self.weights.shape[0]

    @property
    def angles(self) -> np.ndarray:
        return cart_to_sph(self.cart, self.n)

    @property
    def nodes(self) -> list:
        return [SpherePoint.from_cart(c) for c in self.cart]

    @property
    def volume(self) -> float:
        return sphere_volume(self.n if self.kind == "full-sphere" else self.n - 1)


def gauss_legendre(N: int):
    """Gauss-Legendre nodes (ascending) and weights on [-1, 1] by Newton's method."""
    if N < 1:
        raise ResolutionError(f"need N >= 1, got {N}")
    half = (N + 1) // 2
    x = np.cos(math.pi * (np.arange(1, half + 1) - 0.25) / (N + 0.5))
    for _ in range(100):
        p0, p1 = np.ones_like(x), x.copy()
        for j in range(2, N + 1):
            p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
        if N == 1:
            p1, p0 = x.copy(), np.ones_like(x)
        dp = N * (x * p1 - p0) / (x * x - 1.0)
        dx = p1 / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(2, N + 1):
        p0, p1 = p1, ((2 * j - 1) * x * p1 - (j - 1) * p0) / j
    if N == 1:
        p0 = np.ones_like(x)
        p1 = x.copy()
    dp = N * (x * p1 - p0) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    if N % 2:
        x[-1] = 0.0
    nodes = np.concatenate([-x, x[::-1][N % 2:]])
    weights = np.concatenate([w, w[::-1][N % 2:]])
    return nodes, weights


def _orthonormal_gegenbauer(x: np.ndarray, N: int, a: float):
    # q_0..q_N orthonormal for weight (1 - t^2)^a, plus q_N' and sum q_m^2, m < N
    lam = a + 0.5
    mu0 = math.sqrt(math.pi) * gamma(a + 1.0) / gamma(a + 1.5)

    def b(m):
        if m == 1:
            return math.sqrt(1.0 / (2.0 * (1.0 + lam)))
        return math.sqrt(m * (m + 2 * lam - 1) / (4.0 * (m + lam) * (m + lam - 1)))

    q_prev = np.zeros_like(x)
    q = np.full_like(x, 1.0 / math.sqrt(mu0))
    d_prev = np.zeros_like(x)
    d = np.zeros_like(x)
    sq = q * q
    for m in range(N):
        bm1 = b(m + 1)
        bm = b(m) if m > 0 else 0.0
        q_new = (x * q - bm * q_prev) / bm1
        d_new = (q + x * d - bm * d_prev) / bm1
        q_prev, q = q, q_new
        d_prev, d = d, d_new
        if m + 1 < N:
            sq = sq + q * q
    return q, d, sq


def gauss_gegenbauer(N: int, a: float):
    """Gauss rule on [-1, 1] for the weight ``(1 - t^2)^a``, ``a > -1``.

    Nodes start from the eigenvalues of the Jacobi matrix, are polished by
    Newton's method, and the weights come from the Christoffel function.
    ``a = 0`` reproduces Gauss-Legendre.
    """
    if N < 1:
        raise ResolutionError(f"need N >= 1, got {N}")
    if not a > -1.0:
        raise DomainError(f"weight exponent must exceed -1, got {a}")
    return _gauss_gegenbauer_cached(int(N), float(a))


@lru_cache(maxsize=256)
def _gauss_gegenbauer_cached(N: int, a: float):
    lam = a + 0.5
    off = np.array(
        [math.sqrt(1.0 / (2.0 * (1.0 + lam)))]
        + [math.sqrt(m * (m + 2 * lam - 1) / (4.0 * (m + lam) * (m + lam - 1))) for m in range(2, N)]
    )[: N - 1]
    J = np.diag(off, 1) + np.diag(off, -1)
    x = np.sort(np.linalg.eigvalsh(J)) if N > 1 else np.zeros(1)
    for _ in range(5):
        q, d, _ = _orthonormal_gegenbauer(x, N, a)
        step = np.where(d != 0.0, q / np.where(d != 0.0, d, 1.0), 0.0)
        x = x - step
        if np.max(np.abs(step)) < 1e-16:
            break
    x = 0.5 * (x - x[::-1])
    _, _, sq = _orthonormal_gegenbauer(x, N, a)
    w = 1.0 / sq
    w = 0.5 * (w + w[::-1])
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def _sphere_rule(m: int, res: int):
    # (cart, weights) of the product rule on S^m, m >= 1
    k = np.arange(2 * res)
    phi = math.pi * k / res
    cart = np.stack([np.cos(phi), np.sin(phi)], axis=1)
    w = np.full(2 * res, math.pi / res)
    for i in range(2, m + 1):
        t, wt = gauss_gegenbauer(res, (i - 2) / 2.0)
        s = np.sqrt((1.0 - t) * (1.0 + t))
        # new leading coordinate t, previous sphere scaled by sin
        lead = np.repeat(t, cart.shape[0])
        scaled = (s[:, None, None] * cart[None, :, :]).reshape(-1, cart.shape[1])
        cart = np.concatenate([lead[:, None], scaled], axis=1)
        w = (wt[:, None] * w[None, :]).reshape(-1)
    return cart, w


@lru_cache(maxsize=64)
def sphere_grid(n: int, res: int) -> QuadratureGrid:
    """Product rule on S^n: Gauss rules in each ``cos(theta_i)`` and 2*res
    equispaced points in ``phi``.  Exact for polynomials of degree
    ``2*res - 1``.

    The polar rule for ``theta_i`` carries the weight ``(1 - t^2)^{(i-2)/2}``
    coming from the ``sin^{i-1}`` surface element, so it is Gauss-Legendre
    on S^2 and Gauss-Gegenbauer above.
    """
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if res < 2:
        raise ResolutionError(f"res must be >= 2, got {res}")
    cart, w = _sphere_rule(n, res)
    cart.setflags(write=False)
    w.setflags(write=False)
    return QuadratureGrid(n=n, cart=cart, weights=w, degree=2 * res - 1, res=res)


def _complement_frame(p: np.ndarray) -> np.ndarray:
    # Orthonormal basis (rows) of p's orthogonal complement by Gram-Schmidt
    # on the coordinate axes, skipping the axis where |p| is largest.
    d = p.shape[0]
    skip = int(np.argmax(np.abs(p)))
    frame = []
    for j in range(d):
        if j == skip:
            continue
        v = np.zeros(d)
        v[j] = 1.0
        for _ in range(2):  # re-orthogonalise once
            v = v - np.dot(v, p) * p
            for e in frame:
                v = v - np.dot(v, e) * e
        frame.append(v / np.linalg.norm(v))
    return np.array(frame)


def great_subsphere_grid(p, res: int, frame: Optional[np.ndarray] = None) -> QuadratureGrid:
    """Quadrature on ``{theta in S^n : theta . p = 0}``, total weight vol(S^{n-1}).

    ``frame`` optionally supplies another orthonormal basis (rows) of the
    complement of ``p``; the default is Gram-Schmidt on coordinate axes.
    """
    pt = p if isinstance(p, SpherePoint) else SpherePoint.from_cart(p)
    v = np.asarray(pt.cart, dtype=float)
    if abs(np.linalg.norm(v) - 1.0) > 1e-12:
        raise DomainError("great_subsphere_grid needs a unit vector")
    n = pt.n
    if res < 2:
        raise ResolutionError(f"res must be >= 2, got {res}")
    E = _complement_frame(v) if frame is None else np.asarray(frame, dtype=float)
    if E.shape != (n, n + 1) or np.max(np.abs(E @ v)) > 1e-12 or np.max(np.abs(E @ E.T - np.eye(n))) > 1e-12:
        raise DomainError("frame must be an orthonormal basis of the complement of p")
    if n == 1:
        cart = np.stack([E[0], -E[0]])
        w = np.ones(2)
        degree = 1
    else:
        sub_cart, w = _sphere_rule(n - 1, res)
        cart = sub_cart @ E
        w = w.copy()
        degree = 2 * res - 1
    cart.setflags(write=False)
    w.setflags(write=False)
    return QuadratureGrid(n=n, cart=cart, weights=w, degree=degree, res=res, kind="great-subsphere", pole=pt)


def integrate_sphere(f: Callable[[np.ndarray], np.ndarray], grid: QuadratureGrid):
    """Weighted sum of ``f`` over the grid.

    ``f`` receives the ``(N, n+1)`` array of nodes and returns ``N`` values
    (or a ``(F, N)`` stack, giving ``F`` integrals).  The reduction is
    compensated and runs in node order, so the result does not depend on
    how many worker threads the kernel uses.
    """
    vals = np.asarray(f(grid.cart))
    squeeze = vals.ndim == 1
    vals = np.ascontiguousarray(np.atleast_2d(vals), dtype=complex)
    if vals.shape[1] != len(grid):
        raise ValueError(f"f returned {vals.shape[1]} values for {len(grid)} nodes")
    out = kernels.weighted_sum(vals, grid.weights)
    return complex(out[0]) if squeeze else out


def random_points(n: int, count: int, seed: int = 0) -> list:
    """Seeded, uniformly distributed points on S^n."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((count, n + 1))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    return [SpherePoint.from_cart(v) for v in g]


def random_rotation(d: int, seed: int = 0) -> np.ndarray:
    """Haar-distributed element of SO(d)."""
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((d, d)))
    q = q * np.sign(np.diag(r))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q

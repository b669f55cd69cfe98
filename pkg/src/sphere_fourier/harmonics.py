"""Orthonormal hyperspherical harmonics on S^n.

Basis functions are products of associated Gegenbauer factors, one per
polar angle, and a circular harmonic in ``phi``.  A function of degree k is
labelled by a chain ``k = l_n >= l_{n-1} >= ... >= l_2 >= |l_1|``; the
intra-degree index m counts chains in lexicographic order of
``(l_{n-1}, ..., l_2)`` ascending, then ``l_1`` in the order
``0, 1, -1, 2, -2, ...``.

Each factor ``sin^{l'}(theta) C_d^a(cos theta)`` is evaluated in its
homogeneous form ``r^d C_d^a(x / r)`` directly from Cartesian coordinates,
which keeps evaluation free of divisions near the poles and makes every
basis function literally a homogeneous polynomial in x.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np

from .exceptions import DomainError, IndexOutOfRange
from .specfun import gamma, gegenbauer, sphere_volume
from .sphere import SpherePoint, sph_to_cart

__all__ = [
    "HarmonicIndex",
    "HarmonicBasis",
    "harmonic_space_dim",
    "harmonic_space_dim_printed",
    "harmonic_dim_bruteforce",
    "eigenvalue",
    "eval_harmonic",
    "parity_check",
    "addition_theorem_kernel",
    "laplacian_eigen_check",
    "rotate_basis",
]


def harmonic_space_dim(k: int, n: int) -> int:
    """Dimension of the degree-k spherical harmonics on S^n."""
    if k < 0 or n < 1:
        raise DomainError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    lower = math.comb(n + k - 2, k - 2) if k >= 2 else 0
    return math.comb(n + k, k) - lower


def harmonic_space_dim_printed(k: int, n: int) -> int:
    """The same count with a plus sign, ``C(n+k, k) + C(n+k-2, k-2)``.

    Kept only so reports can show how far it is from the true dimension.
    """
    lower = math.comb(n + k - 2, k - 2) if k >= 2 else 0
    return math.comb(n + k, k) + lower


def _monomials(nvars: int, degree: int):
    return [e for e in itertools.product(range(degree + 1), repeat=nvars) if sum(e) == degree]


def harmonic_dim_bruteforce(k: int, n: int) -> int:
    """Dimension of harmonic homogeneous degree-k polynomials on R^{n+1}.

    Counts monomials of degree k and subtracts the rank of the Laplacian
    onto degree k - 2.
    """
    nv = n + 1
    src = _monomials(nv, k)
    if k < 2:
        return len(src)
    dst = {e: i for i, e in enumerate(_monomials(nv, k - 2))}
    L = np.zeros((len(dst), len(src)))
    for j, e in enumerate(src):
        for v in range(nv):
            if e[v] >= 2:
                t = list(e)
                t[v] -= 2
                L[dst[tuple(t)], j] += e[v] * (e[v] - 1)
    return len(src) - int(np.linalg.matrix_rank(L))


def eigenvalue(k: int, n: int) -> int:
    """``mu_{k,n} = k (n + k - 1)``; the spherical Laplacian acts as ``-mu``."""
    return k * (n + k - 1)


@dataclass(frozen=True)
class HarmonicIndex:
    n: int
    k: int
    m: int

    def __post_init__(self):
        if self.n < 1 or self.k < 0:
            raise IndexOutOfRange(f"invalid (n, k) = ({self.n}, {self.k})")
        dim = harmonic_space_dim(self.k, self.n)
        if not 1 <= self.m <= dim:
            raise IndexOutOfRange(f"m={self.m} outside 1..{dim} for k={self.k}, n={self.n}")

    @property
    def mu(self) -> int:
        return eigenvalue(self.k, self.n)

    @property
    def dim(self) -> int:
        return harmonic_space_dim(self.k, self.n)


def _signed_order(top: int):
    yield 0
    for a in range(1, top + 1):
        yield a
        yield -a


@lru_cache(maxsize=None)
def chains(k: int, n: int) -> tuple:
    """Lexicographic chains ``(l_{n-1}, ..., l_2, l_1)`` of degree k on S^n."""
    if n == 1:
        return ((0,),) if k == 0 else ((k,), (-k,))

    def walk(top, depth):
        # depth = number of unsigned levels still to choose
        if depth == 0:
            for l1 in _signed_order(top):
                yield (l1,)
            return
        for lv in range(top + 1):
            for rest in walk(lv, depth - 1):
                yield (lv,) + rest

    return tuple(walk(k, n - 2))


def _factor_norm(alpha: float, d: int) -> float:
    # integral over [-1, 1] of (1-t^2)^{alpha-1/2} C_d^alpha(t)^2
    return math.pi * 2.0 ** (1.0 - 2.0 * alpha) * gamma(d + 2.0 * alpha) / (
        math.factorial(d) * (d + alpha) * gamma(alpha) ** 2
    )


@lru_cache(maxsize=None)
def _chain_norm(k: int, n: int, chain: tuple) -> float:
    levels = (k,) + chain[:-1] + (abs(chain[-1]),)
    c = 1.0 / math.sqrt(2.0 * math.pi)
    for i in range(n, 1, -1):
        upper = levels[n - i]
        lower = levels[n - i + 1]
        alpha = lower + (i - 1) / 2.0
        c /= math.sqrt(_factor_norm(alpha, upper - lower))
    return c


def _homogeneous_gegenbauer(alpha: float, d: int, u: np.ndarray, r2: np.ndarray) -> np.ndarray:
    # r^d C_d^alpha(u / r) with r^2 = r2
    prev = np.ones_like(u)
    if d == 0:
        return prev
    cur = 2.0 * alpha * u
    for j in range(1, d):
        prev, cur = cur, (2.0 * (j + alpha) * u * cur - (j + 2.0 * alpha - 1.0) * r2 * prev) / (j + 1)
    return cur


def _eval_degree(k: int, n: int, x: np.ndarray, real: bool) -> np.ndarray:
    # (dim, N) values of all degree-k basis functions at points x (N, n+1)
    N = x.shape[0]
    # r2[:, j] = |x_{j..n}|^2 (0-based)
    r2 = np.cumsum((x * x)[:, ::-1], axis=1)[:, ::-1]
    ch = chains(k, n)
    out = np.empty((len(ch), N), dtype=float if real else complex)
    z = x[:, n - 1] + 1j * x[:, n]
    zpow = {0: np.ones(N, dtype=complex)}
    for a in range(1, k + 1):
        zpow[a] = zpow[a - 1] * z
    cache = {}
    for row, chain in enumerate(ch):
        levels = (k,) + chain[:-1] + (abs(chain[-1]),)
        val = np.full(N, _chain_norm(k, n, chain))
        for i in range(n, 1, -1):
            upper, lower = levels[n - i], levels[n - i + 1]
            alpha = lower + (i - 1) / 2.0
            key = (i, upper, lower)
            if key not in cache:
                cache[key] = _homogeneous_gegenbauer(alpha, upper - lower, x[:, n - i], r2[:, n - i])
            val = val * cache[key]
        l1 = chain[-1]
        a = abs(l1)
        if real:
            if l1 == 0:
                out[row] = val
            elif l1 > 0:
                out[row] = math.sqrt(2.0) * val * zpow[a].real
            else:
                out[row] = math.sqrt(2.0) * val * zpow[a].imag
        else:
            zz = zpow[a] if l1 >= 0 else np.conj(zpow[a])
            out[row] = val * zz
    return out


@dataclass(frozen=True, eq=False)
class HarmonicBasis:
    """Orthonormal basis of spherical harmonics on S^n up to ``max_degree``.

    ``real=True`` replaces ``e^{+-i l phi}`` by ``sqrt(2) cos / sin``.
    ``rotation`` (an element of SO(n+1)) defines ``Y~(x) = Y(R x)``.
    """

    n: int
    max_degree: int = 20
    real: bool = False
    rotation: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.n < 1 or self.max_degree < 0:
            raise DomainError("need n >= 1 and max_degree >= 0")
        if self.rotation is not None:
            R = np.array(self.rotation, dtype=float)
            _check_rotation(R, self.n + 1)
            R.setflags(write=False)
            object.__setattr__(self, "rotation", R)

    def dim(self, k: int) -> int:
        return harmonic_space_dim(k, self.n)

    def chains(self, k: int) -> tuple:
        return chains(k, self.n)

    def indices(self, k: int):
        return [HarmonicIndex(self.n, k, m) for m in range(1, self.dim(k) + 1)]

    def evaluate(self, k: int, x) -> np.ndarray:
        """All degree-k functions at the rows of ``x``; shape ``(dim, N)``."""
        if not 0 <= k <= self.max_degree:
            raise IndexOutOfRange(f"degree {k} outside 0..{self.max_degree}")
        pts = np.atleast_2d(np.asarray(x, dtype=float))
        if pts.shape[1] != self.n + 1:
            raise DomainError(f"points must have {self.n + 1} coordinates")
        if self.rotation is not None:
            pts = pts @ self.rotation.T
        return _eval_degree(k, self.n, pts, self.real)

    def __call__(self, idx: HarmonicIndex, x) -> np.ndarray:
        self._check(idx)
        return self.evaluate(idx.k, x)[idx.m - 1]

    def _check(self, idx: HarmonicIndex) -> None:
        if idx.n != self.n:
            raise IndexOutOfRange(f"index is for S^{idx.n}, basis is on S^{self.n}")
        if idx.k > self.max_degree:
            raise IndexOutOfRange(f"degree {idx.k} exceeds max_degree {self.max_degree}")


def _check_rotation(R: np.ndarray, d: int) -> None:
    if R.shape != (d, d):
        raise DomainError(f"rotation must be {d}x{d}")
    if np.max(np.abs(R @ R.T - np.eye(d))) > 1e-12 or abs(np.linalg.det(R) - 1.0) > 1e-12:
        raise DomainError("rotation must be orthogonal with determinant +1")


def _as_cart(point) -> np.ndarray:
    if isinstance(point, SpherePoint):
        return np.asarray(point.cart)
    return np.asarray(point, dtype=float)


def eval_harmonic(basis: HarmonicBasis, idx: HarmonicIndex, point) -> complex:
    """Value of ``Y_k^m`` at a single point."""
    if isinstance(point, SpherePoint) and point.n != idx.n:
        raise DomainError("point and index live on different spheres")
    return complex(basis(idx, _as_cart(point)[None, :])[0])


def parity_check(basis: HarmonicBasis, idx: HarmonicIndex, point):
    """``(Y(-x), (-1)^k Y(x))``."""
    x = _as_cart(point)
    vals = basis(idx, np.stack([-x, x]))
    return complex(vals[0]), complex((-1) ** idx.k * vals[1])


def addition_theorem_kernel(basis: HarmonicBasis, k: int, sigma, theta) -> complex:
    """``vol(S^n)/a_k * sum_m Y_k^m(sigma) conj(Y_k^m(theta))``."""
    vals = basis.evaluate(k, np.stack([_as_cart(sigma), _as_cart(theta)]))
    s = np.sum(vals[:, 0] * np.conj(vals[:, 1]))
    return complex(s * sphere_volume(basis.n) / basis.dim(k))


def addition_theorem_reference(basis: HarmonicBasis, k: int, sigma, theta) -> float:
    """Right-hand side ``P_{k,n}(sigma . theta)`` of the addition theorem."""
    t = float(np.dot(_as_cart(sigma), _as_cart(theta)))
    return gegenbauer(k, basis.n, max(-1.0, min(1.0, t)))


def _wrap_phi(phi: float) -> float:
    return phi % (2.0 * math.pi)


def laplacian_eigen_check(basis: HarmonicBasis, idx: HarmonicIndex, point, h: float):
    """Second-order finite-difference spherical Laplacian of ``Y`` at ``point``.

    Uses the chart recursion
    ``Lap_{S^i} f = sin^{1-i} d(sin^{i-1} df) + sin^{-2} Lap_{S^{i-1}} f``.
    Returns ``(fd_value, -mu_{k,n} * Y(point))``.
    """
    pt = point if isinstance(point, SpherePoint) else SpherePoint.from_cart(point)
    n = idx.n
    ang = np.array(pt.angles, dtype=float)
    polar = ang[:-1]
    if np.any(polar < 10 * h) or np.any(polar > math.pi - 10 * h):
        raise DomainError("point is within 10 h of a coordinate pole")

    def Y(a):
        a = a.copy()
        a[-1] = _wrap_phi(a[-1])
        return complex(basis(idx, sph_to_cart(a, n)[None, :])[0])

    f0 = Y(ang)
    total = 0.0 + 0.0j
    outer = 1.0  # product of sin^2 of already-processed outer angles
    for col in range(n - 1):
        i = n - col  # this angle is theta_i on S^i
        th = ang[col]
        e = np.zeros(n)
        e[col] = h
        fp, fm = Y(ang + e), Y(ang - e)
        sp = math.sin(th + h / 2) ** (i - 1)
        sm = math.sin(th - h / 2) ** (i - 1)
        s0 = math.sin(th) ** (i - 1)
        total += (sp * (fp - f0) - sm * (f0 - fm)) / (h * h * s0 * outer)
        outer *= math.sin(th) ** 2
    e = np.zeros(n)
    e[-1] = h
    total += (Y(ang + e) - 2.0 * f0 + Y(ang - e)) / (h * h * outer)
    return complex(total), complex(-idx.mu * f0)


def rotate_basis(basis: HarmonicBasis, R) -> HarmonicBasis:
    """Basis ``Y~(x) = Y(R x)``; composes with an existing rotation."""
    R = np.asarray(R, dtype=float)
    _check_rotation(R, basis.n + 1)
    if basis.rotation is not None:
        R = basis.rotation @ R
    return HarmonicBasis(basis.n, basis.max_degree, basis.real, R)

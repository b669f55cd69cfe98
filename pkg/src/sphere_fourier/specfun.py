"""Special functions on the half-integer order grid.

Bessel functions are only needed at orders ``k + (n - 1)/2``, so orders are
kept as the integer ``2 * nu`` to avoid drift between the integer and
half-integer cases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .exceptions import DomainError

__all__ = [
    "BesselOrder",
    "gamma",
    "bessel_j",
    "bessel_j_series",
    "gegenbauer",
    "gegenbauer_c",
    "sin_power_integral",
    "sphere_volume",
]

_SQRT_PI = math.sqrt(math.pi)


@dataclass(frozen=True, order=True)
class BesselOrder:
    """Bessel order stored as twice its value, so ``nu = twice / 2``."""

    twice: int

    def __post_init__(self):
        if not isinstance(self.twice, (int, np.integer)) or self.twice < 0:
            raise DomainError(f"Bessel order must be a non-negative half-integer, got twice={self.twice!r}")
        object.__setattr__(self, "twice", int(self.twice))

    @classmethod
    def from_kn(cls, k: int, n: int) -> "BesselOrder":
        """Order ``k + (n - 1)/2`` of the radial profile on S^n."""
        if k < 0 or n < 1:
            raise DomainError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
        return cls(2 * k + n - 1)

    @classmethod
    def coerce(cls, order: Union["BesselOrder", float, int]) -> "BesselOrder":
        if isinstance(order, BesselOrder):
            return order
        twice = 2.0 * float(order)
        if twice < 0 or abs(twice - round(twice)) > 1e-12:
            raise DomainError(f"only integer and half-integer orders >= 0 are supported, got {order!r}")
        return cls(int(round(twice)))

    @property
    def nu(self) -> float:
        return self.twice / 2.0

    @property
    def is_integer(self) -> bool:
        return self.twice % 2 == 0


def gamma(x: float) -> float:
    """Gamma function on the positive real axis."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma is only defined here for x > 0, got {x!r}")
    return math.gamma(x)


def bessel_j_series(order, x: float, terms: int = 60, deriv: int = 0) -> float:
    """Ascending power series of J_nu(x) (or its first/second derivative).

    Summed with ``math.fsum``.  Accurate when ``x**2 / 4`` is not large
    compared with ``nu + 1``; beyond that the alternating terms cancel.
    """
    o = BesselOrder.coerce(order)
    nu = o.nu
    x = float(x)
    if x < 0:
        raise DomainError(f"x must be >= 0, got {x!r}")
    if deriv not in (0, 1, 2):
        raise ValueError("deriv must be 0, 1 or 2")
    if x == 0.0:
        if deriv == 0:
            return 1.0 if o.twice == 0 else 0.0
        if not o.is_integer and o.nu < deriv:
            raise DomainError("derivative of J_nu is singular at x = 0 for this order")
        if deriv == 1:
            return 0.5 if o.twice == 2 else 0.0
        return {0: -0.5, 4: 0.25}.get(o.twice, 0.0)

    half = 0.5 * x
    q = -half * half
    t = half**nu / gamma(nu + 1.0)
    parts = []
    for s in range(terms):
        if s > 0:
            t *= q / (s * (s + nu))
        p = 2 * s + nu
        if deriv == 0:
            parts.append(t)
        elif deriv == 1:
            parts.append(t * p / x)
        else:
            parts.append(t * p * (p - 1.0) / (x * x))
    return math.fsum(parts)


def _miller(o: BesselOrder, x: float) -> float:
    # Backward recurrence J_{mu-1} = (2 mu / x) J_mu - J_{mu+1}, normalised
    # by the Neumann sum (integer orders) or by J_{+-1/2} (half-integer).
    nu = o.nu
    base = 0 if o.is_integer else 1  # twice the lowest order reached
    big = max(nu, x)
    steps = int(big) + 30 + int(math.sqrt(40.0 * big))
    if (o.twice + 2 * steps) % 4:
        steps += 1  # start on an even integer order for the Neumann sum
    mu2 = o.twice + 2 * steps
    f_next, f = 0.0, 1e-30
    target = 0.0
    neumann = 0.0
    half_vals = {}
    low = -1 if base == 1 else 0
    while True:
        if mu2 == o.twice:
            target = f
        if base == 0 and mu2 % 4 == 0:
            neumann += f if mu2 == 0 else 2.0 * f
        if base == 1 and mu2 in (1, -1):
            half_vals[mu2] = f
        if mu2 == low:
            break
        mu = mu2 / 2.0
        f_next, f = f, (2.0 * mu / x) * f - f_next
        mu2 -= 2
        if abs(f) > 1e250:
            f *= 1e-250
            f_next *= 1e-250
            target *= 1e-250
            neumann *= 1e-250
            half_vals = {key: v * 1e-250 for key, v in half_vals.items()}
    if base == 0:
        return target / neumann
    pref = math.sqrt(2.0 / (math.pi * x))
    a, b = pref * math.sin(x), pref * math.cos(x)
    fa, fb = half_vals[1], half_vals[-1]
    scale = (a * fa + b * fb) / (fa * fa + fb * fb)
    return scale * target


def bessel_j(order, x: float) -> float:
    """Bessel function of the first kind J_nu(x), nu integer or half-integer.

    Uses the ascending series while it is free of cancellation
    (``x**2 <= 4 (nu + 1)``) and Miller's backward recurrence otherwise.
    """
    o = BesselOrder.coerce(order)
    x = float(x)
    if x < 0 or math.isnan(x):
        raise DomainError(f"x must be >= 0, got {x!r}")
    if x == 0.0:
        return 1.0 if o.twice == 0 else 0.0
    if x * x <= 4.0 * (o.nu + 1.0):
        return bessel_j_series(o, x)
    return _miller(o, x)


def gegenbauer_c(alpha: float, d: int, t):
    """Unnormalised ultraspherical polynomial C_d^alpha(t) for alpha > 0."""
    t = np.asarray(t, dtype=float)
    prev = np.ones_like(t)
    if d == 0:
        return prev
    cur = 2.0 * alpha * t
    for j in range(1, d):
        prev, cur = cur, (2.0 * (j + alpha) * t * cur - (j + 2.0 * alpha - 1.0) * prev) / (j + 1)
    return cur


def gegenbauer(k: int, n: int, t):
    """Gegenbauer polynomial P_{k,n}(t) normalised so that P_{k,n}(1) = 1.

    For ``n >= 2`` this is the ultraspherical polynomial of index
    ``(n - 1)/2`` and agrees with the Rodrigues form
    ``(-1)^k / 2^k * G(n/2)/G(k + n/2) * (1-t^2)^{-(n-2)/2} d^k/dt^k (1-t^2)^{k+(n-2)/2}``.
    For ``n = 1`` it returns the Chebyshev polynomial ``cos(k arccos t)``,
    which plays the same role in the addition theorem on the circle.
    """
    if k < 0 or n < 1:
        raise DomainError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    arr = np.asarray(t, dtype=float)
    if np.any(np.abs(arr) > 1.0 + 1e-12) or np.any(np.isnan(arr)):
        raise DomainError("gegenbauer requires |t| <= 1")
    arr = np.clip(arr, -1.0, 1.0)
    lam = (n - 1) / 2.0
    prev = np.ones_like(arr)
    if k == 0:
        out = prev
    else:
        cur = arr.copy()
        for j in range(1, k):
            prev, cur = cur, (2.0 * (j + lam) * arr * cur - j * prev) / (j + 2.0 * lam)
        out = cur
    return float(out) if np.ndim(t) == 0 else out


def sin_power_integral(k: int) -> float:
    """Integral of sin^{2k} over [0, pi], i.e. sqrt(pi) G(k + 1/2) / G(k + 1)."""
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    return _SQRT_PI * gamma(k + 0.5) / gamma(k + 1.0)


def sphere_volume(n: int) -> float:
    """Surface measure of the unit sphere S^n in R^{n+1}."""
    if n < 0:
        raise DomainError(f"n must be >= 0, got {n}")
    return 2.0 * math.pi ** ((n + 1) / 2.0) / gamma((n + 1) / 2.0)

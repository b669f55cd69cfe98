"""Plane-wave integrals of spherical harmonics and their constants.

For a degree-k harmonic on S^n,

    I(p, rho) = integral over S^n of Y(theta) exp(i rho p.theta) dtheta
              = c(k, n) Y(p) rho^{(1-n)/2} J_{k+(n-1)/2}(rho).

Every quantity here is computed along two independent routes: a
one-dimensional Funk-Hecke integral (or a literal formula) and a brute-force
product quadrature on the sphere.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np

from . import kernels
from .exceptions import DenominatorError, DomainError, QuadratureError, ResolutionError
from .harmonics import HarmonicBasis, HarmonicIndex, harmonic_space_dim
from .specfun import BesselOrder, bessel_j, gamma, gegenbauer, sphere_volume
from .sphere import (
    QuadratureGrid,
    SpherePoint,
    gauss_gegenbauer,
    great_subsphere_grid,
    integrate_sphere,
    sphere_grid,
)

__all__ = [
    "CoefficientRecord",
    "ComparisonReport",
    "compare",
    "radial_profile",
    "funk_hecke_weight",
    "reference_radii",
    "closed_form_coefficient",
    "paper_funk_eigenvalue",
    "paper_even_coefficient",
    "even_coefficient_from_eigenvalue",
    "funk_transform",
    "funk_evaluation_point",
    "funk_eigenvalue_numeric",
    "funk_eigenvalue_ratio",
    "eval_test_polynomial",
    "closed_form_I",
    "closed_form_I_batch",
    "oracle_I",
    "oracle_I_batch",
    "required_resolution",
    "per_m_coefficient_extract",
    "per_m_coefficients",
    "phi_sum",
    "phi_double_integral_full",
    "ode_residual",
    "ode_convergence_order",
    "ResolutionWarning",
]

REFERENCE_RHO = 1.0
REFERENCE_STEP = 0.37
RADIAL_FLOOR = 1e-6
RHO_INDEPENDENCE_TOL = 1e-9


class ResolutionWarning(UserWarning):
    pass


@dataclass
class CoefficientRecord:
    kind: str  # "c" | "lambda" | "phi"
    n: int
    k: int
    value: complex
    method: str  # paper-formula | funk-hecke-integral | quadrature-extraction | double-integral
    m: Optional[int] = None
    reference_rho: Optional[float] = None
    grid_res: Optional[int] = None

    def __post_init__(self):
        self.value = complex(self.value)
        if not (math.isfinite(self.value.real) and math.isfinite(self.value.imag)):
            raise ValueError(f"non-finite coefficient {self.value!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class ComparisonReport:
    label: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    verdict: str  # pass | fail | diagnostic-discrepancy
    tol: float
    criterion: str = "rel"
    grid_res: Optional[int] = None
    method: str = ""
    note: str = ""
    params: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _value(x) -> complex:
    return complex(x.value) if isinstance(x, CoefficientRecord) else complex(x)


def compare(label, lhs, rhs, tol, *, criterion="rel", diagnostic=False, grid_res=None,
            method="", note="", **params) -> ComparisonReport:
    """Build a report; ``criterion`` is ``rel`` (|a-b| <= tol |b|),
    ``mixed`` (|a-b| <= tol (1 + |b|)) or ``abs``.  A failed comparison
    flagged ``diagnostic`` is recorded as a discrepancy, not a failure."""
    a, b = _value(lhs), _value(rhs)
    abs_err = abs(a - b)
    rel_err = abs_err / max(1e-300, abs(b))
    if criterion == "rel":
        ok = abs_err <= tol * abs(b)
    elif criterion == "mixed":
        ok = abs_err <= tol * (1.0 + abs(b))
    elif criterion == "abs":
        ok = abs_err <= tol
    else:
        raise ValueError(f"unknown criterion {criterion!r}")
    verdict = "pass" if ok else ("diagnostic-discrepancy" if diagnostic else "fail")
    return ComparisonReport(label, a, b, abs_err, rel_err, verdict, tol, criterion, grid_res, method, note, params)


# ---------------------------------------------------------------------------
# radial profile and Funk-Hecke weight


def radial_profile(k: int, n: int, rho: float) -> float:
    """``rho^{(1-n)/2} J_{k+(n-1)/2}(rho)`` for ``rho >= 0``, with its limit at 0."""
    if rho < 0:
        raise DomainError("radial_profile takes rho >= 0; use the sign law for negative rho")
    if rho == 0.0:
        if k >= 1:
            return 0.0
        return 1.0 / (2.0 ** ((n - 1) / 2.0) * gamma((n + 1) / 2.0))
    return rho ** ((1.0 - n) / 2.0) * bessel_j(BesselOrder.from_kn(k, n), rho)


def _fh_nodes(k: int, n: int, rho: float) -> int:
    return max(40, k + int(2 * abs(rho)) + 30)


def funk_hecke_weight(k: int, n: int, rho: float, nodes: Optional[int] = None) -> complex:
    """``vol(S^{n-1}) * integral_{-1}^{1} exp(i rho t) P_{k,n}(t) (1-t^2)^{(n-2)/2} dt``.

    This is the scalar with ``I_k^m(p, rho) = weight * Y_k^m(p)``.  On S^1
    the weight ``(1 - t^2)^{-1/2}`` and ``vol(S^0) = 2`` reproduce the circle
    integral in the chart ``t = cos(phi)``.
    """
    N = nodes or _fh_nodes(k, n, rho)
    t, w = gauss_gegenbauer(N, (n - 2) / 2.0)
    vals = w * gegenbauer(k, n, t) * np.exp(1j * rho * t)
    return complex(math.fsum(vals.real) + 1j * math.fsum(vals.imag)) * sphere_volume(n - 1)


def reference_radii(k: int, n: int, rho_ref: float = REFERENCE_RHO, count: int = 2,
                    max_tries: int = 60) -> list:
    """Reference radii where the radial profile is safely nonzero.

    Starts at ``rho_ref`` and steps by 0.37 past any radius where
    ``|rho^{(1-n)/2} J(rho)| < 1e-6``.
    """
    out = []
    rho = float(rho_ref)
    for _ in range(max_tries):
        if rho > 0 and abs(radial_profile(k, n, rho)) >= RADIAL_FLOOR:
            out.append(rho)
            if len(out) == count:
                return out
        rho = round(rho + REFERENCE_STEP, 12)
    raise DenominatorError(f"radial profile below {RADIAL_FLOOR} at every tried radius (k={k}, n={n})")


@lru_cache(maxsize=512)
def _closed_form_coefficient(k: int, n: int, rho_ref: float) -> complex:
    r1, r2 = reference_radii(k, n, rho_ref)
    c1 = funk_hecke_weight(k, n, r1) / radial_profile(k, n, r1)
    c2 = funk_hecke_weight(k, n, r2) / radial_profile(k, n, r2)
    if abs(c1 - c2) > RHO_INDEPENDENCE_TOL * abs(c1):
        raise QuadratureError(
            f"c(k={k}, n={n}) depends on the reference radius: {c1!r} at {r1} vs {c2!r} at {r2}"
        )
    return c1


def closed_form_coefficient(k: int, n: int, rho_ref: float = REFERENCE_RHO) -> complex:
    """Constant ``c(k, n)`` from the Funk-Hecke weight divided by the radial profile.

    Raises ``QuadratureError`` unless two reference radii give the same
    constant to 1e-9 relative.
    """
    if k < 0 or n < 1:
        raise DomainError(f"need k >= 0 and n >= 1, got k={k}, n={n}")
    return _closed_form_coefficient(int(k), int(n), float(rho_ref))


# ---------------------------------------------------------------------------
# literal constants


def paper_funk_eigenvalue(j: int, n: int) -> float:
    """``2 (-1)^j [sqrt(pi) G(j + 1/2) / G(j + 1)]^{n-1}``, evaluated as written.

    This agrees with the Funk transform eigenvalue for n = 1, 2 only; on
    higher spheres see ``funk_eigenvalue_numeric``.
    """
    if j < 0 or n < 1:
        raise DomainError(f"need j >= 0 and n >= 1, got j={j}, n={n}")
    base = math.sqrt(math.pi) * gamma(j + 0.5) / gamma(j + 1.0)
    return 2.0 * (-1) ** j * base ** (n - 1)


def even_coefficient_from_eigenvalue(j: int, n: int, lam: float) -> float:
    """``2^{(n-1)/2} pi G(j + n/2) lam / G(j + 1/2)``."""
    return 2.0 ** ((n - 1) / 2.0) * math.pi * gamma(j + n / 2.0) * lam / gamma(j + 0.5)


def paper_even_coefficient(j: int, n: int) -> float:
    """Even-degree constant ``c(2j, n)`` built from ``paper_funk_eigenvalue``."""
    return even_coefficient_from_eigenvalue(j, n, paper_funk_eigenvalue(j, n))


# ---------------------------------------------------------------------------
# Minkowski-Funk transform


def funk_transform(f: Callable[[np.ndarray], np.ndarray], p, res: int, frame=None) -> complex:
    """Integral of ``f`` over the great subsphere orthogonal to ``p``."""
    if res < 4:
        raise ResolutionError(f"funk_transform needs res >= 4, got {res}")
    return integrate_sphere(f, great_subsphere_grid(p, res, frame=frame))


def funk_evaluation_point(n: int) -> SpherePoint:
    """The point with angles ``(pi/2, ..., pi/2, 0)``, i.e. the axis ``e_n``."""
    return SpherePoint.from_angles([math.pi / 2] * (n - 1) + [0.0], n)


def eval_test_polynomial(j: int, point) -> complex:
    """``(x_n + i x_{n+1})^{2j}`` restricted to S^n, from the chart angles:
    ``exp(2ij phi) * prod_{i=2}^{n} sin^{2j}(theta_i)``."""
    pt = point if isinstance(point, SpherePoint) else SpherePoint.from_cart(point)
    ang = pt.angles
    s = 1.0
    for th in ang[:-1]:
        s *= math.sin(th) ** (2 * j)
    return complex(np.exp(2j * j * ang[-1]) * s)


def _test_polynomial_cart(j: int, x: np.ndarray) -> np.ndarray:
    n = x.shape[1] - 1
    return (x[:, n - 1] + 1j * x[:, n]) ** (2 * j)


def funk_eigenvalue_numeric(j: int, n: int, res: int = 64) -> float:
    """Funk eigenvalue on degree-2j harmonics by quadrature.

    Integrates the harmonic polynomial ``(x_n + i x_{n+1})^{2j}`` over the
    great subsphere of the axis ``e_n`` (where the polynomial equals 1)
    with the subsphere's own surface measure.
    """
    if res < 8:
        raise ResolutionError(f"need res >= 8, got {res}")
    p = funk_evaluation_point(n)
    val = funk_transform(lambda x: _test_polynomial_cart(j, x), p, res)
    p_val = eval_test_polynomial(j, p)
    lam = val / p_val
    if abs(lam.imag) > 1e-9 * max(1.0, abs(lam.real)):
        raise QuadratureError(f"Funk eigenvalue has imaginary part {lam.imag!r}")
    return float(lam.real)


def funk_eigenvalue_ratio(basis: HarmonicBasis, idx: HarmonicIndex, point, res: int = 64) -> complex:
    """``M[Y](p) / Y(p)`` for an even-degree basis function.

    Refuses probe points where ``|Y(p)| < 0.1 sup|Y|``.
    """
    if idx.k % 2:
        raise DomainError("the Funk transform annihilates odd harmonics")
    pt = point if isinstance(point, SpherePoint) else SpherePoint.from_cart(point)
    probe = sphere_grid(idx.n, max(idx.k + 2, 8))
    sup = float(np.max(np.abs(basis(idx, probe.cart))))
    y = complex(basis(idx, np.asarray(pt.cart)[None, :])[0])
    if abs(y) < 0.1 * sup:
        raise DomainError(f"|Y(p)| = {abs(y):.3g} below 0.1 * sup|Y| = {0.1 * sup:.3g}")
    return funk_transform(lambda x: basis(idx, x), pt, res) / y


# ---------------------------------------------------------------------------
# the integral itself


def _cart_rows(points) -> np.ndarray:
    if isinstance(points, SpherePoint):
        return np.asarray(points.cart)[None, :]
    if isinstance(points, (list, tuple)) and points and isinstance(points[0], SpherePoint):
        return np.stack([np.asarray(p.cart) for p in points])
    return np.atleast_2d(np.asarray(points, dtype=float))


def _coefficient(k: int, n: int, mode: str) -> complex:
    if mode == "funk-hecke":
        return closed_form_coefficient(k, n)
    if mode == "paper":
        if k % 2:
            raise DomainError("the literal constant is only available for even k")
        return complex(paper_even_coefficient(k // 2, n))
    raise ValueError(f"unknown coefficient mode {mode!r}")


def _signed_radial(k: int, n: int, rho: float) -> float:
    r = radial_profile(k, n, abs(rho))
    return r if rho >= 0 or k % 2 == 0 else -r


def closed_form_I_batch(basis: HarmonicBasis, k: int, points, rhos, coefficient: Optional[complex] = None,
                        mode: str = "funk-hecke") -> np.ndarray:
    """``c * Y_k^m(p) * rho^{(1-n)/2} J(rho)`` for all m; shape ``(dim, P, R)``.

    Negative radii use ``I(p, -rho) = (-1)^k I(p, rho)``.
    """
    n = basis.n
    c = _coefficient(k, n, mode) if coefficient is None else complex(coefficient)
    Y = basis.evaluate(k, _cart_rows(points))
    rad = np.array([_signed_radial(k, n, float(r)) for r in np.atleast_1d(rhos)])
    return c * Y[:, :, None] * rad[None, None, :]


def closed_form_I(idx: HarmonicIndex, basis: HarmonicBasis, p, rho: float,
                  coefficient: Optional[complex] = None, mode: str = "funk-hecke") -> complex:
    """Closed form of ``I_k^m(p, rho)`` for any real ``rho``."""
    basis._check(idx)
    out = closed_form_I_batch(basis, idx.k, p, [rho], coefficient, mode)
    return complex(out[idx.m - 1, 0, 0])


def required_resolution(k: int, rho: float) -> int:
    return max(k + 4, math.ceil(abs(rho)) + 8)


def oracle_I_batch(basis: HarmonicBasis, k: int, points, rhos, res: int) -> np.ndarray:
    """Brute-force ``I_k^m(p, rho)`` on the product grid; shape ``(dim, P, R)``."""
    rhos = np.atleast_1d(np.asarray(rhos, dtype=float))
    need = required_resolution(k, float(np.max(np.abs(rhos))) if rhos.size else 0.0)
    if res < need:
        warnings.warn(f"res={res} below recommended {need} for k={k}, rho={np.max(np.abs(rhos))}",
                      ResolutionWarning, stacklevel=2)
    grid = sphere_grid(basis.n, res)
    Y = basis.evaluate(k, grid.cart)
    return kernels.plane_wave_moments(Y, grid.weights, grid.cart, _cart_rows(points), rhos)


def oracle_I(idx: HarmonicIndex, basis: HarmonicBasis, p, rho: float, res: int) -> complex:
    """``I_k^m(p, rho)`` by product quadrature of ``Y(theta) exp(i rho p.theta)``."""
    basis._check(idx)
    grid = sphere_grid(basis.n, res)
    need = required_resolution(idx.k, rho)
    if res < need:
        warnings.warn(f"res={res} below recommended {need}", ResolutionWarning, stacklevel=2)
    Y = basis(idx, grid.cart)[None, :]
    out = kernels.plane_wave_moments(Y, grid.weights, grid.cart, _cart_rows(p), [rho])
    return complex(out[0, 0, 0])


# ---------------------------------------------------------------------------
# constants by projection


def _default_res(k: int, rho: float) -> int:
    return required_resolution(k, rho) + 12


def per_m_coefficients(basis: HarmonicBasis, k: int, rho_ref: float = REFERENCE_RHO,
                       res: Optional[int] = None) -> list:
    """``<I_k^m(., rho), Y_k^m> / (rho^{(1-n)/2} J(rho))`` for every m.

    ``I`` is the product-quadrature value at the nodes of an outer grid
    exact to degree ``2k + 3``, so the projection itself is exact.
    """
    n = basis.n
    rho = reference_radii(k, n, rho_ref, count=1)[0]
    res = res or _default_res(k, rho)
    inner = sphere_grid(n, res)
    outer = sphere_grid(n, k + 2)
    Y_in = basis.evaluate(k, inner.cart)
    I_out = kernels.plane_wave_moments(Y_in, inner.weights, inner.cart, outer.cart, [rho])[:, :, 0]
    Y_out = basis.evaluate(k, outer.cart)
    proj = kernels.weighted_sum(I_out * np.conj(Y_out), outer.weights)
    rad = radial_profile(k, n, rho)
    return [
        CoefficientRecord("c", n, k, proj[m] / rad, "quadrature-extraction", m=m + 1, reference_rho=rho, grid_res=res)
        for m in range(len(proj))
    ]


def per_m_coefficient_extract(idx: HarmonicIndex, basis: HarmonicBasis, rho_ref: float = REFERENCE_RHO,
                              res: Optional[int] = None) -> CoefficientRecord:
    """Constant for a single basis function by projecting the quadrature integral."""
    basis._check(idx)
    return per_m_coefficients(basis, idx.k, rho_ref, res)[idx.m - 1]


def phi_sum(k: int, n: int, basis: Optional[HarmonicBasis] = None, rho_ref: float = REFERENCE_RHO,
            res: Optional[int] = None):
    """Sum of the constants over a degree, computed two ways.

    Returns ``(summed, double)``: ``summed`` adds the per-m projections in
    ``basis``; ``double`` evaluates
    ``(a_k / vol(S^n)) / radial * double integral of P_{k,n}(p.theta) exp(i rho p.theta)``,
    reduced to one dimension in ``t = p.theta``.  Only the first depends on
    the basis.
    """
    basis = basis or HarmonicBasis(n, max(k, 1))
    if basis.n != n:
        raise DomainError("basis lives on a different sphere")
    recs = per_m_coefficients(basis, k, rho_ref, res)
    rho = recs[0].reference_rho
    total = complex(math.fsum(r.value.real for r in recs) + 1j * math.fsum(r.value.imag for r in recs))
    summed = CoefficientRecord("phi", n, k, total, "quadrature-extraction", reference_rho=rho, grid_res=recs[0].grid_res)
    a = harmonic_space_dim(k, n)
    vol = sphere_volume(n)
    double_int = vol * funk_hecke_weight(k, n, rho)
    double = CoefficientRecord("phi", n, k, a / vol * double_int / radial_profile(k, n, rho), "double-integral",
                               reference_rho=rho)
    return summed, double


def phi_double_integral_full(k: int, n: int, rho: float, res: int, chunk: int = 256) -> complex:
    """``(a_k / vol(S^n)) / radial * double integral`` by a product rule on S^n x S^n."""
    g = sphere_grid(n, res)
    total = 0.0 + 0.0j
    parts = []
    for lo in range(0, len(g), chunk):
        sl = slice(lo, lo + chunk)
        t = np.clip(g.cart[sl] @ g.cart.T, -1.0, 1.0)
        vals = gegenbauer(k, n, t) * np.exp(1j * rho * t)
        inner = kernels.weighted_sum(vals, g.weights)
        parts.append(inner * g.weights[sl])
    allp = np.concatenate(parts)
    total = complex(math.fsum(allp.real) + 1j * math.fsum(allp.imag))
    a = harmonic_space_dim(k, n)
    return a / sphere_volume(n) * total / radial_profile(k, n, rho)


# ---------------------------------------------------------------------------
# radial equation


def ode_residual(k: int, n: int, rho: float, h: float) -> float:
    """Central-difference residual of
    ``rho^{-n} (rho^n c')' + (1 - mu/rho^2) c = 0`` for ``c = rho^{(1-n)/2} J``."""
    if not (h > 0 and rho >= 10 * h):
        raise DomainError(f"need rho >= 10 h > 0, got rho={rho}, h={h}")
    mu = k * (n + k - 1)
    c0 = radial_profile(k, n, rho)
    cp = radial_profile(k, n, rho + h)
    cm = radial_profile(k, n, rho - h)
    flux = ((rho + h / 2) ** n * (cp - c0) - (rho - h / 2) ** n * (c0 - cm)) / (h * h)
    return abs(flux / rho**n + (1.0 - mu / rho**2) * c0)


def ode_convergence_order(k: int, n: int, rho: float, h: float) -> float:
    """``log2(residual(h) / residual(h/2))``."""
    r1 = ode_residual(k, n, rho, h)
    r2 = ode_residual(k, n, rho, h / 2)
    return math.log2(r1 / r2)

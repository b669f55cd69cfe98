import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphere_fourier.exceptions import DomainError, ResolutionError
from sphere_fourier.harmonics import HarmonicBasis, HarmonicIndex, rotate_basis
from sphere_fourier.specfun import sphere_volume
from sphere_fourier.sphere import SpherePoint, random_points, random_rotation
from sphere_fourier.transforms import (
    ResolutionWarning,
    closed_form_I,
    closed_form_I_batch,
    closed_form_coefficient,
    compare,
    eval_test_polynomial,
    even_coefficient_from_eigenvalue,
    funk_eigenvalue_numeric,
    funk_eigenvalue_ratio,
    funk_evaluation_point,
    funk_hecke_weight,
    funk_transform,
    ode_convergence_order,
    ode_residual,
    oracle_I,
    oracle_I_batch,
    paper_even_coefficient,
    paper_funk_eigenvalue,
    per_m_coefficient_extract,
    per_m_coefficients,
    phi_double_integral_full,
    phi_sum,
    radial_profile,
    reference_radii,
    required_resolution,
)

Y0_S2 = 1 / math.sqrt(4 * math.pi)


def mp_gegen(k, lam, t):
    # C_k^lam(t) in working precision by the three-term recurrence
    prev, cur = mp.mpf(1), 2 * lam * t
    if k == 0:
        return prev
    for j in range(1, k):
        prev, cur = cur, (2 * (j + lam) * t * cur - (j + 2 * lam - 1) * prev) / (j + 1)
    return cur


def mp_funk_hecke(k, n, rho):
    # vol(S^{n-1}) * int exp(i rho t) P_{k,n}(t) (1-t^2)^{(n-2)/2} dt at high precision
    mp.mp.dps = 30
    if n == 1:
        f = lambda phi: mp.exp(1j * rho * mp.cos(phi)) * mp.cos(k * phi)
        return complex(mp.quad(f, [0, mp.pi, 2 * mp.pi]))
    lam = mp.mpf(n - 1) / 2
    P = lambda t: mp_gegen(k, lam, t) / mp_gegen(k, lam, mp.mpf(1))
    f = lambda t: mp.exp(1j * rho * t) * P(t) * (1 - t * t) ** (mp.mpf(n - 2) / 2)
    vol = 2 * mp.pi ** (mp.mpf(n) / 2) / mp.gamma(mp.mpf(n) / 2)
    return complex(vol * mp.quad(f, [-1, 0, 1]))


class TestConstants:
    def test_k0_n2(self):
        c = closed_form_coefficient(0, 2)
        assert c == pytest.approx((2 * math.pi) ** 1.5, rel=1e-12)
        assert c.real == pytest.approx(15.749609945, abs=1e-8)

    @pytest.mark.parametrize("j", range(4))
    def test_even_n1(self, j):
        # at rho_ref = 1 the k = 6 profile is ~2e-5, so ~1e-15 absolute error is ~1e-11 relative
        assert closed_form_coefficient(2 * j, 1) == pytest.approx(2 * math.pi * (-1) ** j, rel=1e-10)

    def test_k1_n2_imaginary(self):
        rec = per_m_coefficient_extract(HarmonicIndex(2, 1, 1), HarmonicBasis(2))
        assert abs(rec.value - 1j * (2 * math.pi) ** 1.5) <= 1e-9 * (2 * math.pi) ** 1.5
        assert rec.method == "quadrature-extraction"

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("k", range(7))
    def test_power_of_i_pattern(self, n, k):
        # measured, not built in: c(k, n) = (2 pi)^{(n+1)/2} i^k
        expect = (2 * math.pi) ** ((n + 1) / 2) * 1j**k
        assert abs(closed_form_coefficient(k, n) - expect) <= 1e-10 * abs(expect)

    @pytest.mark.parametrize("k,n,rho", [(0, 2, 1.0), (3, 2, 2.5), (2, 3, 4.0), (5, 1, 1.7), (4, 4, 0.8)])
    def test_weight_vs_mpmath(self, k, n, rho):
        assert abs(funk_hecke_weight(k, n, rho) - mp_funk_hecke(k, n, rho)) < 1e-12

    def test_reference_radii_skip_zeros(self):
        # J_{1/2}(pi) = 0 so the radial profile vanishes at rho = pi on S^2
        r = reference_radii(0, 2, rho_ref=math.pi)
        assert r[0] == pytest.approx(math.pi + 0.37)
        assert all(abs(radial_profile(0, 2, x)) >= 1e-6 for x in r)

    def test_coefficient_reference_independent(self):
        a = closed_form_coefficient(3, 3, 1.0)
        b = closed_form_coefficient(3, 3, 2.3)
        assert abs(a - b) <= 1e-9 * abs(a)

    def test_radial_limit(self):
        for n in (1, 2, 3, 5):
            assert radial_profile(0, n, 0.0) == pytest.approx(radial_profile(0, n, 1e-6), rel=1e-10)
            assert radial_profile(2, n, 0.0) == 0.0
        with pytest.raises(DomainError):
            radial_profile(1, 2, -1.0)


class TestLiteralFormulas:
    def test_eigenvalue_examples(self):
        assert paper_funk_eigenvalue(0, 1) == 2.0
        assert paper_funk_eigenvalue(0, 2) == pytest.approx(2 * math.pi, rel=1e-15)
        assert paper_funk_eigenvalue(1, 2) == pytest.approx(-math.pi, rel=1e-15)
        assert paper_funk_eigenvalue(0, 3) == pytest.approx(2 * math.pi**2, rel=1e-15)

    @pytest.mark.parametrize("j", range(5))
    def test_even_coefficient(self, j):
        assert paper_even_coefficient(j, 1) == pytest.approx(2 * math.pi * (-1) ** j, rel=1e-14)
        assert paper_even_coefficient(j, 2) == pytest.approx((2 * math.pi) ** 1.5 * (-1) ** j, rel=1e-14)

    def test_relation_inverts(self):
        lam = 4 * math.pi / 5
        c = even_coefficient_from_eigenvalue(2, 3, lam)
        assert c == pytest.approx((2 * math.pi) ** 2, rel=1e-13)


class TestFunk:
    def test_constant_on_circle(self):
        p = random_points(2, 1, seed=0)[0]
        assert funk_transform(lambda x: np.ones(len(x)), p, 8) == pytest.approx(2 * math.pi, abs=1e-13)

    def test_odd_harmonic_vanishes(self):
        b = HarmonicBasis(2)
        p = random_points(2, 1, seed=1)[0]
        for idx in b.indices(1) + b.indices(3):
            assert abs(funk_transform(lambda x: b(idx, x), p, 16)) < 1e-10

    def test_degree_two_on_s2(self):
        b = HarmonicBasis(2)
        for p in random_points(2, 4, seed=2):
            for idx in b.indices(2):
                got = funk_transform(lambda x: b(idx, x), p, 16)
                assert abs(got + math.pi * b(idx, p.cart[None, :])[0]) < 1e-8

    def test_frame_independence(self):
        b = HarmonicBasis(3)
        idx = HarmonicIndex(3, 4, 7)
        p = random_points(3, 1, seed=3)[0]
        from sphere_fourier.sphere import _complement_frame

        frame = _complement_frame(np.asarray(p.cart))
        a = funk_transform(lambda x: b(idx, x), p, 16)
        other = funk_transform(lambda x: b(idx, x), p, 16, frame=random_rotation(3, seed=4) @ frame)
        assert abs(a - other) < 1e-12

    def test_res_guard(self):
        with pytest.raises(ResolutionError):
            funk_transform(lambda x: np.ones(len(x)), funk_evaluation_point(2), 3)
        with pytest.raises(ResolutionError):
            funk_eigenvalue_numeric(0, 2, res=6)

    def test_numeric_examples(self):
        assert funk_eigenvalue_numeric(0, 2) == pytest.approx(2 * math.pi, abs=1e-10)
        assert funk_eigenvalue_numeric(1, 2) == pytest.approx(-math.pi, abs=1e-8)
        assert funk_eigenvalue_numeric(0, 3) == pytest.approx(4 * math.pi, abs=1e-8)
        assert funk_eigenvalue_numeric(1, 1) == pytest.approx(-2.0, abs=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    @pytest.mark.parametrize("j", range(4))
    def test_numeric_equals_zonal_value(self, n, j):
        # independent: lambda = vol(S^{n-1}) P_{2j,n}(0)
        mp.mp.dps = 30
        if n == 1:
            zonal = (-1) ** j
        else:
            lam = mp.mpf(n - 1) / 2
            zonal = float(mp.binomial(-lam, j) / mp.binomial(2 * j + 2 * lam - 1, 2 * j))
        assert funk_eigenvalue_numeric(j, n) == pytest.approx(sphere_volume(n - 1) * zonal, rel=1e-12)

    def test_literal_matches_only_low_n(self):
        for j in range(3):
            assert funk_eigenvalue_numeric(j, 2) == pytest.approx(paper_funk_eigenvalue(j, 2), rel=1e-10)
        assert abs(funk_eigenvalue_numeric(0, 3) - paper_funk_eigenvalue(0, 3)) > 1.0

    @pytest.mark.parametrize("n", [2, 3])
    def test_ratio_constant_over_points(self, n):
        b = HarmonicBasis(n)
        for j in (1, 2):
            for idx in b.indices(2 * j)[:4]:
                ratios = []
                for p in random_points(n, 30, seed=idx.m):
                    try:
                        ratios.append(funk_eigenvalue_ratio(b, idx, p, res=24))
                    except DomainError:
                        continue
                assert len(ratios) >= 3
                lam = funk_eigenvalue_numeric(j, n)
                np.testing.assert_allclose(ratios, lam, rtol=1e-7)

    def test_ratio_guards(self):
        b = HarmonicBasis(2)
        with pytest.raises(DomainError):
            funk_eigenvalue_ratio(b, HarmonicIndex(2, 1, 1), [1.0, 0, 0])
        # zonal Y_2 vanishes where x1^2 = 1/3
        x = [1 / math.sqrt(3), math.sqrt(2 / 3), 0.0]
        with pytest.raises(DomainError):
            funk_eigenvalue_ratio(b, HarmonicIndex(2, 2, 1), x)

    def test_test_polynomial(self):
        for n in (1, 2, 3, 5):
            assert eval_test_polynomial(3, funk_evaluation_point(n)) == pytest.approx(1.0, abs=1e-15)
        for p in random_points(4, 20, seed=5):
            x = np.asarray(p.cart)
            assert eval_test_polynomial(0, p) == 1.0
            for j in (1, 2, 3):
                assert abs(eval_test_polynomial(j, p) - (x[3] + 1j * x[4]) ** (2 * j)) < 1e-12


class TestIntegral:
    def test_k0_n2_plane_wave(self):
        b = HarmonicBasis(2)
        idx = HarmonicIndex(2, 0, 1)
        p = random_points(2, 1, seed=0)[0]
        exact = Y0_S2 * 4 * math.pi * math.sin(2) / 2
        assert abs(oracle_I(idx, b, p, 2.0, res=16) - exact) < 1e-10
        assert abs(closed_form_I(idx, b, p, 2.0) - exact) < 1e-10
        assert abs(closed_form_I(idx, b, p, math.pi)) < 1e-15

    def test_rho_zero(self):
        b = HarmonicBasis(2)
        p = random_points(2, 1, seed=1)[0]
        assert closed_form_I(HarmonicIndex(2, 2, 3), b, p, 0.0) == 0
        assert abs(oracle_I(HarmonicIndex(2, 1, 2), b, p, 0.0, res=8)) < 1e-12
        assert closed_form_I(HarmonicIndex(2, 0, 1), b, p, 0.0) == pytest.approx(4 * math.pi * Y0_S2, rel=1e-14)

    def test_n1_k2(self):
        b = HarmonicBasis(1)
        p = random_points(1, 1, seed=2)[0]
        for idx in b.indices(2):
            got = oracle_I(idx, b, p, 3.0, res=16)
            want = closed_form_I(idx, b, p, 3.0, coefficient=-2 * math.pi)
            assert abs(got - want) < 1e-10

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_batch_agreement(self, n):
        b = HarmonicBasis(n)
        pts = random_points(n, 6, seed=n)
        rhos = [0.5, 2.0, 5.0]
        for k in range(5):
            cf = closed_form_I_batch(b, k, pts, rhos)
            orc = oracle_I_batch(b, k, pts, rhos, res=20)
            assert np.max(np.abs(cf - orc) / (1 + np.abs(orc))) <= 1e-10

    def test_paper_mode(self):
        b = HarmonicBasis(2)
        pts = random_points(2, 3, seed=3)
        a = closed_form_I_batch(b, 2, pts, [1.3], mode="paper")
        c = closed_form_I_batch(b, 2, pts, [1.3])
        np.testing.assert_allclose(a, c, atol=1e-12)
        with pytest.raises(DomainError):
            closed_form_I_batch(b, 3, pts, [1.0], mode="paper")

    @settings(max_examples=40, deadline=None)
    @given(n=st.integers(1, 4), k=st.integers(0, 6), rho=st.floats(0.01, 20.0), seed=st.integers(0, 10**6))
    def test_sign_law_exact(self, n, k, rho, seed):
        b = HarmonicBasis(n)
        p = random_points(n, 1, seed=seed)
        a = closed_form_I_batch(b, k, p, [rho, -rho])
        assert np.max(np.abs(a[:, :, 1] - (-1) ** k * a[:, :, 0])) <= 1e-14 * max(1.0, np.max(np.abs(a)))

    def test_sign_law_oracle(self):
        b = HarmonicBasis(3)
        p = random_points(3, 4, seed=9)
        for k in range(4):
            a = oracle_I_batch(b, k, p, [1.7, -1.7], res=20)
            assert np.max(np.abs(a[:, :, 1] - (-1) ** k * a[:, :, 0])) <= 1e-9

    def test_resolution_warning(self):
        b = HarmonicBasis(2)
        p = random_points(2, 1, seed=0)[0]
        with pytest.warns(ResolutionWarning):
            oracle_I(HarmonicIndex(2, 3, 1), b, p, 10.0, res=8)
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            oracle_I(HarmonicIndex(2, 3, 1), b, p, 10.0, res=required_resolution(3, 10.0))

    def test_resolution_rule_convergence(self):
        # error drops to roundoff once res reaches the rule
        b = HarmonicBasis(2)
        idx = HarmonicIndex(2, 2, 4)
        p = random_points(2, 1, seed=4)[0]
        rho = 8.0
        exact = closed_form_I(idx, b, p, rho)
        errs = {}
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ResolutionWarning)
            for res in (6, 10, required_resolution(2, rho)):
                errs[res] = abs(oracle_I(idx, b, p, rho, res) - exact)
        assert errs[6] > 1e-6
        assert errs[required_resolution(2, rho)] < 1e-12


class TestExtraction:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_k0_matches_weight(self, n):
        b = HarmonicBasis(n)
        rec = per_m_coefficient_extract(HarmonicIndex(n, 0, 1), b)
        assert abs(rec.value - closed_form_coefficient(0, n)) <= 1e-9 * abs(rec.value)

    @pytest.mark.parametrize("n", [1, 2])
    def test_even_matches_literal(self, n):
        b = HarmonicBasis(n)
        for j in range(4):
            for rec in per_m_coefficients(b, 2 * j):
                assert abs(rec.value - paper_even_coefficient(j, n)) <= 1e-8 * abs(rec.value)

    @pytest.mark.parametrize("n", [2, 3])
    def test_m_independent(self, n):
        b = HarmonicBasis(n)
        for k in range(5):
            vals = np.array([r.value for r in per_m_coefficients(b, k)])
            assert np.max(np.abs(vals - vals[0])) <= 1e-9 * abs(vals[0])

    def test_real_basis_same_constants(self):
        vals = [r.value for r in per_m_coefficients(HarmonicBasis(2, real=True), 3)]
        np.testing.assert_allclose(vals, closed_form_coefficient(3, 2), rtol=1e-9)


class TestPhi:
    def test_examples(self):
        s, d = phi_sum(0, 2)
        assert s.value == pytest.approx(closed_form_coefficient(0, 2), rel=1e-10)
        s, d = phi_sum(2, 1)
        assert s.value == pytest.approx(-4 * math.pi, rel=1e-9)
        assert d.value == pytest.approx(-4 * math.pi, rel=1e-12)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_two_paths(self, n):
        for k in range(4):
            s, d = phi_sum(k, n)
            assert abs(s.value - d.value) <= 1e-8 * abs(d.value)

    def test_full_double_integral(self):
        for n, k in [(1, 2), (2, 1), (2, 3)]:
            _, d = phi_sum(k, n)
            full = phi_double_integral_full(k, n, d.reference_rho, res=k + 6)
            assert abs(full - d.value) <= 1e-9 * abs(d.value)

    def test_rotation_invariance(self):
        base = HarmonicBasis(3)
        ref, _ = phi_sum(3, 3, base)
        for seed in range(2):
            rot = rotate_basis(base, random_rotation(4, seed=seed))
            s, _ = phi_sum(3, 3, rot)
            assert abs(s.value - ref.value) <= 1e-9 * abs(ref.value)


class TestODE:
    def test_examples(self):
        assert ode_residual(0, 1, 2.0, 1e-4) <= 1e-6
        assert ode_residual(1, 3, 1.5, 1e-4) <= 1e-5
        assert ode_convergence_order(2, 2, 3.0, 1e-2) >= 1.9

    @pytest.mark.parametrize("k,n", [(0, 1), (2, 2), (4, 3), (1, 5)])
    def test_residual_small_relative_to_profile(self, k, n):
        for rho in (0.7, 3.0, 9.0):
            assert ode_residual(k, n, rho, 1e-3) < 1e-5 * max(1e-2, abs(radial_profile(k, n, rho)))

    def test_guard(self):
        with pytest.raises(DomainError):
            ode_residual(0, 2, 0.05, 0.01)
        with pytest.raises(DomainError):
            ode_residual(0, 2, 1.0, 0.0)


class TestCompare:
    def test_verdicts(self):
        r = compare("x", 1.0 + 1e-9, 1.0, 1e-8)
        assert r.verdict == "pass" and r.rel_err == pytest.approx(1e-9, rel=1e-6)
        assert compare("x", 2.0, 1.0, 1e-8).verdict == "fail"
        assert compare("x", 2.0, 1.0, 1e-8, diagnostic=True).verdict == "diagnostic-discrepancy"
        assert compare("x", 1e-9, 0.0, 1e-8, criterion="mixed").verdict == "pass"
        assert compare("x", 1e-9, 0.0, 1e-8).rel_err == pytest.approx(1e291)
        with pytest.raises(ValueError):
            compare("x", 1, 1, 1e-8, criterion="bogus")

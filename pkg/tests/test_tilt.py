"""Tilting machinery: derivative oracles, enumeration cross-checks, saddlepoint."""

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpop import (
    Design,
    Population,
    cgf,
    compute_moments,
    family_power,
    mgf_approx,
    mgf_exact,
    associated_cdf,
    remainder_bound,
    saddlepoint_tail,
    saddlepoint_tail_t,
    solve_alpha,
    standardize,
    tilt_coeffs,
    tilt_moments,
    normal_tail,
)
from finpop.sampling import exact_tail_dp, exact_tail_enum


def test_cgf_matches_naive_formula_where_stable():
    for p in (0.1, 0.25, 0.5, 0.9):
        q = 1.0 - p
        for z in np.linspace(-30, 30, 121):
            naive = math.log(p * math.exp(q * z) + q * math.exp(-p * z))
            assert cgf(float(z), p).K == pytest.approx(naive, abs=1e-12, rel=1e-12)


def test_cgf_derivatives_against_finite_differences():
    h = 1e-5
    for p in (0.2, 0.5, 0.8):
        for z in (-3.0, -0.4, 0.0, 0.7, 2.5):
            k = cgf(z, p)
            kp = cgf(z + h, p)
            km = cgf(z - h, p)
            assert k.K1 == pytest.approx((kp.K - km.K) / (2 * h), abs=1e-8)
            assert k.K2 == pytest.approx((kp.K - 2 * k.K + km.K) / (h * h), abs=1e-5)
            assert k.K3 == pytest.approx((kp.K2 - km.K2) / (2 * h), abs=1e-5)


def test_cgf_symmetric_p_is_log_cosh():
    for z in (-4.0, -1.0, 0.3, 7.0):
        assert cgf(z, 0.5).K == pytest.approx(math.log(math.cosh(z / 2)), rel=1e-13)


def test_cgf_extreme_arguments_stable():
    # asymptotes: K(z) -> qz + log p as z -> +inf, -pz + log q as z -> -inf
    k = cgf(800.0, 0.3)
    assert math.isfinite(k.K)
    assert k.K == pytest.approx(0.7 * 800 + math.log(0.3), rel=1e-12)
    assert k.K1 == pytest.approx(0.7)
    k = cgf(-800.0, 0.3)
    assert k.K == pytest.approx(0.3 * 800 + math.log(0.7), rel=1e-12)
    assert k.K1 == pytest.approx(-0.3)


@settings(max_examples=200, deadline=None)
@given(p=st.floats(0.01, 0.99), z=st.floats(-50, 50))
def test_cgf_origin_and_convexity(p, z):
    at0 = cgf(0.0, p)
    assert at0.K == 0.0
    assert at0.K1 == pytest.approx(0.0, abs=1e-15)
    # K'' = w(1-w) underflows to 0.0 once w rounds to 1 (|z| ~ 36), so
    # strict positivity is only a double-precision fact on a moderate range
    assert cgf(z, p).K2 >= 0
    if abs(z) <= 30:
        assert cgf(z, p).K2 > 0


def test_cgf_vectorized_matches_scalar():
    z = np.linspace(-5, 5, 11)
    v = cgf(z, 0.37)
    for i, zz in enumerate(z):
        s = cgf(float(zz), 0.37)
        assert v.K[i] == s.K and v.K1[i] == s.K1 and v.K2[i] == s.K2 and v.K3[i] == s.K3


def test_tilt_coeffs_box_and_centering():
    pop = standardize(family_power(100, 1.0))
    d = Design(N=100, n=25)
    co = tilt_coeffs(pop, d, 1.5, lam=1.2, theta=0.5, theta1=-10.0)
    assert co.b == pytest.approx(1.5 / d.omega_N)
    assert abs(co.b_k.sum()) < 1e-10
    # direct recompute of the coefficient formula
    a = pop.values
    b = co.b
    expect = (
        1.2 * b * a
        - 0.5 * b * b * d.q * (a * a - 1)
        - 10.0 * b**4 * d.q**2 * ((a * a - 1) ** 2 - np.mean((a * a - 1) ** 2))
    )
    assert np.allclose(co.b_k, expect, rtol=1e-14)
    for bad in (dict(lam=0.0), dict(lam=2.5), dict(theta=-0.1), dict(theta=1.2), dict(theta1=80.0)):
        with pytest.raises(ValueError):
            tilt_coeffs(pop, d, 1.0, **bad)


def test_solve_alpha_symmetric_case_and_residual():
    # symmetric coefficients at p = 1/2 force alpha = 0
    b = np.array([0.4, -0.4, 0.1, -0.1])
    assert solve_alpha(b, 0.5, 1.0) == pytest.approx(0.0, abs=1e-13)
    # asymmetric p: certify the residual directly
    pop = standardize(family_power(200, 2.0))
    d = Design(N=200, n=50)
    bk = tilt_coeffs(pop, d, 1.0).b_k
    al = solve_alpha(bk, d.p, 1.0)
    resid = float(np.sum(cgf(bk + al, d.p).K1))
    assert abs(resid) <= 1e-12 * 200 * d.p * d.q


def test_solve_alpha_objective_monotone():
    pop = standardize(family_power(50, 1.0))
    d = Design(N=50, n=10)
    bk = tilt_coeffs(pop, d, 0.8).b_k
    grid = np.linspace(-1.0, 1.0, 41)
    vals = [float(np.sum(cgf(bk + a, d.p).K1)) for a in grid]
    assert all(v2 > v1 for v1, v2 in zip(vals, vals[1:]))


def test_tilt_moments_recompute():
    pop = standardize(family_power(60, 1.0))
    d = Design(N=60, n=20)
    bk = tilt_coeffs(pop, d, 1.2).b_k
    al = solve_alpha(bk, d.p, 1.0)
    st_ = tilt_moments(bk, d.p, 1.0, al)
    v = cgf(bk + al, d.p)
    assert st_.m_N == pytest.approx(float(np.sum(bk * v.K1)), rel=1e-14)
    expect_var = float(np.sum(bk * bk * v.K2)) - float(np.sum(bk * v.K2)) ** 2 / float(np.sum(v.K2))
    assert st_.sigma_N2 == pytest.approx(expect_var, rel=1e-12)
    assert st_.sigma_N2 >= 0.0


def test_mgf_exact_two_point_is_cosh():
    # N=2, n=1, coefficients (1, -1): E e^{uT} = cosh(u)
    for u in (0.1, 0.7, 2.0):
        assert mgf_exact(np.array([1.0, -1.0]), 1, u) == pytest.approx(math.cosh(u), rel=1e-13)


def test_mgf_approx_error_within_band():
    pop = standardize(family_power(16, 1.0))
    d = Design(N=16, n=8)
    ex = mgf_exact(pop.values, d.n, 0.3)
    ap = mgf_approx(pop.values, d, 0.3)
    assert abs(ap.value / ex - 1.0) <= 10.0 / d.omega_N
    assert 0 < ap.Gn_p <= math.sqrt(2 * math.pi) + 1e-12


def test_associated_cdf_trivials():
    pop = standardize(family_power(12, 1.0))
    vals = pop.values
    n = 4
    # u = 0 degenerates to the ordinary CDF of the sample sum
    cnt = sum(1 for c in itertools.combinations(vals, n) if sum(c) <= 0.5)
    expect = cnt / math.comb(12, 4)
    assert associated_cdf(vals, n, 0.0, 0.5) == pytest.approx(expect, rel=1e-12)
    assert associated_cdf(vals, n, 0.7, 1e9) == 1.0
    assert associated_cdf(vals, n, 0.7, -1e9) == 0.0


def test_associated_cdf_importance_tracks_exact():
    pop = standardize(family_power(14, 2.0))
    b = pop.values * 0.15
    ex = associated_cdf(b, 5, 1.0, 0.3)
    mc = associated_cdf(b, 5, 1.0, 0.3, reps=200000, seed=42)
    assert mc == pytest.approx(ex, abs=0.01)


def test_saddlepoint_symmetric_limit():
    pop = standardize(family_power(30, 1.0))
    d = Design(N=30, n=10)
    # target -> 0+ tends to the symmetric value 1/2 up to O(1/omega_N)
    val = saddlepoint_tail(pop, d, 1e-8)
    assert 0.45 <= val <= 0.56


def test_saddlepoint_vs_exact_oracle():
    raw = Population(np.arange(1.0, 31.0))
    pop = standardize(raw)
    d = Design(N=30, n=10)
    y = 1.5 * d.omega_N
    sp = saddlepoint_tail(pop, d, y)
    # map the standardized threshold back to the integer population
    m = compute_moments(raw)
    dp = exact_tail_dp(raw, d.n, d.n * m.mu + 1.5 * m.sigma * d.omega_N)
    assert 0.8 <= sp / dp.p_hat <= 1.2


def test_saddlepoint_errors():
    pop = standardize(family_power(30, 1.0))
    d = Design(N=30, n=10)
    with pytest.raises(ValueError):
        saddlepoint_tail(pop, d, -1.0)
    with pytest.raises(ValueError, match="attainable"):
        saddlepoint_tail(pop, d, 1e9)
    with pytest.raises(ValueError):
        saddlepoint_tail(family_power(30, 1.0), d, 1.0)  # not standardized
    with pytest.raises(ValueError):
        saddlepoint_tail_t(pop, d, 0.0)


def test_saddlepoint_t_sanity_against_enumeration():
    pop = standardize(family_power(20, 1.0))
    d = Design(N=20, n=6)
    x = 1.5
    sp = saddlepoint_tail_t(pop, d, x)
    en = exact_tail_enum(pop, d.n, "t", x)
    assert 0.0 < sp < 1.0
    # desk-scale N: generous band, the table-scale band is the acceptance check
    assert 0.7 <= sp / en.p_hat <= 1.4


def test_remainder_bound_formula():
    val = remainder_bound(2.0, 1.3, 10.0, C=3.0)
    assert val == pytest.approx(3.0 * 2.0 * 1.3 / 10.0 * math.exp(2.0) * normal_tail(2.0), rel=1e-14)

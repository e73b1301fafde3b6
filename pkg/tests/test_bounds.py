"""Bounds module: high-precision oracles and the inequality sandwiches."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from finpop import (
    Design,
    compute_moments,
    family_power,
    implied_A,
    mills_psi,
    normal_tail,
    thm11_envelope,
    thm12_band,
    valid_x_range,
    x0_transform,
)

mpmath.mp.dps = 30


def _oracle_tail(x: float) -> float:
    return float(mpmath.erfc(x / mpmath.sqrt(2)) / 2)


def _oracle_psi(t: float) -> float:
    tail = mpmath.erfc(t / mpmath.sqrt(2)) / 2
    phi = mpmath.exp(-mpmath.mpf(t) ** 2 / 2) / mpmath.sqrt(2 * mpmath.pi)
    return float(tail / phi)


def test_normal_tail_against_30_digit_oracle():
    for x in np.linspace(0.0, 8.0, 161):
        assert normal_tail(float(x)) == pytest.approx(_oracle_tail(float(x)), rel=1e-12)


def test_mills_psi_against_30_digit_oracle():
    for t in np.linspace(0.01, 12.0, 200):
        assert mills_psi(float(t)) == pytest.approx(_oracle_psi(float(t)), rel=1e-12)
    with pytest.raises(ValueError):
        mills_psi(0.0)


def test_normal_tail_sandwich():
    # x/(1+x^2) phi <= tail <= phi/x, slack floor 1e-13
    for x in np.linspace(0.05, 8.0, 300):
        phi = math.exp(-x * x / 2) / math.sqrt(2 * math.pi)
        tail = normal_tail(float(x))
        assert tail >= x / (1 + x * x) * phi - 1e-13
        assert tail <= phi / x + 1e-13


def test_mills_ratio_bounds():
    for t in np.linspace(2.0, 50.0, 300):
        tp = t * mills_psi(float(t))
        assert 0.75 - 1e-13 <= tp <= 1.0 + 1e-13
    for t in np.linspace(0.05, 50.0, 500):
        assert abs(t * mills_psi(float(t)) - 1.0) <= 1.0 / (t * t) + 1e-13


def test_envelope_shape():
    pop = family_power(1000, 1.0)
    m = compute_moments(pop)
    d = Design(N=1000, n=250)
    env = thm11_envelope(1.0, m, d, A=1.0)
    E = (1 + 1.0) ** 3 * m.beta3N / d.omega_N
    assert env.upper == pytest.approx(math.exp(E), rel=1e-14)
    assert env.lower == pytest.approx(math.exp(-E), rel=1e-14)
    assert env.lower * env.upper == pytest.approx(1.0, rel=1e-14)
    assert env.in_range
    x_max, _ = valid_x_range(m, d, 1.0)
    assert not thm11_envelope(x_max * 1.01, m, d, 1.0).in_range
    with pytest.raises(ValueError):
        thm11_envelope(1.0, m, d, A=0.0)
    with pytest.raises(ValueError):
        thm11_envelope(-0.5, m, d, A=1.0)


def test_band_values():
    pop = family_power(100, 2.0)
    m = compute_moments(pop)
    d = Design(N=100, n=25)
    band, be = thm12_band(1.5, m, d, A=2.0)
    scale = m.beta3N / d.omega_N
    assert band == pytest.approx(2.0 * 2.5**3 * scale, rel=1e-14)
    assert be == pytest.approx(2.0 * 2.5**2 * math.exp(-1.125) * scale, rel=1e-14)


def test_x0_transform_values():
    r = x0_transform(2.0, 250, 0.75)
    assert r.x0 == pytest.approx(2.0 * math.sqrt(250) / math.sqrt(250 + 4 * 0.75 - 1))
    assert r.b0 == pytest.approx(r.x0 / math.sqrt(250 * 0.75))
    assert r.rel_dev == pytest.approx(abs(r.x0 / 2.0 - 1.0))
    with pytest.raises(ValueError):
        x0_transform(0.0, 1, 0.5)  # radicand n + x^2 q - 1 = 0
    with pytest.raises(ValueError):
        x0_transform(-1.0, 250, 0.75)


@settings(max_examples=300, deadline=None)
@given(
    x=st.floats(1.0, 8.0),
    n=st.integers(2, 5000),
    q=st.floats(0.01, 0.99),
)
def test_x0_relative_deviation_large_x_regime(x, n, q):
    # the 2x^2/n cap is provable for x >= 1; small x is excluded by design
    if n + x * x * q - 1.0 <= 0:
        return
    r = x0_transform(x, n, q)
    assert r.rel_dev <= 2.0 * x * x / n + 1e-12


def test_implied_A_round_trip():
    pop = family_power(200, 1.0)
    m = compute_moments(pop)
    d = Design(N=200, n=50)
    for A in (0.1, 0.5, 1.0):
        for x in (0.5, 2.0):
            ratio = math.exp(A * (1 + x) ** 3 * m.beta3N / d.omega_N)
            assert implied_A(ratio, x, m, d) == pytest.approx(A, rel=1e-12)
            # the envelope is symmetric in ratio vs 1/ratio
            assert implied_A(1.0 / ratio, x, m, d) == pytest.approx(A, rel=1e-12)
    with pytest.raises(ValueError):
        implied_A(0.0, 1.0, m, d)


def test_envelope_contains_observed_table_ratio():
    # the widest empirical ratio of the k-family reference grid sits
    # inside the envelope already at A = 0.05
    from finpop import standardize

    pop = standardize(family_power(1000, 1.0))
    m = compute_moments(pop)
    d = Design(N=1000, n=250)
    env = thm11_envelope(3.0, m, d, 0.05)
    assert env.lower < 1.119 < env.upper
    assert env.in_range


def test_band_cap_scales_like_sixth_root():
    # for the standardized k family the band-validity cap grows like
    # (Npq)^{1/6}: a 64x increase in Npq should double it
    from finpop import standardize

    caps = {}
    for N in (1000, 64000):
        pop = standardize(family_power(N, 1.0))
        caps[N] = valid_x_range(compute_moments(pop), Design(N=N, n=N // 4), 1.0)[1]
    ratio = caps[64000] / caps[1000]
    assert 2.0 / 1.5 <= ratio <= 2.0 * 1.5

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from finpop import (
    Design,
    Population,
    compute_moments,
    family_power,
    load_population,
    standardize,
    valid_x_range,
)
from finpop.population import DegeneratePopulationError, is_standardized


def test_population_basics():
    pop = Population(np.array([1.0, 2.0, 3.0]))
    assert pop.N == 3
    assert pop == Population(np.array([1.0, 2.0, 3.0]))
    assert pop != Population(np.array([1.0, 2.0, 4.0]))


def test_population_rejects_bad_input():
    with pytest.raises(DegeneratePopulationError):
        Population(np.array([5.0, 5.0, 5.0]))  # no variance
    with pytest.raises(ValueError):
        Population(np.array([1.0]))
    with pytest.raises(ValueError):
        Population(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        Population(np.array([[1.0, 2.0]]))


def test_moments_hand_case():
    # values 1..4: mu 2.5, sigma2 1.25, E|d|^3 = (3.375+0.125+0.125+3.375)/4
    pop = Population(np.array([1.0, 2.0, 3.0, 4.0]))
    m = compute_moments(pop)
    assert m.mu == pytest.approx(2.5)
    assert m.sigma2 == pytest.approx(1.25)
    e_abs3 = (3.375 + 0.125 + 0.125 + 3.375) / 4
    assert m.beta3N == pytest.approx(e_abs3 / 1.25**1.5, rel=1e-14)
    assert m.max_dev == pytest.approx(1.5)


def test_two_point_beta3N_is_one():
    m = compute_moments(Population(np.array([0.0, 1.0] * 5)))
    assert m.beta3N == pytest.approx(1.0, abs=1e-14)


@pytest.mark.parametrize(
    "N,alpha,expected",
    [(1000, 1.0, 1.299), (100, 1.0, 1.299), (1000, 2.0, 1.376), (100, 2.0, 1.375)],
)
def test_power_family_beta3N_reference(N, alpha, expected):
    # pinned three-decimal reference values for the default table families
    m = compute_moments(family_power(N, alpha))
    assert round(m.beta3N, 3) == expected


def test_family_power_rejects_low_alpha():
    with pytest.raises(ValueError):
        family_power(100, -1.0 / 3.0)
    family_power(100, -0.2)  # inside the admissible range


def test_standardize():
    pop = family_power(50, 2.0)
    std = standardize(pop)
    assert is_standardized(std)
    assert not is_standardized(pop)
    # beta3N is scale free
    assert compute_moments(std).beta3N == pytest.approx(compute_moments(pop).beta3N, rel=1e-12)


@settings(max_examples=50, deadline=None)
@given(
    arrays(
        np.float64,
        st.integers(5, 40),
        elements=st.floats(-1e6, 1e6, allow_nan=False, width=64),
    ).filter(lambda a: np.ptp(a) > 1e-6 * (1 + np.max(np.abs(a))))
)
def test_standardize_idempotent(values):
    std = standardize(Population(values))
    again = standardize(std)
    assert np.allclose(std.values, again.values, atol=1e-9)
    assert is_standardized(std, tol=1e-7)


def test_design_derived_quantities():
    d = Design(N=1000, n=250)
    assert d.p == pytest.approx(0.25)
    assert d.q == pytest.approx(0.75)
    assert d.omega_N == pytest.approx(math.sqrt(1000 * 0.25 * 0.75))
    with pytest.raises(ValueError):
        Design(N=10, n=10)
    with pytest.raises(ValueError):
        Design(N=10, n=0)


def test_valid_x_range_formulas():
    pop = family_power(1000, 1.0)
    m = compute_moments(pop)
    d = Design(N=1000, n=250)
    x1, x2 = valid_x_range(m, d, A=2.0)
    cap = d.omega_N * m.sigma / m.max_dev
    assert x1 == pytest.approx(cap / 2.0)
    assert x2 == pytest.approx(min(cap, (d.omega_N / m.beta3N) ** (1 / 3)) / 2.0)
    with pytest.raises(ValueError):
        valid_x_range(m, d, A=0.0)


def test_load_population(tmp_path):
    f = tmp_path / "pop.txt"
    f.write_text("value\n1.5\n2.5\n−3.0\n")  # header line and unicode minus allowed
    pop = load_population(f)
    assert np.allclose(pop.values, [1.5, 2.5, -3.0])


def test_load_population_reports_line_number(tmp_path):
    f = tmp_path / "bad.txt"
    f.write_text("1.0\nnot-a-number\n2.0\n")
    with pytest.raises(ValueError, match="line 2"):
        load_population(f)

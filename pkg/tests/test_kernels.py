"""Backend parity: compiled and pure-Python kernels must agree bit for bit."""

import math

import numpy as np
import pytest
from numpy.random import Generator, PCG64, SeedSequence

from finpop import Design, Population, compute_moments, family_power, standardize
from finpop._backend import active_backend, available_backends, get_kernels
from finpop.sampling import exact_tail_enum, mc_tail_sum, mc_tail_t, _block_sizes

BOTH = len(available_backends()) >= 2
needs_both = pytest.mark.skipif(not BOTH, reason="only one backend compiled")


def _rng(seed):
    return Generator(PCG64(SeedSequence(entropy=seed, spawn_key=(0,))))


def _setup(N=60, n=15):
    pop = standardize(family_power(N, 1.0))
    d = Design(N=N, n=n)
    return pop.values, d


@needs_both
def test_sum_kernel_bit_identical():
    vals, d = _setup()
    counts = [
        get_kernels(name).count_sum_tail(vals, d.n, 1.3 * d.omega_N, 5000, _rng(7))
        for name in available_backends()
    ]
    assert counts[0] == counts[1]


@needs_both
def test_t_kernel_bit_identical():
    vals, d = _setup()
    out = [
        get_kernels(name).count_t_tail(vals, 0.0, d.n, d.q, 1.5, 5000, _rng(11))
        for name in available_backends()
    ]
    assert out[0] == out[1]


@needs_both
def test_bernoulli_kernel_bit_identical():
    vals, d = _setup()
    out = [
        get_kernels(name).count_bernoulli_sum(vals, d.p, d.n, 1.0 * d.omega_N, 2000, 10_000_000, _rng(13))
        for name in available_backends()
    ]
    assert out[0] == out[1]


def test_sum_counts_against_enumeration():
    pop = standardize(family_power(16, 1.0))
    d = Design(N=16, n=5)
    x = 1.0
    exact = exact_tail_enum(pop, d.n, "sum", x * d.omega_N)
    est = mc_tail_sum(pop, d, x, reps=40000, seed=5)
    assert abs(est.p_hat - exact.p_hat) <= 4 * est.stderr


def test_t_kernel_degenerate_counting():
    # 4 of C(5,3)=10 subsets of [0,0,0,0,1] are constant
    pop = Population(np.array([0.0, 0.0, 0.0, 0.0, 1.0]))
    d = Design(N=5, n=3)
    est = mc_tail_t(pop, d, 0.5, reps=30000, seed=9)
    frac = est.diagnostics["degenerate"] / est.reps
    se = math.sqrt(0.4 * 0.6 / est.reps)
    assert abs(frac - 0.4) <= 4 * se
    exact = exact_tail_enum(pop, d.n, "t", 0.5)
    assert abs(est.p_hat - exact.p_hat) <= 4 * est.stderr + 4 * math.sqrt(
        exact.p_hat * (1 - exact.p_hat) / est.reps
    )


def test_block_sizes_partition_remainder_first():
    assert _block_sizes(10, 3) == [4, 3, 3]
    assert _block_sizes(9, 3) == [3, 3, 3]
    # one entry per worker even when some blocks are empty
    assert _block_sizes(2, 5) == [1, 1, 0, 0, 0]
    for reps, workers in ((1, 1), (100, 7), (1000, 4)):
        sizes = _block_sizes(reps, workers)
        assert sum(sizes) == reps
        assert sorted(sizes, reverse=True) == sizes


def test_get_kernels_selection(monkeypatch):
    with pytest.raises(ValueError):
        get_kernels("fortran")
    monkeypatch.setenv("FINPOP_BACKEND", "python")
    assert active_backend() == "python"
    monkeypatch.setenv("FINPOP_BACKEND", "auto")
    assert active_backend() in available_backends()


def test_worker_split_is_deterministic():
    pop = standardize(family_power(40, 2.0))
    d = Design(N=40, n=10)
    a = mc_tail_sum(pop, d, 1.2, reps=9001, seed=77, workers=2)
    b = mc_tail_sum(pop, d, 1.2, reps=9001, seed=77, workers=2)
    assert a.p_hat == b.p_hat and a.diagnostics["hits"] == b.diagnostics["hits"]


@needs_both
def test_worker_count_does_not_change_backend_agreement():
    pop = standardize(family_power(40, 1.0))
    d = Design(N=40, n=10)
    res = {
        name: mc_tail_t(pop, d, 1.0, reps=8000, seed=3, workers=3, backend=name)
        for name in available_backends()
    }
    vals = list(res.values())
    assert vals[0].p_hat == vals[1].p_hat
    assert vals[0].diagnostics == vals[1].diagnostics

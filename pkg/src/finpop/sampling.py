"""Sampling without replacement: sample statistics, Monte Carlo tails, exact oracles.

All tail events are closed (>=).  Monte Carlo runs are deterministic
given (seed, reps, workers): replications are split into ``workers``
contiguous blocks (remainder spread over the first blocks), block j
drawing from PCG64 seeded with SeedSequence(entropy=seed, spawn_key=(j,)),
and the per-block hit counts are summed, which is order independent.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _enum
from ._backend import get_kernels
from .bounds import x0_transform
from .population import Design, Population, compute_moments, is_standardized

__all__ = [
    "Sample",
    "SampleStats",
    "TailEstimate",
    "draw_sample",
    "sample_stats",
    "mc_tail_sum",
    "mc_tail_t",
    "mc_tail_quadratic_tilt",
    "exact_tail_enum",
    "exact_tail_dp",
    "bernoulli_conditioned_tail",
    "t_identity_check",
    "wilson_interval",
]


class DegenerateSampleError(ValueError):
    """The sample is constant: sigma_hat = 0 and t_n is undefined."""


@dataclass(frozen=True)
class Sample:
    """n distinct units; indices are 1-based unit labels into the population."""

    indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        idx = np.asarray(self.indices, dtype=np.int64)
        if len(np.unique(idx)) != idx.size:
            raise ValueError("sample indices must be distinct")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class SampleStats:
    S_n: float
    Xbar: float
    Vn2: float
    V1n: float | None
    V2n: float | None
    sigma_hat2: float
    t_n: float | None  # None when the sample is constant


@dataclass(frozen=True)
class TailEstimate:
    p_hat: float
    stderr: float
    reps: int
    method: str  # mc | enum | dp | bernoulli_conditioned
    diagnostics: dict = field(default_factory=dict)


def wilson_interval(hits: int, reps: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """95% Wilson score interval for a binomial proportion."""
    if reps <= 0:
        raise ValueError("reps must be positive")
    phat = hits / reps
    z2 = z * z
    denom = 1.0 + z2 / reps
    center = (phat + z2 / (2 * reps)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / reps + z2 / (4 * reps * reps)) / denom
    # at the boundary counts center == half exactly, up to one rounding error
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == reps else min(1.0, center + half)
    return (lo, hi)


def draw_sample(pop: Population, n: int, rng: np.random.Generator) -> Sample:
    """One SRSWOR draw via a partial Fisher-Yates pass (n uniforms consumed)."""
    N = pop.N
    if not (1 <= n < N):
        raise ValueError(f"need 1 <= n < N, got n={n}, N={N}")
    idx = np.arange(N)
    for i in range(n):
        j = i + int(rng.random() * (N - i))
        idx[i], idx[j] = idx[j], idx[i]
    chosen = idx[:n]
    return Sample(indices=chosen + 1, values=pop.values[chosen])


def sample_stats(
    s: Sample,
    d: Design,
    standardized: bool = False,
    pop: Population | None = None,
    mu: float = 0.0,
) -> SampleStats:
    """Sample statistics entering the tail events.

    V1n and V2n make sense on standardized values only; V2n additionally
    needs the population (its centering term is the population mean of
    (a^2-1)^2), so it stays None unless ``pop`` is supplied.  ``mu`` is
    the population mean used by the t-statistic (0 when standardized).
    A constant sample has sigma_hat2 = 0 and t_n = None.
    """
    v = s.values
    n = v.size
    if n < 2:
        raise ValueError("sample statistics need n >= 2")
    S_n = float(v.sum())
    Xbar = S_n / n
    Vn2 = float(v @ v)
    V1n = Vn2 - n if standardized else None
    V2n = None
    if standardized and pop is not None:
        a2m1 = pop.values**2 - 1.0
        V2n = float(((v * v - 1.0) ** 2).sum() - n * np.mean(a2m1 * a2m1))
    ssq = float(((v - Xbar) ** 2).sum())
    sigma_hat2 = ssq / (n - 1)
    # same degeneracy floor as the MC kernels: centered sum of squares
    # below the rounding noise of the raw one means a constant sample
    eps = float(np.finfo(np.float64).eps)
    if ssq <= Vn2 * (n * eps) * (n * eps):
        t_n = None
    else:
        t_n = math.sqrt(n) * (Xbar - mu) / (math.sqrt(sigma_hat2) * math.sqrt(d.q))
    return SampleStats(S_n=S_n, Xbar=Xbar, Vn2=Vn2, V1n=V1n, V2n=V2n,
                       sigma_hat2=sigma_hat2, t_n=t_n)


# ---------------------------------------------------------------------------
# Monte Carlo engine


def _block_sizes(reps: int, workers: int) -> list[int]:
    base, extra = divmod(reps, workers)
    return [base + 1 if j < extra else base for j in range(workers)]


def _block_rng(seed: int, j: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(j,))))


def _run_blocks(fn, reps: int, seed: int, workers: int) -> list:
    """fn(block_reps, rng) per block; results returned in block order."""
    if workers < 1:
        raise ValueError("workers must be >= 1")
    sizes = _block_sizes(reps, workers)
    if workers == 1:
        return [fn(sizes[0], _block_rng(seed, 0))]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        futs = [ex.submit(fn, sizes[j], _block_rng(seed, j)) for j in range(workers)]
        return [f.result() for f in futs]


def mc_tail_sum(
    pop: Population,
    d: Design,
    x: float,
    reps: int,
    seed: int,
    workers: int = 1,
    backend: str | None = None,
) -> TailEstimate:
    """Estimate P(S_n - n mu >= x sigma omega_N) over ``reps`` SRSWOR draws."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if x < 0:
        raise ValueError("x must be nonnegative")
    m = compute_moments(pop)
    threshold = d.n * m.mu + x * m.sigma * d.omega_N
    kern = get_kernels(backend)
    values = np.ascontiguousarray(pop.values)
    counts = _run_blocks(
        lambda r, rng: kern.count_sum_tail(values, d.n, threshold, r, rng),
        reps, seed, workers,
    )
    hits = int(sum(counts))
    p_hat = hits / reps
    return TailEstimate(
        p_hat=p_hat,
        stderr=math.sqrt(p_hat * (1.0 - p_hat) / reps),
        reps=reps,
        method="mc",
        diagnostics={"hits": hits, "threshold": threshold},
    )


def mc_tail_t(
    pop: Population,
    d: Design,
    x: float,
    reps: int,
    seed: int,
    workers: int = 1,
    backend: str | None = None,
) -> TailEstimate:
    """Estimate P(t_n >= x); constant samples are non-exceedances, tallied separately."""
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if d.n < 2:
        raise ValueError("the t statistic needs n >= 2")
    m = compute_moments(pop)
    kern = get_kernels(backend)
    values = np.ascontiguousarray(pop.values)
    results = _run_blocks(
        lambda r, rng: kern.count_t_tail(values, m.mu, d.n, d.q, x, r, rng),
        reps, seed, workers,
    )
    hits = int(sum(h for h, _ in results))
    degenerate = int(sum(g for _, g in results))
    p_hat = hits / reps
    return TailEstimate(
        p_hat=p_hat,
        stderr=math.sqrt(p_hat * (1.0 - p_hat) / reps),
        reps=reps,
        method="mc",
        diagnostics={"hits": hits, "degenerate": degenerate},
    )


def quadratic_tilt_values(pop_std: Population, d: Design, x: float, xi: float, xi1: float) -> np.ndarray:
    """Per-unit contributions c_k of the quadratic-tilt statistic.

    The statistic b S_n - xi b^2 q V1n + xi1 b^4 q^2 V2n (b = x/omega_N)
    telescopes into a plain sample sum of

        c_k = b a_k - xi b^2 q (a_k^2-1) + xi1 b^4 q^2 [(a_k^2-1)^2 - mean_j (a_j^2-1)^2],

    so the sum kernel estimates its tail directly.
    """
    a = pop_std.values
    b = x / d.omega_N
    q = d.q
    a2m1 = a * a - 1.0
    quart = a2m1 * a2m1
    return b * a - xi * b * b * q * a2m1 + xi1 * b**4 * q * q * (quart - quart.mean())


def mc_tail_quadratic_tilt(
    pop: Population,
    d: Design,
    x: float,
    xi: float,
    xi1: float,
    h: float,
    reps: int,
    seed: int,
    workers: int = 1,
    backend: str | None = None,
) -> TailEstimate:
    """Estimate P(b S_n - xi b^2 q V1n + xi1 b^4 q^2 V2n >= x^2 + h), b = x/omega_N.

    Requires a standardized population.  Parameters outside the box
    0 <= xi <= 1/2, |xi1| <= 36, |h| <= x^2/5 are allowed but flagged
    in diagnostics["in_regime"].
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    if not is_standardized(pop):
        raise ValueError("quadratic-tilt statistic requires a standardized population")
    c = quadratic_tilt_values(pop, d, x, xi, xi1)
    threshold = x * x + h
    kern = get_kernels(backend)
    values = np.ascontiguousarray(c)
    counts = _run_blocks(
        lambda r, rng: kern.count_sum_tail(values, d.n, threshold, r, rng),
        reps, seed, workers,
    )
    hits = int(sum(counts))
    p_hat = hits / reps
    in_regime = (0.0 <= xi <= 0.5) and abs(xi1) <= 36.0 and abs(h) <= x * x / 5.0
    return TailEstimate(
        p_hat=p_hat,
        stderr=math.sqrt(p_hat * (1.0 - p_hat) / reps),
        reps=reps,
        method="mc",
        diagnostics={"hits": hits, "threshold": threshold, "in_regime": in_regime},
    )


# ---------------------------------------------------------------------------
# Exact oracles


def exact_tail_enum(
    pop: Population,
    n: int,
    statistic: str,
    threshold: float,
    x: float | None = None,
    xi: float = 0.0,
    xi1: float = 0.0,
) -> TailEstimate:
    """Exact tail by enumerating every n-subset (guard: C(N,n) <= 10^7).

    statistic: "sum" counts subsets with S_n >= threshold; "t" counts
    t_n >= threshold (constant subsets excluded, as in the MC
    convention); "quadratic_tilt" counts the quadratic statistic built
    from (x, xi, xi1) against threshold (pass x^2 + h as the threshold).
    """
    N = pop.N
    if not (1 <= n < N):
        raise ValueError(f"need 1 <= n < N, got n={n}, N={N}")
    total = _enum.check_enum_size(N, n)
    d = Design(N=N, n=n)

    if statistic == "sum":
        v = pop.values
    elif statistic == "quadratic_tilt":
        if x is None:
            raise ValueError("quadratic_tilt enumeration needs x")
        if not is_standardized(pop):
            raise ValueError("quadratic_tilt requires a standardized population")
        v = quadratic_tilt_values(pop, d, x, xi, xi1)
    elif statistic == "t":
        if n < 2:
            raise ValueError("the t statistic needs n >= 2")
        v = pop.values
    else:
        raise ValueError(f"unknown statistic {statistic!r}")

    count = 0
    degenerate = 0
    if statistic in ("sum", "quadratic_tilt"):
        for idx in _enum.iter_index_chunks(N, n):
            count += int(np.count_nonzero(v[idx].sum(axis=1) >= threshold))
    else:
        mu = float(pop.values.mean())
        for idx in _enum.iter_index_chunks(N, n):
            sub = v[idx]
            mean = sub.mean(axis=1)
            ssq = ((sub - mean[:, None]) ** 2).sum(axis=1)
            sumsq = (sub * sub).sum(axis=1)
            deg_tol = (n * np.finfo(np.float64).eps) * (n * np.finfo(np.float64).eps)
            degen = ssq <= sumsq * deg_tol
            lhs = math.sqrt(n) * (mean - mu)
            rhs = threshold * np.sqrt(d.q * ssq / (n - 1))
            count += int(np.count_nonzero(~degen & (lhs >= rhs)))
            degenerate += int(np.count_nonzero(degen))

    return TailEstimate(
        p_hat=count / total,
        stderr=0.0,
        reps=0,
        method="enum",
        diagnostics={"count": count, "total": total, "degenerate": degenerate},
    )


def exact_tail_dp(pop: Population, n: int, threshold: float) -> TailEstimate:
    """Exact P(S_n >= threshold) for integer populations by subset-count DP.

    Values are shifted by their minimum so sums index a dense table;
    counts are exact Python integers, the final probability an exact
    Fraction (reported in diagnostics) on top of the float p_hat.
    """
    v = pop.values
    if not np.all(v == np.round(v)):
        raise ValueError("DP oracle needs an integer-valued population")
    N = pop.N
    if not (1 <= n < N):
        raise ValueError(f"need 1 <= n < N, got n={n}, N={N}")
    ints = [int(round(val)) for val in v]
    shift = min(ints)
    w = [val - shift for val in ints]
    max_sum = sum(sorted(w)[-n:])
    if N * n * (max_sum + 1) > 10**9:
        raise ValueError("DP table would exceed the 1e9-cell guard")

    # count[j][s]: number of j-subsets of the processed prefix with shifted sum s
    count = [[0] * (max_sum + 1) for _ in range(n + 1)]
    count[0][0] = 1
    for item in w:
        hi = min(n - 1, N)  # rows above j never feed row j+1
        for j in range(hi, -1, -1):
            row = count[j]
            nxt = count[j + 1]
            if item == 0:
                for s0 in range(max_sum + 1):
                    c = row[s0]
                    if c:
                        nxt[s0] += c
            else:
                for s0 in range(max_sum - item, -1, -1):
                    c = row[s0]
                    if c:
                        nxt[s0 + item] += c

    qualifying = sum(c for s0, c in enumerate(count[n]) if s0 + n * shift >= threshold)
    total = _enum.n_subsets(N, n)
    frac = Fraction(qualifying, total)
    return TailEstimate(
        p_hat=float(frac),
        stderr=0.0,
        reps=0,
        method="dp",
        diagnostics={"count": qualifying, "total": total, "fraction": frac},
    )


def bernoulli_conditioned_tail(
    pop: Population,
    d: Design,
    x: float,
    reps: int,
    seed: int,
    backend: str | None = None,
) -> TailEstimate:
    """Estimate P(S_n - n mu >= x sigma omega_N) by conditioned Bernoulli sampling.

    Draws i.i.d. Bernoulli(p) inclusion vectors and keeps those with
    exactly n inclusions (the conditioning event B_N = 0), under which
    the included units form an SRSWOR sample.  ``reps`` counts accepted
    vectors.  Refuses when the acceptance probability C(N,n) p^n q^{N-n}
    is below 1e-6.
    """
    if reps < 1:
        raise ValueError("reps must be >= 1")
    log_acc = (
        math.lgamma(d.N + 1) - math.lgamma(d.n + 1) - math.lgamma(d.N - d.n + 1)
        + d.n * math.log(d.p) + (d.N - d.n) * math.log(d.q)
    )
    acc = math.exp(log_acc)
    if acc < 1e-6:
        raise ValueError(
            f"acceptance probability {acc:.2e} below 1e-6; rejection sampling infeasible"
        )
    m = compute_moments(pop)
    threshold = d.n * m.mu + x * m.sigma * d.omega_N
    max_attempts = int(50 * reps / acc) + 10000
    kern = get_kernels(backend)
    values = np.ascontiguousarray(pop.values)
    rng = _block_rng(seed, 0)
    hits, accepted, attempts = kern.count_bernoulli_sum(
        values, d.p, d.n, threshold, reps, max_attempts, rng
    )
    if accepted < reps:
        raise RuntimeError(
            f"only {accepted}/{reps} acceptances in {attempts} attempts "
            f"(acceptance probability {acc:.2e})"
        )
    p_hat = hits / accepted
    return TailEstimate(
        p_hat=p_hat,
        stderr=math.sqrt(p_hat * (1.0 - p_hat) / accepted),
        reps=accepted,
        method="bernoulli_conditioned",
        diagnostics={"hits": hits, "attempts": attempts, "acceptance_rate": acc},
    )


def t_identity_check(s: Sample, d: Design, x: float) -> bool:
    """Per-sample identity: I(t_n >= x) must equal I(S_n/V_n >= x0 sqrt(q)).

    Requires a standardized population (mu = 0).  Samples with V_n = 0
    or a constant sample are indeterminate and raise.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    st = sample_stats(s, d, standardized=True)
    if st.Vn2 <= 0.0:
        raise DegenerateSampleError("V_n = 0: identity indeterminate")
    if st.t_n is None:
        raise DegenerateSampleError("constant sample: t_n undefined")
    left = st.t_n >= x
    x0 = x0_transform(x, s.n, d.q).x0
    right = st.S_n / math.sqrt(st.Vn2) >= x0 * math.sqrt(d.q)
    return left == right

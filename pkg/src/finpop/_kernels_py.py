"""Pure-numpy Monte Carlo kernels.

Fallback twin of the compiled kernels.  Both backends consume the
generator's uniform stream in the same order (n doubles per replication
for the sampling kernels, N per attempt for the Bernoulli kernel) and
perform the per-replication float operations in the same sequence, so
identical streams give identical counts.

Sampling is a partial Fisher-Yates pass over a fresh identity
permutation per replication: step i swaps position i with
j = i + floor(u * (N - i)), which selects each n-subset equiprobably.
Replications are vectorized as rows of a chunk; the column loop keeps
every accumulation sequential per row, matching the compiled loop's
rounding.
"""

from __future__ import annotations

import numpy as np

_CHUNK = 4096


def count_sum_tail(values, n, threshold, reps, rng) -> int:
    """Number of replications with sample sum >= threshold."""
    v = np.asarray(values, dtype=np.float64)
    N = v.size
    base = np.arange(N, dtype=np.intp)
    hits = 0
    left = int(reps)
    while left > 0:
        m = min(_CHUNK, left)
        u = rng.random((m, n))
        idx = np.tile(base, (m, 1))
        rows = np.arange(m)
        s = np.zeros(m)
        for i in range(n):
            j = i + (u[:, i] * (N - i)).astype(np.intp)
            picked = idx[rows, j]
            idx[rows, j] = idx[rows, i]
            idx[rows, i] = picked
            s += v[picked]
        hits += int(np.count_nonzero(s >= threshold))
        left -= m
    return hits


def count_t_tail(values, mu, n, q, x, reps, rng) -> tuple[int, int]:
    """Count sqrt(n)(Xbar - mu) >= x sqrt(q ssq/(n-1)); constant samples tallied apart.

    Degeneracy test: ssq <= sumsq * (n eps)^2, i.e. the centered sum of
    squares fell below the rounding floor of the raw one.  Degenerate
    samples never count as exceedances.
    """
    v = np.asarray(values, dtype=np.float64)
    N = v.size
    base = np.arange(N, dtype=np.intp)
    sqrt_n = np.sqrt(float(n))
    deg_tol = (n * np.finfo(np.float64).eps) * (n * np.finfo(np.float64).eps)
    hits = 0
    degenerate = 0
    left = int(reps)
    while left > 0:
        m = min(_CHUNK, left)
        u = rng.random((m, n))
        idx = np.tile(base, (m, 1))
        rows = np.arange(m)
        s = np.zeros(m)
        sumsq = np.zeros(m)
        buf = np.empty((m, n))
        for i in range(n):
            j = i + (u[:, i] * (N - i)).astype(np.intp)
            picked = idx[rows, j]
            idx[rows, j] = idx[rows, i]
            idx[rows, i] = picked
            val = v[picked]
            buf[:, i] = val
            s += val
            sumsq += val * val
        mean = s / n
        ssq = np.zeros(m)
        for i in range(n):
            dev = buf[:, i] - mean
            ssq += dev * dev
        degen = ssq <= sumsq * deg_tol
        lhs = sqrt_n * (mean - mu)
        rhs = x * np.sqrt(q * ssq / (n - 1))
        hits += int(np.count_nonzero(~degen & (lhs >= rhs)))
        degenerate += int(np.count_nonzero(degen))
        left -= m
    return hits, degenerate


def count_bernoulli_sum(values, p, n, threshold, accept_target, max_attempts, rng):
    """Rejection sampler: i.i.d. Bernoulli(p) inclusion vectors kept only
    when exactly n units enter; returns (hits, accepted, attempts)."""
    v = np.asarray(values, dtype=np.float64)
    N = v.size
    hits = 0
    accepted = 0
    attempts = 0
    while accepted < accept_target and attempts < max_attempts:
        m = min(_CHUNK, max_attempts - attempts)
        u = rng.random((m, N))
        inc = u < p
        s = np.zeros(m)
        for k in range(N):
            s += np.where(inc[:, k], v[k], 0.0)
        counts = inc.sum(axis=1)
        ok = counts == n
        # keep only as many acceptances as still needed, in stream order
        ok_rows = np.flatnonzero(ok)
        if ok_rows.size > accept_target - accepted:
            cut = ok_rows[accept_target - accepted - 1]
            attempts += int(cut) + 1
            ok_rows = ok_rows[: accept_target - accepted]
        else:
            attempts += m
        accepted += int(ok_rows.size)
        hits += int(np.count_nonzero(s[ok_rows] >= threshold))
    return hits, accepted, attempts

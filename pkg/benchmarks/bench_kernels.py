"""Benchmark the compiled kernels against the pure-python fallback.

Times the three Monte Carlo counting kernels on a table-scale
configuration (N = 1000, n = 250) and a small one (N = 100, n = 25),
printing reps/second per backend and the speedup.  Both backends
consume the identical uniform stream, so the counts double as a
bit-identity check.

Run:  python3 benchmarks/bench_kernels.py [--reps 20000]
"""

import argparse
import time

import numpy as np

from finpop import family_power, standardize
from finpop._backend import available_backends, get_kernels


def _rng(seed):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(0,))))


def bench(name, fn, reps):
    t0 = time.perf_counter()
    out = fn()
    dt = time.perf_counter() - t0
    rate = reps / dt if dt > 0 else float("inf")
    return out, dt, rate


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20000)
    ap.add_argument("--seed", type=int, default=12345)
    args = ap.parse_args()

    backends = available_backends()
    print(f"available backends: {backends}")
    if len(backends) < 2:
        print("only one backend present; timing it alone")

    for N, n in ((1000, 250), (100, 25)):
        pop = standardize(family_power(N, 1.0))
        vals = np.ascontiguousarray(pop.values)
        q = 1.0 - n / N
        print(f"\nN={N} n={n} reps={args.reps}")
        cases = {
            "sum_tail": lambda k, r: k.count_sum_tail(vals, n, 2.0 * np.sqrt(n * q), r, _rng(args.seed)),
            "t_tail": lambda k, r: k.count_t_tail(vals, 0.0, n, q, 2.0, r, _rng(args.seed)),
            "bernoulli": lambda k, r: k.count_bernoulli_sum(
                vals, n / N, n, 2.0 * np.sqrt(n * q), r, 100 * r, _rng(args.seed)
            ),
        }
        for case, runner in cases.items():
            results = {}
            for b in backends:
                kern = get_kernels(b)
                out, dt, rate = bench(case, lambda: runner(kern, args.reps), args.reps)
                results[b] = (out, dt, rate)
                print(f"  {case:10s} {b:7s} {dt*1e3:9.1f} ms   {rate:12.0f} reps/s")
            if len(results) == 2:
                (o1, t1, _), (o2, t2, _) = results["cython"], results["python"]
                tag = "counts match" if o1 == o2 else f"COUNT MISMATCH {o1} vs {o2}"
                print(f"  {case:10s} speedup cython/python: {t2/t1:6.1f}x   ({tag})")


if __name__ == "__main__":
    main()

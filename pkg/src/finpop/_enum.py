"""Chunked exhaustive enumeration of n-subsets.

Shared by the exact oracles; hard-capped at 10^7 subsets so nobody
accidentally turns a desk-scale check into an overnight job.
"""

from __future__ import annotations

import itertools
import math

import numpy as np

ENUM_LIMIT = 10**7


def n_subsets(N: int, n: int) -> int:
    return math.comb(N, n)


def check_enum_size(N: int, n: int) -> int:
    total = n_subsets(N, n)
    if total > ENUM_LIMIT:
        raise ValueError(f"C({N},{n}) = {total} exceeds enumeration cap {ENUM_LIMIT}")
    return total


def iter_index_chunks(N: int, n: int, chunk: int = 1 << 16):
    """Yield (m, n) integer arrays covering all C(N,n) index subsets."""
    it = itertools.combinations(range(N), n)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        flat = np.fromiter(
            itertools.chain.from_iterable(block), dtype=np.intp, count=len(block) * n
        )
        yield flat.reshape(len(block), n)

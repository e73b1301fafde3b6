"""Finite populations, their moments, and valid-x ranges.

A population is the plain list of unit values ``a_1..a_N``.  All moments
use the divide-by-N convention (a population is its own distribution),
never the (N-1) sample convention.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "Population",
    "PopulationMoments",
    "Design",
    "compute_moments",
    "standardize",
    "family_power",
    "valid_x_range",
    "load_population",
]


class DegeneratePopulationError(ValueError):
    """All population values equal; every statistic of interest is trivial."""


@dataclass(frozen=True)
class Population:
    """Ordered finite population of real unit values.

    Rejects populations with fewer than two units or with all units
    equal, which would make sigma^2 = 0.
    """

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1:
            raise ValueError("population values must be one-dimensional")
        if vals.size < 2:
            raise DegeneratePopulationError("population needs at least 2 units")
        if not np.all(np.isfinite(vals)):
            raise ValueError("population values must be finite")
        if np.all(vals == vals[0]):
            raise DegeneratePopulationError("all population values are equal")
        object.__setattr__(self, "values", vals)

    @property
    def N(self) -> int:
        return int(self.values.size)

    def __eq__(self, other):
        if not isinstance(other, Population):
            return NotImplemented
        return np.array_equal(self.values, other.values)


@dataclass(frozen=True)
class PopulationMoments:
    mu: float
    sigma2: float
    beta3N: float
    max_dev: float

    @property
    def sigma(self) -> float:
        return float(np.sqrt(self.sigma2))


@dataclass(frozen=True)
class Design:
    """Sampling design: n units without replacement out of N.

    omega_N = sqrt(N p q) is the natural variance scale of the
    standardized sum; with sigma = 1 it equals sqrt(n q).
    """

    N: int
    n: int
    p: float = field(init=False)
    q: float = field(init=False)
    omega_N: float = field(init=False)

    def __post_init__(self):
        if not (0 < self.n < self.N):
            raise ValueError(f"need 0 < n < N, got n={self.n}, N={self.N}")
        p = self.n / self.N
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", 1.0 - p)
        object.__setattr__(self, "omega_N", float(np.sqrt(self.N * p * (1.0 - p))))


def compute_moments(pop: Population) -> PopulationMoments:
    """Population mean, variance, standardized third absolute moment, max deviation.

    beta3N = E|X - mu|^3 / sigma^3 is scale-free and >= 1 by Lyapunov's
    inequality; it is the only population functional entering the tail
    envelopes.
    """
    a = pop.values
    mu = float(a.mean())
    dev = a - mu
    sigma2 = float(np.mean(dev * dev))
    if sigma2 <= 0.0:
        raise DegeneratePopulationError("population variance is zero")
    sigma = np.sqrt(sigma2)
    beta3N = float(np.mean(np.abs(dev) ** 3) / sigma**3)
    max_dev = float(np.max(np.abs(dev)))
    return PopulationMoments(mu=mu, sigma2=sigma2, beta3N=beta3N, max_dev=max_dev)


def standardize(pop: Population) -> Population:
    """Affine map to mean 0, variance 1 (population convention).

    Idempotent and order-preserving; beta3N is unchanged.
    """
    m = compute_moments(pop)
    return Population((pop.values - m.mu) / m.sigma)


def is_standardized(pop: Population, tol: float = 1e-9) -> bool:
    """Sum of values ~ 0 and sum of squares ~ N, within tol*N."""
    a = pop.values
    N = a.size
    return abs(float(a.sum())) <= tol * N and abs(float(a @ a) - N) <= tol * N


def family_power(N: int, alpha: float) -> Population:
    """Population a_k = k^alpha, k = 1..N.

    Only alpha > -1/3 is accepted: below that the third-moment scale
    degenerates as N grows and the valid-x range collapses.
    """
    if N < 2:
        raise ValueError("need N >= 2")
    if alpha <= -1.0 / 3.0:
        raise ValueError(f"alpha must exceed -1/3, got {alpha}")
    k = np.arange(1, N + 1, dtype=np.float64)
    return Population(k**alpha)


def valid_x_range(m: PopulationMoments, d: Design, A: float = 1.0) -> tuple[float, float]:
    """Range caps for the envelope and band statements.

    Returns ``(x_max_sum, x_max_band)``:
    the envelope for the standardized sum (and the t-statistic) is
    stated for 0 <= x <= (1/A) * omega_N * sigma / max_dev, while the
    relative-error band needs the tighter
    (1/A) * min(omega_N * sigma / max_dev, (omega_N / beta3N)^(1/3)).
    """
    if A <= 0:
        raise ValueError("A must be positive")
    cap_ratio = d.omega_N * m.sigma / m.max_dev
    x_max_thm11 = cap_ratio / A
    x_max_thm12 = min(cap_ratio, (d.omega_N / m.beta3N) ** (1.0 / 3.0)) / A
    return (x_max_thm11, x_max_thm12)


def load_population(path) -> Population:
    """Read one value per line; a single leading header line "value" is allowed."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if lineno == 1 and line.lower() == "value":
                continue
            try:
                # tolerate U+2212 minus from copy-pasted tables
                values.append(float(line.replace("−", "-")))
            except ValueError:
                raise ValueError(f"{path}: unparseable value at line {lineno}: {line!r}") from None
    if len(values) < 2:
        raise DegeneratePopulationError(f"{path}: fewer than 2 values")
    return Population(np.array(values, dtype=np.float64))

"""Normal-tail primitives and the large-deviation envelope calculators.

The envelope statements control P(event)/(1 - Phi(x)) multiplicatively by
exp{+-A(1+x)^3 beta3N / omega_N} over an explicit x-range.  A is an
unspecified absolute constant, so it is a caller-supplied parameter
everywhere, and implied_A inverts the envelope on observed ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.special import erfcx

from .population import Design, PopulationMoments, valid_x_range

__all__ = [
    "BoundEnvelope",
    "X0Result",
    "normal_tail",
    "mills_psi",
    "thm11_envelope",
    "thm12_band",
    "x0_transform",
    "implied_A",
]

_SQRT2 = math.sqrt(2.0)
_SQRT_HALF_PI = math.sqrt(math.pi / 2.0)


def normal_tail(x: float) -> float:
    """1 - Phi(x) via the complementary error function.

    erfc is computed with its own asymptotic branch internally, so the
    relative error stays ~1e-15 out to x = 8 and beyond; no separate
    large-x branch is needed here.
    """
    return 0.5 * math.erfc(x / _SQRT2)


def mills_psi(t: float) -> float:
    """Mills ratio psi(t) = (1 - Phi(t)) / phi(t), for t > 0.

    Evaluated as sqrt(pi/2) * erfcx(t / sqrt(2)); erfcx is the scaled
    complementary error function, so the e^{t^2/2} growth and the tail
    decay cancel analytically instead of as a 0/0 float quotient.
    """
    if t <= 0:
        raise ValueError("mills_psi requires t > 0")
    return _SQRT_HALF_PI * float(erfcx(t / _SQRT2))


@dataclass(frozen=True)
class BoundEnvelope:
    lower: float
    upper: float
    x: float
    A: float
    beta3N: float
    omega_N: float
    in_range: bool


@dataclass(frozen=True)
class X0Result:
    x0: float
    b0: float
    rel_dev: float


def thm11_envelope(x: float, m: PopulationMoments, d: Design, A: float) -> BoundEnvelope:
    """Two-sided envelope exp{+-E}, E = A(1+x)^3 beta3N / omega_N.

    The same envelope serves the standardized-sum tail and the
    t-statistic tail.  Out-of-range x is not an error: the returned
    in_range flag records whether x <= (1/A) omega_N sigma / max_dev,
    since probing where the bound degrades is a primary use.
    """
    if A <= 0:
        raise ValueError("A must be positive")
    if x < 0:
        raise ValueError("x must be nonnegative")
    E = A * (1.0 + x) ** 3 * m.beta3N / d.omega_N
    x_max, _ = valid_x_range(m, d, A)
    return BoundEnvelope(
        lower=math.exp(-E),
        upper=math.exp(E),
        x=x,
        A=A,
        beta3N=m.beta3N,
        omega_N=d.omega_N,
        in_range=bool(x <= x_max),
    )


def thm12_band(x: float, m: PopulationMoments, d: Design, A: float) -> tuple[float, float]:
    """Relative-error band and nonuniform Berry-Esseen bound.

    Returns ``(relative_band, be_bound)`` where
    relative_band = A(1+x)^3 beta3N / omega_N bounds
    |P/(1-Phi) - 1| and
    be_bound = A(1+|x|)^2 e^{-x^2/2} beta3N / omega_N bounds the
    absolute CDF error.
    """
    if A <= 0:
        raise ValueError("A must be positive")
    scale = m.beta3N / d.omega_N
    relative_band = A * (1.0 + x) ** 3 * scale
    be_bound = A * (1.0 + abs(x)) ** 2 * math.exp(-0.5 * x * x) * scale
    return (relative_band, be_bound)


def x0_transform(x: float, n: int, q: float) -> X0Result:
    """Threshold map x -> x0 for the self-normalized reduction.

    x0 = x sqrt(n) / sqrt(n + x^2 q - 1) turns the t-tail event into
    {S_n / V_n >= x0 sqrt(q)}.  b0 = x0/omega_N with omega_N = sqrt(nq)
    (standardized values, p = n/N).  rel_dev = |x0/x - 1| is reported
    for diagnostics; it is bounded by 2x^2/n in the large-x regime the
    reduction is used in, but not for small x, so no assertion here.
    """
    if x < 0:
        raise ValueError("x must be nonnegative")
    radicand = n + x * x * q - 1.0
    if radicand <= 0:
        raise ValueError(f"nonpositive radicand n + x^2 q - 1 = {radicand}")
    x0 = x * math.sqrt(n) / math.sqrt(radicand)
    omega = math.sqrt(n * q)
    rel_dev = abs(x0 / x - 1.0) if x > 0 else 0.0
    return X0Result(x0=x0, b0=x0 / omega, rel_dev=rel_dev)


def implied_A(ratio: float, x: float, m: PopulationMoments, d: Design) -> float:
    """Smallest A whose envelope at x contains the observed ratio.

    |log ratio| * omega_N / ((1+x)^3 beta3N); symmetric in ratio <-> 1/ratio.
    """
    if ratio <= 0:
        raise ValueError("ratio must be positive")
    if x <= 0:
        raise ValueError("x must be positive")
    return abs(math.log(ratio)) * d.omega_N / ((1.0 + x) ** 3 * m.beta3N)

"""Exponential-tilting machinery for sums of samples without replacement.

The inclusion indicator of one unit, centered at its mean p, has
cumulant-generating-style function

    K(z) = log(p e^{qz} + q e^{-pz}),

strictly convex with K(0) = K'(0) = 0.  Tilting the sampling law by
e^{u S_n} and recentering through the root alpha_N of
sum_k K'(u b_k + alpha) = 0 makes the tail event typical under the
tilted law; the associated distribution H_n(x; u) is then approximately
normal with mean m_N and variance sigma_N^2, which is what the MGF
approximation and the saddlepoint tail assemble.

All evaluations stay in log domain where overflow is possible; K and
its derivatives are computed through expit/log1p/expm1 so they are
stable for any finite z.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp
from scipy.optimize import brentq

from . import _enum
from .bounds import mills_psi, normal_tail, x0_transform
from .population import Design, Population, is_standardized

__all__ = [
    "CgfValues",
    "TiltCoefficients",
    "TiltState",
    "MgfApprox",
    "cgf",
    "tilt_coeffs",
    "solve_alpha",
    "tilt_moments",
    "mgf_exact",
    "mgf_approx",
    "associated_cdf",
    "saddlepoint_tail",
    "saddlepoint_tail_t",
    "remainder_bound",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)

# inner centering root: |sum K'| <= ALPHA_TOL_SCALE * N * p * q
ALPHA_TOL_SCALE = 1e-12
# outer mean-matching: |m_N(u*) - y| <= SADDLE_TOL_SCALE * max(1, y)
SADDLE_TOL_SCALE = 1e-9


@dataclass(frozen=True)
class CgfValues:
    """K and its first three derivatives at a point (or grid) z."""

    K: float | np.ndarray
    K1: float | np.ndarray
    K2: float | np.ndarray
    K3: float | np.ndarray


@dataclass(frozen=True)
class TiltCoefficients:
    b_k: np.ndarray
    lam: float
    theta: float
    theta1: float
    b: float


@dataclass(frozen=True)
class TiltState:
    u: float
    alpha_N: float
    K_sum: float
    m_N: float
    sigma_N2: float
    K2_sum: float
    bK2_sum: float
    residual: float

    @property
    def sigma_N(self) -> float:
        return math.sqrt(self.sigma_N2)


@dataclass(frozen=True)
class MgfApprox:
    value: float
    Gn_p: float


def cgf(z, p: float) -> CgfValues:
    """Evaluate K(z) = log(p e^{qz} + q e^{-pz}) and derivatives.

    Writing w(z) = p e^{qz} / (p e^{qz} + q e^{-pz}) = expit(z + log(p/q)),
    the derivatives collapse to the Bernoulli-mean form

        K'(z) = w - p,  K''(z) = w(1-w),  K'''(z) = w(1-w)(1-2w),

    and K itself splits by sign of z into log1p/expm1 forms that never
    overflow.  Accepts a scalar or an ndarray.
    """
    if not (0.0 < p < 1.0):
        raise ValueError("p must lie in (0,1)")
    q = 1.0 - p
    z_arr = np.asarray(z, dtype=np.float64)
    w = expit(z_arr + (math.log(p) - math.log1p(-p)))
    K1 = w - p
    K2 = w * (1.0 - w)
    K3 = K2 * (1.0 - 2.0 * w)
    # K = c|z| + log1p(c expm1(-|z|)) with c = q on z>=0 and c = p on z<0;
    # the argument of expm1 is nonpositive, so nothing can overflow
    absz = np.abs(z_arr)
    c = np.where(z_arr >= 0, q, p)
    K = c * absz + np.log1p(c * np.expm1(-absz))
    if np.isscalar(z) or z_arr.ndim == 0:
        return CgfValues(float(K), float(K1), float(K2), float(K3))
    return CgfValues(K, K1, K2, K3)


def _k1_sum(zb: np.ndarray, alpha: float, p: float) -> float:
    w = expit(zb + alpha + (math.log(p) - math.log1p(-p)))
    return float(np.sum(w - p))


def _k2_sum(zb: np.ndarray, alpha: float, p: float) -> float:
    w = expit(zb + alpha + (math.log(p) - math.log1p(-p)))
    return float(np.sum(w * (1.0 - w)))


def tilt_coeffs(
    pop_std: Population,
    d: Design,
    x: float,
    lam: float = 1.0,
    theta: float = 0.0,
    theta1: float = 0.0,
) -> TiltCoefficients:
    """Coefficient vector b_k of the tilted statistic.

    b_k = lam*b*a_k - theta*b^2*q*(a_k^2 - 1)
          + theta1*b^4*q^2*[(a_k^2-1)^2 - mean_j (a_j^2-1)^2]

    with b = x/omega_N, on a standardized population (sum a_k = 0,
    sum a_k^2 = N), which forces sum b_k = 0.
    """
    if not is_standardized(pop_std):
        raise ValueError("tilt_coeffs requires a standardized population")
    if not (0.0 < lam <= 2.0):
        raise ValueError("lam must lie in (0, 2]")
    if not (0.0 <= theta <= 1.0):
        raise ValueError("theta must lie in [0, 1]")
    if abs(theta1) > 72.0:
        raise ValueError("|theta1| must not exceed 72")
    if x < 0:
        raise ValueError("x must be nonnegative")
    a = pop_std.values
    b = x / d.omega_N
    q = d.q
    a2m1 = a * a - 1.0
    quart = a2m1 * a2m1
    b_k = lam * b * a - theta * b * b * q * a2m1 + theta1 * b**4 * q * q * (quart - quart.mean())
    total = abs(float(b_k.sum()))
    scale = float(np.max(np.abs(b_k))) if b_k.size else 0.0
    if scale > 0 and total > 1e-9 * len(a) * scale:
        raise AssertionError(f"sum b_k = {total} not ~ 0; population not standardized enough")
    return TiltCoefficients(b_k=b_k, lam=lam, theta=theta, theta1=theta1, b=b)


def solve_alpha(coeffs, p: float, u: float = 1.0) -> float:
    """Root alpha of sum_k K'(u b_k + alpha) = 0.

    The objective is strictly increasing (K'' > 0), negative below
    -max|u b_k| and positive above +max|u b_k|, so the root is bracketed
    by construction; brentq gets within float tolerance and a couple of
    safeguarded Newton steps certify the residual target
    |sum K'| <= 1e-12 * N * p * q.
    """
    b = np.asarray(coeffs, dtype=np.float64)
    N = b.size
    q = 1.0 - p
    tol = ALPHA_TOL_SCALE * N * p * q
    zb = u * b
    big = float(np.max(np.abs(zb))) if N else 0.0

    lo, hi = -big - 0.5, big + 0.5
    # expand outward in the (unreachable) event of residual rounding at the ends
    while _k1_sum(zb, lo, p) > 0:
        lo *= 2.0
    while _k1_sum(zb, hi, p) < 0:
        hi *= 2.0

    alpha = brentq(lambda a: _k1_sum(zb, a, p), lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    r = _k1_sum(zb, alpha, p)
    for _ in range(10):
        if abs(r) <= tol:
            return float(alpha)
        alpha -= r / _k2_sum(zb, alpha, p)
        r = _k1_sum(zb, alpha, p)
    if abs(r) <= tol:
        return float(alpha)
    raise RuntimeError(f"alpha solve stalled: residual {r:.3e} exceeds tolerance {tol:.3e}")


def tilt_moments(coeffs, p: float, u: float, alpha_N: float) -> TiltState:
    """Tilted sums at z_k = u b_k + alpha_N.

    m_N = sum b_k K'_k is the tilted mean of the statistic sum b_k over
    the sample; sigma_N^2 subtracts the fixed-sample-size projection:

        sigma_N^2 = sum b_k^2 K''_k - (sum b_k K''_k)^2 / sum K''_k >= 0

    (nonnegative by Cauchy-Schwarz; clamped against -1e-18 rounding).
    """
    b = np.asarray(coeffs, dtype=np.float64)
    z = u * b + alpha_N
    vals = cgf(z, p)
    K_sum = float(np.sum(vals.K))
    K2_sum = float(np.sum(vals.K2))
    bK2_sum = float(np.sum(b * vals.K2))
    m_N = float(np.sum(b * vals.K1))
    sigma_N2 = float(np.sum(b * b * vals.K2)) - bK2_sum**2 / K2_sum
    residual = abs(float(np.sum(vals.K1)))
    return TiltState(
        u=u,
        alpha_N=alpha_N,
        K_sum=K_sum,
        m_N=m_N,
        sigma_N2=max(sigma_N2, 0.0),
        K2_sum=K2_sum,
        bK2_sum=bK2_sum,
        residual=residual,
    )


def mgf_exact(coeffs, n: int, u: float) -> float:
    """E e^{uT_n} by exhaustive enumeration, T_n the SRSWOR sample sum.

    Desk-scale oracle; refuses above 10^7 subsets.
    """
    b = np.asarray(coeffs, dtype=np.float64)
    N = b.size
    total = _enum.check_enum_size(N, n)
    log_chunks = []
    for idx in _enum.iter_index_chunks(N, n):
        t = b[idx].sum(axis=1)
        log_chunks.append(float(logsumexp(u * t)))
    return float(math.exp(logsumexp(log_chunks) - math.log(total)))


def _log_gn_p(d: Design) -> float:
    """log G_n(p), G_n(p) = sqrt(2 pi) C(N,n) p^n q^{N-n}, via log-gamma."""
    N, n = d.N, d.n
    return (
        0.5 * math.log(2.0 * math.pi)
        + math.lgamma(N + 1)
        - math.lgamma(n + 1)
        - math.lgamma(N - n + 1)
        + n * math.log(d.p)
        + (N - n) * math.log(d.q)
    )


def mgf_approx(coeffs, d: Design, u: float) -> MgfApprox:
    """Tilted-normal approximation of E e^{uS_n}.

    value = G_n(p)^{-1} (sum K''_k)^{-1/2} exp(sum K_k), the leading
    factor of the expansion whose relative error decays like 1/omega_N.
    Everything is assembled in log domain.
    """
    b = np.asarray(coeffs, dtype=np.float64)
    alpha = solve_alpha(b, d.p, u)
    state = tilt_moments(b, d.p, u, alpha)
    log_gnp = _log_gn_p(d)
    log_value = -log_gnp - 0.5 * math.log(state.K2_sum) + state.K_sum
    return MgfApprox(value=float(math.exp(log_value)), Gn_p=float(math.exp(log_gnp)))


def associated_cdf(coeffs, n: int, u: float, x_eval: float, reps: int | None = None, seed=None):
    """Associated distribution H_n(x; u) = E e^{uS_n} I(S_n <= x) / E e^{uS_n}.

    Exact mode (default) enumerates all subsets; with ``reps`` given it
    switches to a self-normalized importance estimate
    sum w_i I(T_i <= x) / sum w_i over SRSWOR draws with w_i = e^{uT_i}
    (bias second order in 1/reps).
    """
    b = np.asarray(coeffs, dtype=np.float64)
    N = b.size
    if reps is None:
        _enum.check_enum_size(N, n)
        log_num = -math.inf
        log_den = -math.inf
        for idx in _enum.iter_index_chunks(N, n):
            t = b[idx].sum(axis=1)
            log_den = np.logaddexp(log_den, logsumexp(u * t))
            sel = t <= x_eval
            if np.any(sel):
                log_num = np.logaddexp(log_num, logsumexp(u * t[sel]))
        return float(math.exp(log_num - log_den))
    rng = np.random.default_rng(seed)
    num = 0.0
    den = 0.0
    # exact bound on the log-weights keeps every np.exp finite
    srt = np.sort(b)
    shift = max(u * float(srt[-n:].sum()), u * float(srt[:n].sum()))
    chunk = 1 << 14
    left = int(reps)
    base = np.arange(N)
    while left > 0:
        m = min(chunk, left)
        perm = rng.permuted(np.tile(base, (m, 1)), axis=1)
        t = b[perm[:, :n]].sum(axis=1)
        w = np.exp(u * t - shift)
        den += float(w.sum())
        num += float(w[t <= x_eval].sum())
        left -= m
    return float(num / den)


def _mean_match(b: np.ndarray, d: Design, y: float):
    """Find u* > 0 with tilted mean m_N(u*) = y; return (u*, TiltState at u*).

    m_N(0) = 0 and dm_N/du = sigma_N^2 > 0, so the solve is a monotone
    bracket (doubling until m_N exceeds y) plus brentq plus Newton
    polish with sigma_N^2 as the exact derivative.
    """
    if y <= 0:
        raise ValueError("saddlepoint target must be positive")
    top = float(np.sort(b)[-d.n :].sum())  # tilted mean sup as u -> inf
    if y >= top:
        raise ValueError(f"target {y} is not attainable: max sample sum is {top}")

    def state_at(u: float) -> TiltState:
        return tilt_moments(b, d.p, u, solve_alpha(b, d.p, u))

    hi = 1.0
    for _ in range(200):
        if state_at(hi).m_N >= y:
            break
        hi *= 2.0
    else:
        raise RuntimeError(f"mean-match bracket failed: m_N({hi}) < {y} (target near attainable max)")

    u = brentq(lambda t: state_at(t).m_N - y, 0.0, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)
    st = state_at(u)
    tol = SADDLE_TOL_SCALE * max(1.0, abs(y))
    for _ in range(10):
        if abs(st.m_N - y) <= tol:
            return u, st
        if st.sigma_N2 <= 0:
            break
        u -= (st.m_N - y) / st.sigma_N2
        st = state_at(u)
    if abs(st.m_N - y) <= tol:
        return u, st
    raise RuntimeError(
        f"mean-match stalled: |m_N - y| = {abs(st.m_N - y):.3e} on bracket (0, {hi}]"
    )


def _assemble_tail(u: float, st: TiltState, d: Design, y: float) -> float:
    log_mgf = -_log_gn_p(d) - 0.5 * math.log(st.K2_sum) + st.K_sum
    t = u * st.sigma_N
    psi = mills_psi(t) if t > 0 else math.sqrt(math.pi / 2.0)
    return float(math.exp(log_mgf - u * y) * psi / _SQRT_2PI)


def _saddlepoint_core(b: np.ndarray, d: Design, y: float) -> float:
    if b.size != d.N:
        raise ValueError(f"coefficient vector has {b.size} entries but design has N = {d.N}")
    u, st = _mean_match(b, d, y)
    return _assemble_tail(u, st, d, y)


def saddlepoint_tail(pop_std: Population, d: Design, y: float) -> float:
    """Saddlepoint approximation of P(S_n >= y) for a standardized population.

    Tilt until the target is the tilted mean (m_N(u*) = y), approximate
    the recentred law by its normal limit, and integrate the remaining
    exponential factor exactly, which yields

        mgf_approx(u*) * exp(-u* y) * psi(u* sigma_N) / sqrt(2 pi)

    with psi the Mills ratio.  As y -> 0+ this tends to 1/2, matching
    the symmetric limit.
    """
    if not is_standardized(pop_std):
        raise ValueError("saddlepoint_tail requires a standardized population")
    return _saddlepoint_core(pop_std.values, d, y)


def saddlepoint_tail_t(pop_std: Population, d: Design, x: float) -> float:
    """Saddlepoint approximation of the t-statistic tail P(t_n >= x), x > 0.

    The self-normalized event is first reduced to a sum event: t_n >= x
    is equivalent to S_n >= g(V1n) with g(v) = x0 sqrt(q) sqrt(n + v),
    x0 the transformed threshold and V1n = sum over sample of
    (a_k^2 - 1).  Linearizing g at v = 0 gives the quadratic-tilt
    coefficients b0 a_k - (1/2) b0^2 q (a_k^2 - 1) and target x0^2, but
    under a strong tilt V1n concentrates away from 0, so the
    linearization point is moved to the tilted mean of V1n and iterated
    to a fixed point (still the quadratic-tilt family, with effective
    quadratic weight (1/2) sqrt(n/(n + v*))).  The leftover boundary
    curvature (1/2) g''(v*) Var(V1n | boundary) is folded into the
    target before the final mean-match.
    """
    if not is_standardized(pop_std):
        raise ValueError("saddlepoint_tail_t requires a standardized population")
    if x <= 0:
        raise ValueError("x must be positive (the reduction needs a right tail)")
    r = x0_transform(x, d.n, d.q)
    a = pop_std.values
    d2 = a * a - 1.0
    b0 = r.b0
    sq = math.sqrt(d.q)
    n = d.n
    v = 0.0
    u = st = c = y = None
    for _ in range(30):
        root = math.sqrt(n + v)
        gp = r.x0 * sq / (2.0 * root)
        c = b0 * (a - gp * d2)
        y = b0 * (r.x0 * sq * root - gp * v)
        u, st = _mean_match(c, d, y)
        v_new = float(np.sum(d2 * cgf(u * c + st.alpha_N, d.p).K1))
        converged = abs(v_new - v) <= 1e-8 * max(1.0, abs(v_new))
        v = max(v_new, -0.9 * n)  # keep n + v positive
        if converged:
            break
    else:
        raise RuntimeError("normalizer linearization point did not settle in 30 iterations")
    k2 = cgf(u * c + st.alpha_N, d.p).K2
    s2 = float(np.sum(k2))
    # conditional variance of V1n given the linear statistic, size-projected
    var_w = float(np.sum(d2 * d2 * k2)) - float(np.sum(d2 * k2)) ** 2 / s2
    cov_wt = float(np.sum(d2 * c * k2)) - float(np.sum(d2 * k2)) * float(np.sum(c * k2)) / s2
    var_cond = max(var_w - cov_wt * cov_wt / st.sigma_N2, 0.0) if st.sigma_N2 > 0 else 0.0
    gpp = -r.x0 * sq / (4.0 * (n + v) ** 1.5)
    y += b0 * 0.5 * gpp * var_cond
    u, st = _mean_match(c, d, y)
    return _assemble_tail(u, st, d, y)


def remainder_bound(x: float, beta3N: float, omega_N: float, C: float = 1.0) -> float:
    """Diagnostic cap C x (beta3N/omega_N) e^{x^2/2} (1 - Phi(x)) on the dropped remainder.

    The saddlepoint value omits the non-Gaussian remainder term of the
    tail decomposition; its magnitude is bounded by this expression with
    an absolute constant the theory does not pin down, so C is caller
    supplied.
    """
    return float(C * x * beta3N / omega_N * math.exp(0.5 * x * x) * normal_tail(x))

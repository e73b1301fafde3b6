"""Self-checking property suites.

Every analytic inequality and oracle equivalence the library relies on
is packaged as a named check that reports its worst observed margin
(slack to the bound at the least favorable grid point).  ``run`` wires
the checks into a JSON-ready report; the ``quick`` level covers every
inequality family in about a minute, ``full`` adds the Monte Carlo
oracle cross-checks at larger rep counts.

Checks never sample fresh entropy: everything derives from the report
seed, so a report is reproducible bit for bit.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import chi2 as _chi2

from ._backend import active_backend, available_backends, get_kernels
from .bounds import mills_psi, normal_tail, x0_transform
from .population import Design, Population, compute_moments, family_power, standardize
from .sampling import (
    bernoulli_conditioned_tail,
    draw_sample,
    exact_tail_dp,
    exact_tail_enum,
    mc_tail_quadratic_tilt,
    mc_tail_sum,
    mc_tail_t,
    sample_stats,
    t_identity_check,
)
from .tilt import (
    associated_cdf,
    cgf,
    mgf_approx,
    mgf_exact,
    saddlepoint_tail_t,
    solve_alpha,
    tilt_coeffs,
    tilt_moments,
)

__all__ = ["PropertyResult", "run"]


@dataclass
class PropertyResult:
    name: str
    passed: bool
    margin: float | None = None
    detail: str = ""
    error: bool = False

    def as_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "margin": self.margin,
            "detail": self.detail,
            "error": self.error,
        }


# shared grids for the cumulant-function inequality family
_P_GRID = (0.05, 0.25, 0.5, 0.75, 0.95)
_T_GRID = (0.25, 1.0, 2.0)
_GRID_POINTS = 200


def _worst(points) -> tuple[float, str]:
    """Reduce (margin, label) pairs to the minimum margin and its label."""
    m, lab = min(points, key=lambda t: t[0])
    return float(m), lab


def check_cgf_convexity() -> PropertyResult:
    """K'' > 0 on wide grids for every tested p."""
    pts = []
    z = np.linspace(-30.0, 30.0, 2001)
    for p in _P_GRID:
        k2 = cgf(z, p).K2
        i = int(np.argmin(k2))
        pts.append((float(k2[i]), f"p={p}, z={z[i]:.3f}"))
    m, lab = _worst(pts)
    return PropertyResult("cgf_convexity", m > 0, m, f"min K'' at {lab}")


def check_cgf_deriv1_exp_bound() -> PropertyResult:
    """two-sided exponential envelope on K' over 0 < z <= t."""
    pts = []
    for p in _P_GRID:
        q = 1.0 - p
        for t in _T_GRID:
            z = np.linspace(t / _GRID_POINTS, t, _GRID_POINTS)
            v = cgf(z, p)
            cap = p * q * math.exp(2.0 * t)
            for name, arr in (("K'(z)", v.K1), ("-K'(-z)", -cgf(-z, p).K1)):
                lo = float(np.min(arr))
                hi = float(np.max(arr))
                i_lo = int(np.argmin(arr))
                i_hi = int(np.argmax(arr))
                pts.append((lo, f"{name} positivity p={p} t={t} z={z[i_lo]:.4f}"))
                pts.append((cap - hi, f"{name} cap p={p} t={t} z={z[i_hi]:.4f}"))
    m, lab = _worst(pts)
    return PropertyResult("cgf_deriv1_exp_bound", m > 0, m, f"worst slack at {lab}")


def check_cgf_deriv2_exp_sandwich(corrupt_k2: float = 1.0) -> PropertyResult:
    """pq e^{-3t} < K'' < pq e^{3t} on |z| <= t.

    ``corrupt_k2`` is a fault-injection hook: the computed K'' is scaled
    by it before the comparison so tests can confirm a failure names
    the offending grid point.
    """
    pts = []
    for p in _P_GRID:
        q = 1.0 - p
        for t in _T_GRID:
            z = np.linspace(-t, t, _GRID_POINTS)
            k2 = cgf(z, p).K2 * corrupt_k2
            lo_slack = k2 - p * q * math.exp(-3.0 * t)
            hi_slack = p * q * math.exp(3.0 * t) - k2
            for slack in (lo_slack, hi_slack):
                i = int(np.argmin(slack))
                pts.append((float(slack[i]), f"p={p} t={t} z={z[i]:.4f}"))
    m, lab = _worst(pts)
    return PropertyResult("cgf_deriv2_exp_sandwich", m > 0, m, f"worst slack at {lab}")


def check_cgf_small_z_expansions() -> PropertyResult:
    """quadratic/linear/affine small-z control of K, K', K'' on |z| <= 1/16."""
    pts = []
    z = np.linspace(-1.0 / 16, 1.0 / 16, _GRID_POINTS)
    for p in _P_GRID:
        q = 1.0 - p
        v = cgf(z, p)
        absz3 = np.abs(z) ** 3
        trio = (
            ("K quadratic", absz3 / 2.0 - np.abs(v.K / (p * q) - z * z / 2.0)),
            ("K' linear", z * z - np.abs(v.K1 / (p * q) - z)),
            ("K'' affine", 8.0 * z * z - np.abs(v.K2 / (p * q) - 1.0 - (q - p) * z)),
        )
        for name, slack in trio:
            i = int(np.argmin(slack))
            pts.append((float(slack[i]), f"{name} p={p} z={z[i]:.5f}"))
    m, lab = _worst(pts)
    return PropertyResult("cgf_small_z_expansions", m >= 0, m, f"worst slack at {lab}")


_BOX_COMBOS = (
    (1.0, 0.0, 0.0),
    (1.0, 0.5, 0.0),
    (1.0, 1.0, 0.0),
    (1.0, 1.0, 72.0),
    (0.5, 0.25, -36.0),
    (2.0, 1.0, 0.0),
)


def check_centering_root_bounds(x_grid=(0.02, 0.05, 0.5, 1.0, 2.0)) -> PropertyResult:
    """|alpha_N| <= min(1/32, (2/N) sum b_k^2) and alpha_N^2 <= (9/8) b^3 beta3N."""
    pop = standardize(family_power(1000, 1.0))
    d = Design(N=1000, n=250)
    beta = compute_moments(pop).beta3N
    pts = []
    for x in x_grid:
        for lam, th, th1 in _BOX_COMBOS:
            co = tilt_coeffs(pop, d, x, lam, th, th1)
            al = solve_alpha(co.b_k, d.p, 1.0)
            cap = min(1.0 / 32, 2.0 / d.N * float(np.sum(co.b_k**2)))
            lab = f"x={x} (lam,theta,theta1)=({lam},{th},{th1})"
            pts.append((cap - abs(al), f"first bound {lab}"))
            pts.append((9.0 / 8 * co.b**3 * beta - al * al, f"second bound {lab}"))
    m, lab = _worst(pts)
    return PropertyResult("centering_root_bounds", m >= 0, m, f"worst slack at {lab}")


def check_tilted_sums_regime_bounds(x_grid=(0.02, 0.05, 0.5, 1.0, 2.0)) -> PropertyResult:
    """Tilted-sum estimates: the five bound families on sum K, sum b K', sum K'',
    sum b K'', sum b^2 K'' with constants 24/24/41/6/21."""
    pop = standardize(family_power(1000, 1.0))
    d = Design(N=1000, n=250)
    beta = compute_moments(pop).beta3N
    w = d.omega_N
    pts = []
    for x in x_grid:
        for lam, th, th1 in _BOX_COMBOS:
            co = tilt_coeffs(pop, d, x, lam, th, th1)
            bk = co.b_k
            al = solve_alpha(bk, d.p, 1.0)
            v = cgf(bk + al, d.p)
            cubic = 24.0 * x**3 * beta / w
            lab = f"x={x} (lam,theta,theta1)=({lam},{th},{th1})"
            pts.append((cubic - abs(float(np.sum(v.K)) - lam * lam * x * x / 2.0), f"sum K {lab}"))
            pts.append((cubic - abs(float(np.sum(bk * v.K1)) - lam * lam * x * x), f"sum bK' {lab}"))
            pts.append((41.0 * x * x - abs(float(np.sum(v.K2)) - w * w), f"sum K'' {lab}"))
            pts.append((6.0 * x * x - abs(float(np.sum(bk * v.K2))), f"sum bK'' {lab}"))
            pts.append(
                (21.0 * x**3 * beta / w - abs(float(np.sum(bk * bk * v.K2)) - lam * lam * x * x),
                 f"sum b^2K'' {lab}")
            )
    m, lab = _worst(pts)
    return PropertyResult("tilted_sums_regime_bounds", m >= 0, m, f"worst slack at {lab}")


def check_normal_tail_sandwich() -> PropertyResult:
    """x/(1+x^2) phi(x) <= 1 - Phi(x) <= phi(x)/x for x > 0, slack floor -1e-13."""
    x = np.linspace(0.05, 8.0, 400)
    phi = np.exp(-x * x / 2.0) / math.sqrt(2.0 * math.pi)
    tail = np.array([normal_tail(float(t)) for t in x])
    lo = tail - x / (1.0 + x * x) * phi
    hi = phi / x - tail
    pts = []
    for slack in (lo, hi):
        i = int(np.argmin(slack))
        pts.append((float(slack[i]), f"x={x[i]:.4f}"))
    m, lab = _worst(pts)
    return PropertyResult("normal_tail_sandwich", m >= -1e-13, m, f"worst slack at {lab}")


def check_mills_ratio_bounds() -> PropertyResult:
    """3/4 <= t psi(t) <= 1 for t >= 2 and |t psi(t) - 1| <= 1/t^2 for t > 0."""
    pts = []
    t_big = np.linspace(2.0, 40.0, 400)
    tp = np.array([t * mills_psi(float(t)) for t in t_big])
    i = int(np.argmin(tp - 0.75))
    pts.append((float(tp[i] - 0.75), f"lower t={t_big[i]:.3f}"))
    i = int(np.argmin(1.0 - tp))
    pts.append((float(1.0 - tp[i]), f"upper t={t_big[i]:.3f}"))
    t_all = np.linspace(0.05, 40.0, 800)
    slack = 1.0 / t_all**2 - np.abs(np.array([t * mills_psi(float(t)) for t in t_all]) - 1.0)
    i = int(np.argmin(slack))
    pts.append((float(slack[i]), f"reciprocal-square t={t_all[i]:.3f}"))
    m, lab = _worst(pts)
    return PropertyResult("mills_ratio_bounds", m >= -1e-13, m, f"worst slack at {lab}")


def check_x0_relative_deviation(rng: np.random.Generator) -> PropertyResult:
    """|x0 - x|/x <= 2 x^2 / n over sampled x >= 1, n >= 2, q in (0,1)."""
    pts = []
    for _ in range(500):
        x = float(rng.uniform(1.0, 6.0))
        n = int(rng.integers(2, 2000))
        q = float(rng.uniform(0.01, 0.99))
        if n + x * x * q - 1.0 <= 0:
            continue
        r = x0_transform(x, n, q)
        pts.append((2.0 * x * x / n - r.rel_dev, f"x={x:.3f} n={n} q={q:.3f}"))
    m, lab = _worst(pts)
    return PropertyResult("x0_relative_deviation", m >= 0, m, f"worst slack at {lab}")


def check_sampler_uniformity(rng: np.random.Generator) -> PropertyResult:
    """chi-square on subset frequencies: N=8, n=3, 30000 draws vs 56 equiprobable subsets."""
    from itertools import combinations

    pop = Population(np.arange(1.0, 9.0))
    subsets = {c: 0 for c in combinations(range(1, 9), 3)}
    draws = 30000
    for _ in range(draws):
        s = draw_sample(pop, 3, rng)
        subsets[tuple(sorted(int(i) for i in s.indices))] += 1
    exp = draws / len(subsets)
    stat = sum((c - exp) ** 2 / exp for c in subsets.values())
    cap = float(_chi2.ppf(0.999, len(subsets) - 1))
    return PropertyResult(
        "sampler_uniformity", stat < cap, cap - stat,
        f"chi2={stat:.2f} df={len(subsets)-1} cap(99.9%)={cap:.2f}",
    )


def check_dp_equals_enum() -> PropertyResult:
    """exact_tail_dp == exact_tail_enum as exact fractions on an N=12 integer population."""
    pop = Population(np.arange(1.0, 13.0))
    for n, thr_grid in ((4, range(10, 43, 3)), (6, range(21, 58, 4))):
        for thr in thr_grid:
            dp = exact_tail_dp(pop, n, float(thr))
            en = exact_tail_enum(pop, n, "sum", float(thr))
            en_frac = Fraction(en.diagnostics["count"], en.diagnostics["total"])
            if dp.diagnostics["fraction"] != en_frac:
                return PropertyResult(
                    "dp_equals_enum", False, None,
                    f"n={n} threshold={thr}: dp {dp.diagnostics['fraction']} != enum {en_frac}",
                )
    return PropertyResult("dp_equals_enum", True, 0.0, "exact fraction equality on all grid points")


def check_mgf_expansion_shrinks() -> PropertyResult:
    """|mgf_approx/mgf_exact - 1| <= 10/omega_N and decreasing over N in {10,16,22}."""
    pts = []
    for u in (0.1, 0.3):
        errs = []
        for N in (10, 16, 22):
            pop = standardize(family_power(N, 1.0))
            d = Design(N=N, n=N // 2)
            ex = mgf_exact(pop.values, d.n, u)
            ap = mgf_approx(pop.values, d, u)
            err = abs(ap.value / ex - 1.0)
            errs.append(err)
            pts.append((10.0 / d.omega_N - err, f"N={N} u={u}"))
        for i in (0, 1):
            pts.append((errs[i] - errs[i + 1], f"monotone step N={(10,16,22)[i]}->{(10,16,22)[i+1]} u={u}"))
    m, lab = _worst(pts)
    return PropertyResult("mgf_expansion_shrinks", m > 0, m, f"worst slack at {lab}")


def check_self_normalized_event_identity(rng: np.random.Generator, reps: int) -> PropertyResult:
    """t_n >= x iff S_n/V_n >= x0 sqrt(q), checked on random samples."""
    pop = standardize(family_power(100, 1.0))
    d = Design(N=100, n=25)
    count = 0
    for _ in range(reps):
        s = draw_sample(pop, d.n, rng)
        for x in (0.5, 1.0, 2.0, 3.0):
            if not t_identity_check(s, d, x):
                return PropertyResult(
                    "self_normalized_event_identity", False, None,
                    f"identity failed at x={x} indices={sorted(map(int, s.indices))[:6]}...",
                )
            count += 1
    return PropertyResult(
        "self_normalized_event_identity", True, 0.0, f"{count} sample/threshold pairs agreed"
    )


def check_quadratic_zero_params_matches_sum(seed: int) -> PropertyResult:
    """xi = xi1 = h = 0 reduces the quadratic event to the plain sum event."""
    pop = standardize(family_power(60, 1.0))
    d = Design(N=60, n=15)
    pts = []
    for x in (0.5, 1.5):
        qa = mc_tail_quadratic_tilt(pop, d, x, 0.0, 0.0, 0.0, 20000, seed=seed)
        su = mc_tail_sum(pop, d, x, 20000, seed=seed)
        allow = 3.0 * math.hypot(qa.stderr, su.stderr) + 1e-12
        pts.append((allow - abs(qa.p_hat - su.p_hat), f"x={x} quad={qa.p_hat} sum={su.p_hat}"))
    m, lab = _worst(pts)
    return PropertyResult("quadratic_zero_params_matches_sum", m >= 0, m, f"worst slack at {lab}")


def check_backend_bit_identity(seed: int) -> PropertyResult:
    """compiled and pure-python kernels consume the stream identically."""
    names = available_backends()
    if len(names) < 2:
        return PropertyResult(
            "backend_bit_identity", True, None, f"single backend present ({names}); vacuous"
        )
    pop = standardize(family_power(40, 2.0))
    vals = np.ascontiguousarray(pop.values)
    outs = []
    for nm in ("cython", "python"):
        k = get_kernels(nm)
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy=seed, spawn_key=(0,))))
        a = k.count_sum_tail(vals, 10, 2.5, 4000, rng)
        b = k.count_t_tail(vals, 0.0, 10, 0.75, 1.5, 4000, rng)
        c = k.count_bernoulli_sum(vals, 0.25, 10, 2.5, 4000, 10**6, rng)
        outs.append((a, b, c))
    same = outs[0] == outs[1]
    return PropertyResult(
        "backend_bit_identity", same, 0.0 if same else None,
        f"cython={outs[0]} python={outs[1]}",
    )


def check_determinism_repeat(seed: int) -> PropertyResult:
    """same (seed, workers) twice gives identical estimates, including workers > 1."""
    pop = standardize(family_power(50, 1.0))
    d = Design(N=50, n=10)
    for workers in (1, 3):
        a = mc_tail_t(pop, d, 1.5, 12000, seed=seed, workers=workers)
        b = mc_tail_t(pop, d, 1.5, 12000, seed=seed, workers=workers)
        if a.p_hat != b.p_hat or a.diagnostics != b.diagnostics:
            return PropertyResult(
                "determinism_repeat", False, None, f"workers={workers}: {a.p_hat} != {b.p_hat}"
            )
    return PropertyResult("determinism_repeat", True, 0.0, "bit-identical across repeats, workers in {1,3}")


def check_associated_cdf_normal_shape() -> PropertyResult:
    """sup_x |H_n(x;u) - Phi((x-m_N)/sigma_N)| within the Berry-Esseen-style cap."""
    from scipy.stats import norm

    pts = []
    for alpha in (1.0, 2.0):
        pop = standardize(family_power(22, alpha))
        d = Design(N=22, n=8)
        b = pop.values / (32.0 * float(np.max(np.abs(pop.values))))  # |u b_k| <= 1/32
        al = solve_alpha(b, d.p, 1.0)
        st = tilt_moments(b, d.p, 1.0, al)
        cap = 5.0 / math.sqrt(d.p * d.q) * float(np.sum(np.abs(b) ** 3)) / float(np.sum(b * b)) ** 1.5
        xs = np.linspace(st.m_N - 4 * st.sigma_N, st.m_N + 4 * st.sigma_N, 41)
        sup = 0.0
        for x_eval in xs:
            h = associated_cdf(b, d.n, 1.0, float(x_eval))
            sup = max(sup, abs(h - float(norm.cdf((x_eval - st.m_N) / st.sigma_N))))
        pts.append((cap - sup, f"alpha={alpha} sup={sup:.4f} cap={cap:.4f}"))
    m, lab = _worst(pts)
    return PropertyResult("associated_cdf_normal_shape", m >= 0, m, f"worst slack at {lab}")


# full-level Monte Carlo oracle suite


def check_dp_vs_mc_oracle(seed: int, reps: int = 200000) -> PropertyResult:
    """mc_tail_sum within 4 stderr of the exact subset-sum law at >= 19/20 grid points."""
    pop = standardize(family_power(30, 1.0))
    d = Design(N=30, n=10)
    raw = Population(np.arange(1.0, 31.0))
    mraw = compute_moments(raw)
    agree = 0
    worst = (math.inf, "")
    for i, x in enumerate(np.linspace(0.1, 2.0, 20)):
        mc = mc_tail_sum(pop, d, float(x), reps, seed=seed + i)
        thr_raw = d.n * mraw.mu + float(x) * mraw.sigma * d.omega_N
        dp = exact_tail_dp(raw, d.n, thr_raw)
        se = max(mc.stderr, 1e-12)
        dev = abs(mc.p_hat - dp.p_hat) / se
        if dev <= 4.0:
            agree += 1
        if 4.0 - dev < worst[0]:
            worst = (4.0 - dev, f"x={x:.2f} mc={mc.p_hat:.5f} exact={dp.p_hat:.5f} dev={dev:.2f}se")
    return PropertyResult(
        "dp_vs_mc_oracle", agree >= 19, float(agree), f"{agree}/20 within 4 stderr; tightest {worst[1]}"
    )


def check_bernoulli_conditioning_equivalence(seed: int, reps: int = 60000) -> PropertyResult:
    """conditioned-Bernoulli sampler agrees with SRSWOR MC on a 12-point grid."""
    pop = standardize(family_power(40, 1.0))
    d = Design(N=40, n=10)
    pts = []
    for i, x in enumerate(np.linspace(0.2, 2.4, 12)):
        be = bernoulli_conditioned_tail(pop, d, float(x), reps, seed=seed + i)
        mc = mc_tail_sum(pop, d, float(x), reps, seed=seed + 100 + i)
        allow = 4.0 * math.hypot(be.stderr, mc.stderr) + 1e-12
        pts.append((allow - abs(be.p_hat - mc.p_hat), f"x={x:.2f} bern={be.p_hat:.5f} mc={mc.p_hat:.5f}"))
    m, lab = _worst(pts)
    return PropertyResult("bernoulli_conditioning_equivalence", m >= 0, m, f"worst slack at {lab}")


def check_mc_vs_enum_small(seed: int, reps: int = 200000) -> PropertyResult:
    """MC agrees with full enumeration on an N=20 population, sum and t statistics."""
    pop = standardize(family_power(20, 2.0))
    d = Design(N=20, n=6)
    pts = []
    for x in (0.5, 1.0, 1.5):
        mc = mc_tail_sum(pop, d, x, reps, seed=seed)
        en = exact_tail_enum(pop, d.n, "sum", x * d.omega_N)
        allow = 4.0 * mc.stderr + 1e-12
        pts.append((allow - abs(mc.p_hat - en.p_hat), f"sum x={x} mc={mc.p_hat:.5f} enum={en.p_hat:.5f}"))
        mct = mc_tail_t(pop, d, x, reps, seed=seed + 7)
        ent = exact_tail_enum(pop, d.n, "t", x)
        allow = 4.0 * mct.stderr + 1e-12
        pts.append((allow - abs(mct.p_hat - ent.p_hat), f"t x={x} mc={mct.p_hat:.5f} enum={ent.p_hat:.5f}"))
    m, lab = _worst(pts)
    return PropertyResult("mc_vs_enum_small", m >= 0, m, f"worst slack at {lab}")


def check_associated_cdf_importance_vs_exact(seed: int) -> PropertyResult:
    """self-normalized importance estimate of H_n tracks the exact ratio."""
    pop = standardize(family_power(18, 1.0))
    d = Design(N=18, n=6)
    b = pop.values * 0.2
    al = solve_alpha(b, d.p, 1.0)
    st = tilt_moments(b, d.p, 1.0, al)
    pts = []
    for x_eval in (st.m_N - st.sigma_N, st.m_N, st.m_N + st.sigma_N):
        ex = associated_cdf(b, d.n, 1.0, float(x_eval))
        mc = associated_cdf(b, d.n, 1.0, float(x_eval), reps=200000, seed=seed)
        pts.append((0.01 - abs(mc - ex), f"x={x_eval:.3f} exact={ex:.5f} mc={mc:.5f}"))
    m, lab = _worst(pts)
    return PropertyResult("associated_cdf_importance_vs_exact", m >= 0, m, f"worst slack at {lab}")


def check_saddlepoint_band_spot(seed: int, reps: int = 150000) -> PropertyResult:
    """spot-check the t-tail saddlepoint against MC on two table cells."""
    pts = []
    for alpha, N, n, x in ((1.0, 1000, 250, 2.0), (2.0, 100, 25, 2.0)):
        pop = standardize(family_power(N, alpha))
        d = Design(N=N, n=n)
        sp = saddlepoint_tail_t(pop, d, x)
        mc = mc_tail_t(pop, d, x, reps, seed=seed)
        ratio = mc.p_hat / sp
        band = 0.1 + 3.0 * mc.stderr / sp
        pts.append((band - abs(ratio - 1.0), f"alpha={alpha} N={N} x={x} ratio={ratio:.3f}"))
    m, lab = _worst(pts)
    return PropertyResult("saddlepoint_band_spot", m >= 0, m, f"worst slack at {lab}")


def run(level: str = "quick", seed: int = 101, corrupt_k2: float = 1.0) -> dict:
    """Run the property suites and return a JSON-ready report.

    level "quick" covers every inequality family and the cheap oracle
    equivalences; "full" adds the Monte Carlo oracle cross-checks.
    ``corrupt_k2`` scales K'' inside the sandwich check only (fault
    injection for tests of the failure-reporting path).
    """
    if level not in ("quick", "full"):
        raise ValueError("level must be 'quick' or 'full'")
    t0 = time.perf_counter()
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    results: list[PropertyResult] = []

    def runcheck(fn, *args, **kw):
        try:
            results.append(fn(*args, **kw))
        except Exception as exc:  # a raising check is a numerical failure, not a report failure
            results.append(PropertyResult(fn.__name__.replace("check_", ""), False, None, repr(exc), error=True))

    runcheck(check_cgf_convexity)
    runcheck(check_cgf_deriv1_exp_bound)
    runcheck(check_cgf_deriv2_exp_sandwich, corrupt_k2)
    runcheck(check_cgf_small_z_expansions)
    runcheck(check_centering_root_bounds)
    runcheck(check_tilted_sums_regime_bounds)
    runcheck(check_normal_tail_sandwich)
    runcheck(check_mills_ratio_bounds)
    runcheck(check_x0_relative_deviation, rng)
    runcheck(check_sampler_uniformity, rng)
    runcheck(check_dp_equals_enum)
    runcheck(check_mgf_expansion_shrinks)
    runcheck(check_self_normalized_event_identity, rng, 2000 if level == "quick" else 25000)
    runcheck(check_quadratic_zero_params_matches_sum, seed)
    runcheck(check_backend_bit_identity, seed)
    runcheck(check_determinism_repeat, seed)
    runcheck(check_associated_cdf_normal_shape)
    if level == "full":
        runcheck(check_dp_vs_mc_oracle, seed)
        runcheck(check_bernoulli_conditioning_equivalence, seed)
        runcheck(check_mc_vs_enum_small, seed)
        runcheck(check_associated_cdf_importance_vs_exact, seed)
        runcheck(check_saddlepoint_band_spot, seed)

    return {
        "level": level,
        "seed": seed,
        "backend": active_backend(),
        "checks": [r.as_dict() for r in results],
        "n_checks": len(results),
        "n_passed": sum(r.passed for r in results),
        "passed": all(r.passed for r in results),
        "any_error": any(r.error for r in results),
        "elapsed_s": round(time.perf_counter() - t0, 3),
    }

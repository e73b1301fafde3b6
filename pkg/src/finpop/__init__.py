"""Tail probabilities for samples drawn without replacement from a finite population.

Computes, estimates and cross-validates P(S_n - n mu >= x sigma omega_N)
and P(t_n >= x): Monte Carlo at scale (compiled kernel with a numpy
fallback), exact small-instance oracles, exponential-tilting envelopes,
and a saddlepoint-style tail approximation.
"""

from ._backend import active_backend, available_backends
from .population import (
    Design,
    Population,
    PopulationMoments,
    compute_moments,
    family_power,
    load_population,
    standardize,
    valid_x_range,
)
from .bounds import (
    BoundEnvelope,
    X0Result,
    implied_A,
    mills_psi,
    normal_tail,
    thm11_envelope,
    thm12_band,
    x0_transform,
)
from .tilt import (
    CgfValues,
    MgfApprox,
    TiltCoefficients,
    TiltState,
    associated_cdf,
    cgf,
    mgf_approx,
    mgf_exact,
    remainder_bound,
    saddlepoint_tail,
    saddlepoint_tail_t,
    solve_alpha,
    tilt_coeffs,
    tilt_moments,
)
from .sampling import (
    Sample,
    SampleStats,
    TailEstimate,
    bernoulli_conditioned_tail,
    draw_sample,
    exact_tail_dp,
    exact_tail_enum,
    mc_tail_quadratic_tilt,
    mc_tail_sum,
    mc_tail_t,
    sample_stats,
    t_identity_check,
    wilson_interval,
)

__version__ = "0.1.0"

__all__ = [
    "Design",
    "Population",
    "PopulationMoments",
    "compute_moments",
    "family_power",
    "load_population",
    "standardize",
    "valid_x_range",
    "BoundEnvelope",
    "X0Result",
    "implied_A",
    "mills_psi",
    "normal_tail",
    "thm11_envelope",
    "thm12_band",
    "x0_transform",
    "CgfValues",
    "MgfApprox",
    "TiltCoefficients",
    "TiltState",
    "associated_cdf",
    "cgf",
    "mgf_approx",
    "mgf_exact",
    "remainder_bound",
    "saddlepoint_tail",
    "saddlepoint_tail_t",
    "solve_alpha",
    "tilt_coeffs",
    "tilt_moments",
    "Sample",
    "SampleStats",
    "TailEstimate",
    "bernoulli_conditioned_tail",
    "draw_sample",
    "exact_tail_dp",
    "exact_tail_enum",
    "mc_tail_quadratic_tilt",
    "mc_tail_sum",
    "mc_tail_t",
    "sample_stats",
    "t_identity_check",
    "wilson_interval",
    "active_backend",
    "available_backends",
]

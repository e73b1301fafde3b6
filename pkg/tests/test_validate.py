"""Self-check harness: clean pass, fault injection, report shape."""

import json

import pytest

from finpop import validate


def test_quick_level_all_pass():
    report = validate.run(level="quick", seed=101)
    assert report["passed"] is True
    assert report["any_error"] is False
    assert report["n_passed"] == report["n_checks"]
    names = [c["name"] for c in report["checks"]]
    assert "cgf_convexity" in names
    assert "backend_bit_identity" in names
    assert len(names) == len(set(names))
    json.dumps(report)  # must serialize as-is


def test_fault_injection_is_detected_and_localized():
    # scaling K'' by 3 must break exactly the sandwich that watches it
    report = validate.run(level="quick", seed=101, corrupt_k2=3.0)
    failed = [c for c in report["checks"] if not c["passed"]]
    assert len(failed) == 1
    bad = failed[0]
    assert bad["name"] == "cgf_deriv2_exp_sandwich"
    assert bad["error"] is False
    # the detail names the specific grid point that violated the bound
    assert "p=" in bad["detail"] and "z=" in bad["detail"]
    assert report["passed"] is False


def test_full_level_adds_oracle_checks():
    report = validate.run(level="full", seed=101)
    names = {c["name"] for c in report["checks"]}
    for extra in (
        "dp_vs_mc_oracle",
        "bernoulli_conditioning_equivalence",
        "mc_vs_enum_small",
        "associated_cdf_importance_vs_exact",
        "saddlepoint_band_spot",
    ):
        assert extra in names
    assert report["passed"] is True
    assert report["level"] == "full"


def test_unknown_level_rejected():
    with pytest.raises(ValueError):
        validate.run(level="exhaustive")

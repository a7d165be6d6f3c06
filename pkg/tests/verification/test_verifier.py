"""
Tests for the identity verification engine.

These tests verify that:

- An admissible configuration passes with all routes in agreement.
- Divergent configurations produce a FAIL report instead of raising.
- A disagreeing route turns the report to FAIL with a named finding.
- The forms of J are checked against each other at the configured roots.
- Reports serialize to JSON with their provenance block.
"""

from __future__ import annotations

import json
import math

import pytest

import delta_identity.verification.verifier as verifier
from delta_identity.measures.affine import IntegralEstimate
from delta_identity.measures.test_functions import GaussianTest, TruncatedGaussian
from delta_identity.models import Family, RootPoly, VerificationConfig
from delta_identity.verification.verifier import METHODS, report_to_dict, report_to_json, verify_identity

EXPECTED_1X1 = 1.0 / (2.0 * math.sqrt(math.pi))


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------

def make_pair(u, v, a=1, b=1):
    return RootPoly(a, tuple(u), Family.A), RootPoly(b, tuple(v), Family.B)


# ---------------------------------------------------------------------------
# Outcomes
# ---------------------------------------------------------------------------

def test_one_by_one_gaussian_passes():
    p, q = make_pair((0.0,), (0.0,))
    report = verify_identity(p, q, GaussianTest([0.0, 0.0]), VerificationConfig(), label="smoke")
    assert report.passed
    assert report.label == "smoke"
    assert set(report.values) == set(METHODS)
    assert report.reference == pytest.approx(0.282095, abs=1e-6)
    assert report.rel_discrepancy <= 1e-6
    assert report.pointwise_max_rel == pytest.approx(0.0, abs=1e-12)


def test_one_by_two_truncated_gaussian_passes():
    p, q = make_pair((0.0,), (-1.0, 1.0))
    phi = TruncatedGaussian([0.0, -1.0, 1.0], width=1.0, half_width=0.9)
    report = verify_identity(p, q, phi, VerificationConfig(), label="1x2")
    assert report.passed, [f.message for f in report.findings]
    assert report.size_a == 1 and report.size_b == 2


def test_j_forms_are_checked():
    p, q = make_pair((0.0,), (-1.0, 1.0))
    phi = TruncatedGaussian([0.0, -1.0, 1.0], width=1.0, half_width=0.9)
    report = verify_identity(p, q, phi, VerificationConfig())
    rules = {f.rule: f.severity for f in report.findings}
    assert rules["j_forms"] == "PASS"
    assert report.j_forms_max_rel <= 1e-10


@pytest.mark.parametrize(
    "u, v",
    [((0.0, 2.5), (-1.0, 1.0)), ((0.3, -1.2, 2.0), (0.7, -2.2)), ((1.5,), (0.1, 0.9, -0.4))],
)
def test_j_forms_gap_is_rounding_level(u, v):
    p, q = make_pair(u, v, a=2, b=-3)
    assert verifier._j_forms_gap(p, q) <= 1e-10


def test_coincident_roots_fail_with_divergence():
    p, q = make_pair((0.0,), (0.3, 0.3))
    report = verify_identity(p, q, TruncatedGaussian([0.0, 0.3, 0.3], 1.0, 0.1), VerificationConfig())
    assert not report.passed
    assert report.divergence is not None
    assert "v-roots 0 and 1" in report.divergence
    assert all(v is None for v in report.values.values())
    assert report.abs_discrepancy is None


def test_inadmissible_gaussian_fails_with_divergence():
    p, q = make_pair((0.0,), (-1.0, 1.0))
    report = verify_identity(p, q, GaussianTest([0.0, 0.0, 0.0]), VerificationConfig())
    assert report.severity == "FAIL"
    assert report.findings[0].rule == "divergence"


def test_disagreeing_route_fails(monkeypatch: pytest.MonkeyPatch):
    """A perturbed right side must be caught by the agreement check."""
    original = verifier.rhs_localized

    def perturbed(p, q, phi, cfg):
        est = original(p, q, phi, cfg)
        return IntegralEstimate(est.value * 1.01, est.error, est.method)

    monkeypatch.setattr(verifier, "rhs_localized", perturbed)
    p, q = make_pair((0.0,), (0.0,))
    report = verify_identity(p, q, GaussianTest([0.0, 0.0]), VerificationConfig())
    assert not report.passed
    failing = [f.rule for f in report.findings if f.severity == "FAIL"]
    assert failing == ["agreement:rhs_localized"]


def test_mollifier_oracle_runs_when_enabled():
    cfg = VerificationConfig(mollifier=True, epsilons=(0.1, 0.05), mollifier_samples=20_000, seed=5)
    p, q = make_pair((0.0,), (0.0,))
    report = verify_identity(p, q, GaussianTest([0.0, 0.0]), cfg)
    assert [m["epsilon"] for m in report.mollified] == [0.1, 0.05]
    assert report.extrapolated is not None
    assert any(f.rule == "mollifier" for f in report.findings)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def test_report_to_json_with_provenance():
    p, q = make_pair((0.0,), (0.0,))
    report = verify_identity(p, q, GaussianTest([0.0, 0.0]), VerificationConfig(), label="smoke")
    text = report_to_json([report], {"config_path": "smoke.json", "sha256": "abc"})
    assert text.endswith("\n")
    data = json.loads(text)
    assert list(data) == ["source", "reports"]
    assert data["source"]["sha256"] == "abc"
    entry = data["reports"][0]
    assert entry["severity"] == "PASS"
    assert entry["values"]["lhs_localized"] == pytest.approx(EXPECTED_1X1)
    assert entry["test_function"]["kind"] == "gaussian"


def test_report_dict_of_divergent_run_is_json_safe():
    p, q = make_pair((0.0,), (-1.0, 1.0))
    report = verify_identity(p, q, GaussianTest([0.0, 0.0, 0.0]), VerificationConfig())
    data = json.loads(json.dumps(report_to_dict(report)))
    assert data["values"] == {name: None for name in METHODS}
    assert data["rel_discrepancy"] is None

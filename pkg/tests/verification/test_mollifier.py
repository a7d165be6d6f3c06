"""
Tests for the mollified Monte Carlo oracle.

These tests verify that:

- The oracle is unbiased for the mollified integral, whose 1x1 Gaussian
  value is known in closed form.
- Widths run on independent, reproducible substreams.
- Richardson extrapolation removes an O(eps^2) bias.
- Oversized or mismatched inputs are refused.
"""

from __future__ import annotations

import math

import pytest

from delta_identity.measures.test_functions import GaussianTest, IndicatorBox, TruncatedGaussian
from delta_identity.models import Family, MollifierSpec, RootPoly
from delta_identity.verification.mollifier import (
    MAX_ORACLE_DIM,
    MollifiedEstimate,
    MollifierSequence,
    mollified_oracle,
    mollifier_sequence,
    richardson,
)

P1 = RootPoly(1, (0.0,), Family.A)
Q1 = RootPoly(1, (0.0,), Family.B)


def mollified_one_by_one(eps: float) -> float:
    """I_eps for a standard 2-D Gaussian: the density of u - v at 0 with variance 2 + 2 eps^2."""
    return 1.0 / math.sqrt(2.0 * math.pi * (2.0 + 2.0 * eps * eps))


def test_oracle_unbiased_one_by_one():
    est = mollified_oracle(P1, Q1, GaussianTest([0.0, 0.0]), MollifierSpec(0.05), 200_000, seed=11)
    assert est.samples == 200_000
    assert est.stderr > 0.0
    assert abs(est.value - mollified_one_by_one(0.05)) <= 4.0 * est.stderr


def test_oracle_is_reproducible():
    phi = GaussianTest([0.0, 0.0])
    one = mollified_oracle(P1, Q1, phi, MollifierSpec(0.1), 5_000, seed=3)
    two = mollified_oracle(P1, Q1, phi, MollifierSpec(0.1), 5_000, seed=3)
    other = mollified_oracle(P1, Q1, phi, MollifierSpec(0.1), 5_000, seed=4)
    assert one == two
    assert one.value != other.value


def test_oracle_on_box_supported_function():
    q = RootPoly(1, (-1.0, 1.0), Family.B)
    phi = TruncatedGaussian([0.0, -1.0, 1.0], width=1.0, half_width=0.9)
    est = mollified_oracle(P1, q, phi, MollifierSpec(0.05), 50_000, seed=5)
    assert est.value > 0.0
    assert math.isfinite(est.stderr)


def test_sequence_uses_independent_streams():
    phi = GaussianTest([0.0, 0.0])
    seq = mollifier_sequence(P1, Q1, phi, (0.1, 0.05), 5_000, seed=9)
    again = mollifier_sequence(P1, Q1, phi, (0.1, 0.05), 5_000, seed=9)
    assert [e.epsilon for e in seq.estimates] == [0.1, 0.05]
    assert seq.estimates == again.estimates
    assert seq.extrapolated == again.extrapolated
    assert seq.last.epsilon == 0.05


def test_richardson_removes_quadratic_bias():
    limit = 0.25
    estimates = [MollifiedEstimate(e, limit + 3.0 * e * e, 0.0, 10) for e in (0.1, 0.05)]
    assert richardson(estimates) == pytest.approx(limit)
    assert richardson(estimates[:1]) is None


def test_agrees_with_uses_stderr_and_allowance():
    seq = MollifierSequence(estimates=[MollifiedEstimate(0.025, 1.0, 0.01, 100)])
    assert seq.agrees_with(1.02, allowance=0.0)
    assert not seq.agrees_with(1.2, allowance=0.0)
    assert seq.agrees_with(1.2, allowance=0.2)


def test_oracle_refuses_large_dimension():
    p = RootPoly(1, (0.0, 1.0, 2.0), Family.A)
    q = RootPoly(1, (3.0, 4.0, 5.0), Family.B)
    assert p.degree + q.degree > MAX_ORACLE_DIM
    with pytest.raises(ValueError):
        mollified_oracle(p, q, GaussianTest([0.0] * 6), MollifierSpec(0.1), 100, seed=0)


def test_oracle_refuses_dimension_mismatch_and_tiny_samples():
    with pytest.raises(ValueError):
        mollified_oracle(P1, Q1, IndicatorBox([0.0], 1.0), MollifierSpec(0.1), 100, seed=0)
    with pytest.raises(ValueError):
        mollified_oracle(P1, Q1, GaussianTest([0.0, 0.0]), MollifierSpec(0.1), 1, seed=0)


@pytest.mark.slow
def test_schedule_approaches_localized_value():
    """At the default widths the smallest-width estimate sits within 5% of 1/(2 sqrt(pi))."""
    seq = mollifier_sequence(P1, Q1, GaussianTest([0.0, 0.0]), (0.1, 0.05, 0.025), 1_000_000, seed=2024)
    assert seq.agrees_with(1.0 / (2.0 * math.sqrt(math.pi)), allowance=0.05)

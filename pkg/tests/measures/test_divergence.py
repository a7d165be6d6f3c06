"""
Tests for divergence diagnostics.

These tests verify that:

- Crossing loci under a nowhere-zero test function are divergent.
- Box-supported test functions diverge only when the crossing enters the box.
- Boundary contact is reported separately and settled numerically.
- Parallel loci never interact.
- The trend check separates logarithmic growth from convergence.
"""

from __future__ import annotations

import math

import pytest

from delta_identity.measures.divergence import (
    CONTACT,
    DIVERGENT,
    crossing_depth,
    divergence_probe,
    loci_intersect,
    trend_check,
)
from delta_identity.measures.product import delta_product_integrate, validate_factorization
from delta_identity.measures.test_functions import CompactBump, GaussianTest, IndicatorBox
from delta_identity.models import AffineFunction


def _axes(offset0: float = 0.0, offset1: float = 0.0):
    return validate_factorization([AffineFunction((1.0, 0.0), offset0), AffineFunction((0.0, 1.0), offset1)])


def test_gaussian_crossing_is_divergent():
    report = divergence_probe(_axes(), GaussianTest([5.0, 5.0]))
    assert report.divergent
    assert report.divergent_pairs == [(1, 2)]
    assert report.findings[0].rule == "nowhere_zero"


def test_pairs_are_one_based_and_ordered():
    fac = validate_factorization([
        AffineFunction((1.0, 0.0), 0.0),
        AffineFunction((1.0, 0.0), -1.0),
        AffineFunction((0.0, 1.0), 0.0),
    ])
    report = divergence_probe(fac, GaussianTest([0.0, 0.0]))
    assert report.divergent_pairs == [(1, 3), (2, 3)]


def test_parallel_loci_do_not_intersect():
    assert not loci_intersect(AffineFunction((1.0, 0.0), 0.0), AffineFunction((2.0, 0.0), 1.0))
    assert loci_intersect(AffineFunction((1.0, 0.0)), AffineFunction((1.0, 1e-3)))


def test_bump_containing_crossing_is_divergent():
    report = divergence_probe(_axes(), CompactBump([0.2, -0.1], half_width=1.0))
    assert report.findings[0].severity == DIVERGENT
    assert report.findings[0].rule == "support_overlap"


def test_bump_missing_crossing_is_clean():
    report = divergence_probe(_axes(), CompactBump([3.0, 3.0], half_width=1.0))
    assert report.findings == []


def test_corner_contact_is_reported():
    report = divergence_probe(_axes(-1.0, -1.0), CompactBump([0.0, 0.0], half_width=1.0))
    assert report.contact_pairs == [(1, 2)]
    assert not report.divergent


def test_crossing_depth_values():
    phi = IndicatorBox([0.0, 0.0], half_width=1.0)
    fi, fj = _axes().factors
    assert crossing_depth(fi, fj, phi) == pytest.approx(1.0)
    fi, fj = _axes(-3.0, 0.0).factors
    assert crossing_depth(fi, fj, phi) == pytest.approx(-2.0)


def test_contact_resolved_by_trend_check(exact_cfg):
    """The bump vanishes on its boundary, so corner contact integrates to 0."""
    estimate = delta_product_integrate(_axes(-1.0, -1.0), CompactBump([0.0, 0.0], half_width=1.0), exact_cfg)
    assert estimate.value == pytest.approx(0.0, abs=1e-12)


def test_trend_check_flags_logarithmic_growth():
    divergent, values = trend_check(lambda eta: math.log(1.0 / eta), 1e-3)
    assert divergent
    assert len(values) == 3


def test_trend_check_accepts_convergence():
    divergent, _ = trend_check(lambda eta: 1.0 - eta, 1e-3)
    assert not divergent


def test_trend_check_accepts_constant():
    divergent, values = trend_check(lambda eta: 2.5, 1e-3)
    assert not divergent
    assert values == [2.5, 2.5, 2.5]

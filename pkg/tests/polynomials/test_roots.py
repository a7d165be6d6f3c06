"""
Tests for root-form polynomial operations.

These tests verify that:

- Evaluation and derivatives at roots match hand-computed values.
- Repeated roots are rejected with their index pair.
- The reciprocal-derivative sum vanishes for degree >= 2, exactly on
  rationals and to rounding on 500 random float polynomials.
- Conversion to coefficient form follows Vieta.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from delta_identity.errors import DegreeMismatch, RepeatedRoot
from delta_identity.models import CoeffPoly, RootPoly
from delta_identity.polynomials.roots import (
    check_distinct,
    coeffs_to_roots_quadratic,
    derivative_at,
    derivative_at_root,
    eval_root_poly,
    reciprocal_derivative_sum,
    roots_to_coeffs,
)


def test_eval_root_poly_matches_factored_form():
    p = RootPoly(2, (1, -1))
    assert eval_root_poly(p, 3) == 2 * (3 - 1) * (3 + 1)
    assert eval_root_poly(p, 1) == 0


def test_derivative_at_root_of_cubic():
    """P = x^3 - x has P'(-1) = P'(1) = 2 and P'(0) = -1."""
    p = RootPoly(1, (-1, 0, 1))
    assert [derivative_at_root(p, k) for k in range(3)] == [2, -1, 2]


def test_derivative_at_matches_derivative_at_root():
    p = RootPoly(Fraction(3, 2), (Fraction(-1), Fraction(1, 3), Fraction(2)))
    for k, r in enumerate(p.roots):
        assert derivative_at(p, r) == derivative_at_root(p, k)


def test_derivative_at_does_not_need_distinct_roots():
    """(x - 1)^2 has derivative 2(x - 1)."""
    p = RootPoly(1, (1, 1))
    assert derivative_at(p, 3) == 4


def test_repeated_root_is_reported_with_indices():
    with pytest.raises(RepeatedRoot) as info:
        check_distinct([0.0, 2.0, 0.0])
    assert info.value.indices == (0, 2)


def test_derivative_at_root_rejects_repeated_roots():
    with pytest.raises(RepeatedRoot):
        derivative_at_root(RootPoly(1, (1.0, 1.0)), 0)


@pytest.mark.parametrize(
    "roots",
    [
        (Fraction(0), Fraction(1)),
        (Fraction(-2), Fraction(1, 2), Fraction(3)),
        (Fraction(-1), Fraction(0), Fraction(1, 7), Fraction(5)),
    ],
)
def test_reciprocal_derivative_sum_vanishes_exactly(roots):
    assert reciprocal_derivative_sum(RootPoly(Fraction(3), roots)) == 0


def test_reciprocal_derivative_sum_vanishes_in_floats():
    s = RootPoly(0.7, (-1.3, 0.2, 0.9, 2.4))
    assert abs(reciprocal_derivative_sum(s)) < 1e-12


def test_reciprocal_derivative_sum_requires_degree_two():
    with pytest.raises(DegreeMismatch):
        reciprocal_derivative_sum(RootPoly(1, (0.5,)))


def test_roots_to_coeffs_follows_vieta():
    assert roots_to_coeffs(RootPoly(1, (1, 2))) == CoeffPoly((2, -3, 1))
    assert roots_to_coeffs(RootPoly(2, (0, 0, 1))).coefficients == (0, 0, -2, 2)


def test_quadratic_roots_are_ascending_and_stable():
    roots = coeffs_to_roots_quadratic(CoeffPoly((2.0, -3.0, 1.0)))
    assert roots == pytest.approx((1.0, 2.0))

    # large spread: the small root must not lose its digits
    small, large = coeffs_to_roots_quadratic(CoeffPoly((1.0, -1e8, 1.0)))
    assert small == pytest.approx(1e-8, rel=1e-12)
    assert large == pytest.approx(1e8, rel=1e-12)


def test_quadratic_roots_complex_returns_none():
    assert coeffs_to_roots_quadratic(CoeffPoly((1.0, 0.0, 1.0))) is None


def test_root_poly_rejects_zero_leading_and_empty_roots():
    with pytest.raises(ValueError):
        RootPoly(0, (1.0,))
    with pytest.raises(ValueError):
        RootPoly(1, ())


def test_reciprocal_derivative_sum_vanishes_at_scale():
    """500 float polynomials of degree 2..8, relative to the size of the terms."""
    rng = np.random.default_rng(8)
    for _ in range(500):
        degree = int(rng.integers(2, 9))
        s = RootPoly(float(rng.uniform(0.5, 3.0)), tuple(float(x) for x in rng.uniform(-3.0, 3.0, size=degree)))
        scale = sum(abs(1.0 / derivative_at_root(s, k)) for k in range(degree))
        assert abs(reciprocal_derivative_sum(s)) <= 1e-10 * scale

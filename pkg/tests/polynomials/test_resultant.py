"""
Tests for resultants.

These tests verify that:

- The root-form resultant uses the a^|B| b^|A| prod(u - v) normalization.
- The Sylvester determinant agrees with it in value and sign.
- The batched Sylvester determinant agrees with the scalar one.
- The exact Sylvester determinant matches the root form on 500 random
  configurations of degrees 1..5, and is exact on rational input.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest

from delta_identity.errors import DegreeMismatch
from delta_identity.models import CoeffPoly, Family, RootPoly
from delta_identity.polynomials.resultant import (
    bareiss_determinant,
    resultant_roots,
    resultant_sylvester,
    resultant_sylvester_batch,
    sylvester_matrix,
)
from delta_identity.polynomials.roots import roots_to_coeffs


def _pair(a, u, b, v):
    return RootPoly(a, tuple(u), Family.A), RootPoly(b, tuple(v), Family.B)


def test_resultant_roots_hand_values():
    p, q = _pair(1, (1, 2), 1, (3,))
    assert resultant_roots(p, q) == 2

    p, q = _pair(2, (0, 1), 1, (3,))
    # 2^1 * 1^2 * (0 - 3)(1 - 3)
    assert resultant_roots(p, q) == 12

    p, q = _pair(1, (1, 2), 1, (2, 5))
    assert resultant_roots(p, q) == 0


def test_resultant_requires_family_order():
    p = RootPoly(1, (1,), Family.A)
    with pytest.raises(ValueError):
        resultant_roots(p, p)


@pytest.mark.parametrize(
    "p_coeffs, q_coeffs, expected",
    [
        ((-1, 1), (-2, 1), -1.0),
        ((-1, 1), (-3, 1), -2.0),
        ((2, -3, 1), (-2, 1), 0.0),
    ],
)
def test_sylvester_small_cases(p_coeffs, q_coeffs, expected):
    value = resultant_sylvester(CoeffPoly(p_coeffs), CoeffPoly(q_coeffs))
    assert value == pytest.approx(expected, abs=1e-12)


def test_sylvester_matches_root_form(rng):
    for _ in range(20):
        size_a, size_b = rng.integers(1, 4, size=2)
        a, b = rng.uniform(0.5, 2.0, size=2) * rng.choice([-1, 1], size=2)
        p, q = _pair(a, rng.normal(size=size_a), b, rng.normal(size=size_b))
        expected = resultant_roots(p, q)
        got = resultant_sylvester(roots_to_coeffs(p), roots_to_coeffs(q))
        assert got == pytest.approx(expected, rel=1e-9, abs=1e-12)


def test_sylvester_matrix_shape_and_layout():
    mat = sylvester_matrix(CoeffPoly((2, -3, 1)), CoeffPoly((5, 1)))
    assert mat.shape == (3, 3)
    assert list(mat[0]) == [1, -3, 2]
    assert list(mat[1]) == [1, 5, 0]
    assert list(mat[2]) == [0, 1, 5]


def test_sylvester_rejects_constants():
    with pytest.raises(DegreeMismatch):
        resultant_sylvester(CoeffPoly((1,)), CoeffPoly((0, 1)))


def test_batch_matches_scalar(rng):
    p = rng.normal(size=(6, 3))
    q = rng.normal(size=(6, 3))
    p[:, -1] = np.where(p[:, -1] == 0.0, 1.0, p[:, -1])
    q[:, -1] = np.where(q[:, -1] == 0.0, 1.0, q[:, -1])
    batch = resultant_sylvester_batch(p, q)
    for k in range(6):
        assert batch[k] == pytest.approx(resultant_sylvester(CoeffPoly(p[k]), CoeffPoly(q[k])), rel=1e-10)


def test_sylvester_matches_root_form_at_scale():
    """Roots uniform in [-3, 3], degrees 1..5: both forms agree to 1e-9."""
    rng = np.random.default_rng(2024)
    for _ in range(500):
        size_a, size_b = (int(k) for k in rng.integers(1, 6, size=2))
        a, b = (float(x) for x in rng.uniform(0.5, 2.0, size=2) * rng.choice([-1, 1], size=2))
        u = [float(x) for x in rng.uniform(-3.0, 3.0, size=size_a)]
        v = [float(x) for x in rng.uniform(-3.0, 3.0, size=size_b)]
        expected = resultant_roots(*_pair(a, u, b, v))

        # expanding exact roots keeps the coefficients free of rounding
        p_exact, q_exact = _pair(Fraction(a), [Fraction(x) for x in u], Fraction(b), [Fraction(x) for x in v])
        got = resultant_sylvester(roots_to_coeffs(p_exact), roots_to_coeffs(q_exact))
        assert float(got) == pytest.approx(expected, rel=1e-9, abs=1e-300)


def test_sylvester_is_exact_on_rationals():
    p, q = _pair(Fraction(3, 2), (Fraction(1, 3), Fraction(-2, 5)), Fraction(-1, 7), (Fraction(5, 4),))
    value = resultant_sylvester(roots_to_coeffs(p), roots_to_coeffs(q))
    assert isinstance(value, Fraction)
    assert value == resultant_roots(p, q)


@pytest.mark.parametrize(
    "rows, expected",
    [
        ([[2, 0], [0, 3]], 6),
        ([[0, 1], [1, 0]], -1),
        ([[1, 2, 3], [4, 5, 6], [7, 8, 10]], -3),
        ([[1, 2], [2, 4]], 0),
    ],
)
def test_bareiss_determinant(rows, expected):
    """Fraction-free elimination, including a pivot swap and a singular matrix."""
    fractions = [[Fraction(x) for x in row] for row in rows]
    assert bareiss_determinant(fractions) == expected

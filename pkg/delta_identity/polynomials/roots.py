"""
Root-form polynomial operations.

Evaluation, derivatives at roots and at arbitrary points, the
reciprocal-derivative sum and conversions between root form and
coefficient form.

All products run over the roots sorted ascending so that float results are
bit-reproducible regardless of caller order. Arithmetic is plain Python, so
``fractions.Fraction`` inputs give exact results.
"""

from __future__ import annotations

import logging
import math
from numbers import Real
from typing import List, Optional, Sequence, Tuple

from delta_identity.errors import DegreeMismatch, RepeatedRoot
from delta_identity.models import ROOT_COINCIDENCE_TOL, CoeffPoly, RootPoly

logger = logging.getLogger(__name__)


def _prod(values) -> Real:
    acc = 1
    for v in values:
        acc = acc * v
    return acc


def coincidence_threshold(roots: Sequence[Real]) -> float:
    """Distance under which two of ``roots`` count as the same root."""
    return ROOT_COINCIDENCE_TOL * (1.0 + max(abs(float(r)) for r in roots))


def check_distinct(roots: Sequence[Real], what: str = "roots") -> None:
    """
    Raise :class:`RepeatedRoot` when two entries of ``roots`` coincide.

    :param roots: Root list to check.
    :param what: Name used in the error message.
    :raises RepeatedRoot: With the offending index pair.
    """
    if len(roots) < 2:
        return
    threshold = coincidence_threshold(roots)
    order = sorted(range(len(roots)), key=lambda i: roots[i])
    for left, right in zip(order, order[1:]):
        if abs(roots[right] - roots[left]) <= threshold:
            pair = (min(left, right), max(left, right))
            logger.debug("Repeated %s at indices %s", what, pair)
            raise RepeatedRoot(f"{what} {pair[0]} and {pair[1]} coincide", pair)


def eval_root_poly(p: RootPoly, x: Real) -> Real:
    """
    Evaluate ``leading * prod(x - root_i)``.

    :param p: Polynomial in root form.
    :param x: Evaluation point.
    :return: ``P(x)``.
    """
    return p.leading * _prod(x - r for r in sorted(p.roots))


def derivative_at_root(p: RootPoly, k: int) -> Real:
    """
    ``P'(root_k) = leading * prod_{i != k} (root_k - root_i)``.

    :param p: Polynomial with pairwise distinct roots.
    :param k: Root index.
    :raises RepeatedRoot: If two roots coincide.
    """
    check_distinct(p.roots)
    rk = p.roots[k]
    others = sorted(r for i, r in enumerate(p.roots) if i != k)
    return p.leading * _prod(rk - r for r in others)


def derivative_at(p: RootPoly, x: Real) -> Real:
    """
    ``P'(x)`` at an arbitrary point, by the product rule over the factors.

    Unlike :func:`derivative_at_root` this needs no distinctness.
    """
    roots = sorted(p.roots)
    total = 0
    for k in range(len(roots)):
        total = total + _prod(x - r for i, r in enumerate(roots) if i != k)
    return p.leading * total


def reciprocal_derivative_sum(s: RootPoly) -> Real:
    """
    Sum of ``1 / S'(w)`` over the roots ``w`` of ``S``.

    For degree >= 2 with simple roots this vanishes identically, since
    ``1/S(x)`` has partial fractions ``sum 1/(S'(w)(x - w))`` and decays like
    ``1/x**2``.

    :raises DegreeMismatch: If ``S`` has degree < 2.
    :raises RepeatedRoot: If two roots coincide.
    """
    if s.degree < 2:
        raise DegreeMismatch("reciprocal derivative sum needs degree >= 2")
    check_distinct(s.roots)
    terms = sorted(1 / derivative_at_root(s, k) for k in range(s.degree))
    return math.fsum(terms) if not _all_exact(terms) else sum(terms)


def _all_exact(values: Sequence[Real]) -> bool:
    return all(not isinstance(v, float) for v in values)


def roots_to_coeffs(p: RootPoly) -> CoeffPoly:
    """
    Expand a root-form polynomial into ascending coefficients (Vieta).

    ``RootPoly(1, (1, 2))`` becomes ``CoeffPoly((2, -3, 1))``.
    """
    coeffs: List[Real] = [p.leading]
    for r in sorted(p.roots):
        # multiply by (x - r)
        shifted = [0] + coeffs
        scaled = [-r * c for c in coeffs] + [0]
        coeffs = [s + t for s, t in zip(shifted, scaled)]
    return CoeffPoly(tuple(coeffs))


def coeffs_to_roots_quadratic(p: CoeffPoly) -> Optional[Tuple[float, float]]:
    """
    Real roots of a quadratic, ascending, or ``None`` if they are complex.

    The larger-magnitude root is computed first and the other recovered from
    the product of roots, which avoids cancellation.

    :raises DegreeMismatch: If ``p`` is not of degree exactly 2.
    """
    if p.degree != 2:
        raise DegreeMismatch(f"expected a quadratic, got degree {p.degree}")
    c, b, a = (float(v) for v in p.coefficients)
    disc = b * b - 4.0 * a * c
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    q = -0.5 * (b + math.copysign(sq, b))
    if q == 0.0:
        # b == 0 and c == 0: double root at the origin
        return (0.0, 0.0)
    r1 = q / a
    r2 = c / q
    return (min(r1, r2), max(r1, r2))

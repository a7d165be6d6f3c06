"""
The multiplier ``J(u, v)`` of the delta-identity, in several equivalent forms.

- :func:`j_multiplier`: the defining sum over the ``B`` roots.
- :func:`j_tilde`: the same sum with the roles of ``P`` and ``Q`` swapped;
  ``J = (-1)**(|A||B| - 1) * J~``.
- :func:`j_product_form` / :func:`j_tilde_product_form`: the ``S'`` forms
  with ``S = PQ``.
- :func:`j_degree2`: divided difference of ``P`` at the roots of a
  quadratic ``Q``, computed from ``Q``'s coefficients only.
- :func:`j_on_support`: closed form of ``J`` on ``u_alpha = v_beta``.
- :func:`j_multiplier_batch`: the defining sum over stacks of root
  configurations, for quadrature and Monte Carlo weights.

Every function accepts float, int or ``Fraction`` data; exact inputs give
exact outputs.
"""

from __future__ import annotations

import logging
import math
from numbers import Real
from typing import Sequence, Union

import numpy as np

from delta_identity.errors import DegreeMismatch
from delta_identity.models import CoeffPoly, RootPoly, SupportHyperplane
from delta_identity.polynomials.roots import (
    check_distinct,
    derivative_at_root,
    eval_root_poly,
    roots_to_coeffs,
)

logger = logging.getLogger(__name__)


def _prod(values) -> Real:
    acc = 1
    for v in values:
        acc = acc * v
    return acc


def _sum(values: Sequence[Real]) -> Real:
    values = list(values)
    if any(isinstance(v, float) for v in values):
        return math.fsum(values)
    return sum(values)


def _interleaved_sum(
    outer: Sequence[Real],
    inner: Sequence[Real],
    lead_outer: Real,
    lead_inner: Real,
) -> Real:
    """
    ``lead_outer**(|inner|-1) * lead_inner**(|outer|-1)`` times
    ``sum_{k} prod_{j != k} prod_i (outer_j - inner_i) / (outer_k - outer_j)``.

    With ``outer = v`` and ``inner = u`` this is ``J``; swapped it is ``J~``.
    """
    check_distinct(outer)
    inner_sorted = sorted(inner)
    terms = []
    for k, ok in enumerate(outer):
        term = 1
        for j in sorted(range(len(outer)), key=lambda idx: outer[idx]):
            if j == k:
                continue
            oj = outer[j]
            term = term * _prod(oj - ii for ii in inner_sorted) / (ok - oj)
        terms.append(term)
    scale = lead_outer ** (len(inner) - 1) * lead_inner ** (len(outer) - 1)
    return scale * _sum(terms)


def j_multiplier(p: RootPoly, q: RootPoly) -> Real:
    """
    ``J(u, v)`` from its defining sum over the roots of ``Q``.

    :param p: ``P`` with leading ``a`` and roots ``u``.
    :param q: ``Q`` with leading ``b`` and pairwise distinct roots ``v``.
    :raises RepeatedRoot: If two ``v`` coincide.
    """
    value = _interleaved_sum(q.roots, p.roots, q.leading, p.leading)
    # scale above is b**(|A|-1) * a**(|B|-1)
    logger.debug("J(|A|=%d, |B|=%d) = %r", p.degree, q.degree, value)
    return value


def j_tilde(p: RootPoly, q: RootPoly) -> Real:
    """
    ``J~(u, v)``: ``J`` with the roles of ``P`` and ``Q`` interchanged.

    :raises RepeatedRoot: If two ``u`` coincide.
    """
    return _interleaved_sum(p.roots, q.roots, p.leading, q.leading)


def sign_relation(size_a: int, size_b: int) -> int:
    """``(-1)**(|A||B| - 1)``, the factor between ``J`` and ``J~``."""
    return -1 if (size_a * size_b - 1) % 2 else 1


def _product_poly(p: RootPoly, q: RootPoly) -> RootPoly:
    s = RootPoly(p.leading * q.leading, tuple(p.roots) + tuple(q.roots), p.label)
    check_distinct(s.roots, what="roots of PQ")
    return s


def j_product_form(p: RootPoly, q: RootPoly) -> Real:
    """
    ``J = b**|A| * (sum_beta 1/S'(v_beta)) * prod_beta P(v_beta)`` with ``S = PQ``.

    :raises RepeatedRoot: If any two roots of ``S`` coincide.
    """
    s = _product_poly(p, q)
    offset = p.degree
    recip = _sum(sorted(1 / derivative_at_root(s, offset + k) for k in range(q.degree)))
    p_values = _prod(eval_root_poly(p, v) for v in sorted(q.roots))
    return q.leading ** p.degree * recip * p_values


def j_tilde_product_form(p: RootPoly, q: RootPoly) -> Real:
    """
    ``J~ = a**|B| * (sum_alpha 1/S'(u_alpha)) * prod_alpha Q(u_alpha)``.

    :raises RepeatedRoot: If any two roots of ``S`` coincide.
    """
    s = _product_poly(p, q)
    recip = _sum(sorted(1 / derivative_at_root(s, k) for k in range(p.degree)))
    q_values = _prod(eval_root_poly(q, u) for u in sorted(p.roots))
    return p.leading ** q.degree * recip * q_values


def complete_homogeneous(e1: Real, e2: Real, degree: int) -> list:
    """
    ``h_0 .. h_degree`` of two variables from ``e1 = v' + v''``, ``e2 = v' v''``.

    ``h_m = e1 h_{m-1} - e2 h_{m-2}``; ``h_{k-1}`` is the divided difference of
    ``x**k`` at ``(v', v'')``.
    """
    h = [1, e1]
    while len(h) <= degree:
        h.append(e1 * h[-1] - e2 * h[-2])
    return h[: degree + 1]


def j_degree2(p: Union[RootPoly, CoeffPoly, Sequence[Real]], q: CoeffPoly) -> Real:
    """
    ``J = -b**(|A|-1) * (P(v') - P(v'')) / (v' - v'')`` for a quadratic ``Q``.

    The divided difference is evaluated as a polynomial in the symmetric
    functions of ``Q``'s roots, so complex roots are fine.

    :param p: ``P`` in root or coefficient form; ``|A|`` is its degree. A bare
              ascending coefficient sequence is taken at its formal degree
              even when the top coefficient vanishes, which keeps ``J``
              continuous in the coefficients.
    :param q: ``Q = b x**2 + q1 x + q0``.
    :raises DegreeMismatch: If ``Q`` is not of degree 2.
    """
    if q.degree != 2:
        raise DegreeMismatch(f"j_degree2 needs a quadratic Q, got degree {q.degree}")
    if isinstance(p, RootPoly):
        coeffs = roots_to_coeffs(p).coefficients
    elif isinstance(p, CoeffPoly):
        coeffs = p.coefficients
    else:
        coeffs = tuple(p)
    degree = len(coeffs) - 1
    q0, q1, b = q.coefficients
    e1 = -q1 / b
    e2 = q0 / b
    h = complete_homogeneous(e1, e2, degree)
    divided = _sum([coeffs[k] * h[k - 1] for k in range(1, degree + 1)])
    return -(b ** (degree - 1)) * divided


def j_on_support(
    u: Sequence[Real],
    v: Sequence[Real],
    h: SupportHyperplane,
    a: Real,
    b: Real,
) -> Real:
    """
    ``J`` restricted to ``u_alpha = v_beta``:
    ``a**(|B|-1) b**(|A|-1) (-1)**(|B|-1) prod_{a'' != alpha, b'' != beta} (v_b'' - u_a'')``.
    """
    sign = -1 if (len(v) - 1) % 2 else 1
    rest = _prod(
        vb - ua
        for j, vb in enumerate(v)
        if j != h.beta
        for i, ua in enumerate(u)
        if i != h.alpha
    )
    return a ** (len(v) - 1) * b ** (len(u) - 1) * sign * rest


def j_multiplier_batch(u: np.ndarray, v: np.ndarray, a: float, b: float) -> np.ndarray:
    """
    ``J`` at a stack of root configurations, from the defining sum.

    :param u: Array ``(N, |A|)`` of ``P`` roots.
    :param v: Array ``(N, |B|)`` of ``Q`` roots, pairwise distinct per row.
    :return: Array ``(N,)``.
    """
    u = np.atleast_2d(np.asarray(u, dtype=float))
    v = np.atleast_2d(np.asarray(v, dtype=float))
    size_a, size_b = u.shape[1], v.shape[1]
    # n_j = prod_alpha (v_j - u_alpha)
    n = np.prod(v[:, :, None] - u[:, None, :], axis=2)
    total = np.zeros(u.shape[0])
    for k in range(size_b):
        term = np.ones(u.shape[0])
        for j in range(size_b):
            if j != k:
                term = term * n[:, j] / (v[:, k] - v[:, j])
        total = total + term
    return b ** (size_a - 1) * a ** (size_b - 1) * total

"""
Resultants in root form and via the Sylvester determinant.

The root-form resultant uses the normalization
``R(u, v) = a**|B| * b**|A| * prod(u_alpha - v_beta)``. The Sylvester
determinant is built with ``P`` rows first and coefficients in descending
order, which yields the same normalization and sign.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from numbers import Real
from typing import List, Sequence

import numpy as np

from delta_identity.errors import DegreeMismatch
from delta_identity.models import CoeffPoly, Family, RootPoly

logger = logging.getLogger(__name__)


def resultant_roots(p: RootPoly, q: RootPoly) -> Real:
    """
    Resultant of ``P`` (family A) and ``Q`` (family B) from their roots.

    Zero iff ``P`` and ``Q`` share a root exactly.

    :param p: ``P_x(u) = a * prod(x - u_alpha)``, labelled family A.
    :param q: ``Q_x(v) = b * prod(x - v_beta)``, labelled family B.
    :raises ValueError: If the family labels are not (A, B).
    """
    if p.label is not Family.A or q.label is not Family.B:
        raise ValueError(
            f"resultant expects (A, B) families, got ({p.label.value}, {q.label.value})"
        )
    acc = p.leading ** q.degree * q.leading ** p.degree
    for u in sorted(p.roots):
        for v in sorted(q.roots):
            acc = acc * (u - v)
    return acc


def _sylvester_rows(p: CoeffPoly, q: CoeffPoly) -> List[List[Fraction]]:
    m, n = p.degree, q.degree
    if m < 1 or n < 1:
        raise DegreeMismatch("Sylvester resultant needs non-constant polynomials")
    size = m + n
    p_desc = [Fraction(c) for c in reversed(p.coefficients)]
    q_desc = [Fraction(c) for c in reversed(q.coefficients)]
    rows = []
    for row in range(n):
        rows.append([Fraction(0)] * row + p_desc + [Fraction(0)] * (size - row - m - 1))
    for row in range(m):
        rows.append([Fraction(0)] * row + q_desc + [Fraction(0)] * (size - row - n - 1))
    return rows


def sylvester_matrix(p: CoeffPoly, q: CoeffPoly) -> np.ndarray:
    """
    Sylvester matrix of two non-constant polynomials, as floats.

    The first ``deg Q`` rows hold the descending coefficients of ``P``,
    shifted one column per row; the last ``deg P`` rows do the same for ``Q``.
    """
    return np.array([[float(x) for x in row] for row in _sylvester_rows(p, q)])


def bareiss_determinant(rows: Sequence[Sequence[Fraction]]) -> Fraction:
    """
    Exact determinant by fraction-free (Bareiss) elimination.

    Every division is exact, so the result equals the determinant of the
    rational matrix with no rounding.
    """
    mat = [list(row) for row in rows]
    size = len(mat)
    sign = 1
    prev = Fraction(1)
    for k in range(size - 1):
        if mat[k][k] == 0:
            swap = next((r for r in range(k + 1, size) if mat[r][k] != 0), None)
            if swap is None:
                return Fraction(0)
            mat[k], mat[swap] = mat[swap], mat[k]
            sign = -sign
        pivot = mat[k][k]
        for i in range(k + 1, size):
            for j in range(k + 1, size):
                mat[i][j] = (mat[i][j] * pivot - mat[i][k] * mat[k][j]) / prev
            mat[i][k] = Fraction(0)
        prev = pivot
    return sign * mat[-1][-1]


def resultant_sylvester(p: CoeffPoly, q: CoeffPoly) -> Real:
    """
    Resultant as the determinant of the Sylvester matrix.

    Float coefficients are read exactly as ``Fraction(float)`` and the
    determinant is taken exactly, so the only rounding is the final
    conversion back to float. What remains is the conditioning of the
    coefficients themselves: when a root of ``P`` nearly coincides with a
    root of ``Q``, the resultant is small while the coefficients are not, and
    coefficients expanded in float from roots carry relative errors that the
    resultant amplifies. Expand with exact roots to avoid that.

    :param p: Non-constant polynomial, coefficient form.
    :param q: Non-constant polynomial, coefficient form.
    :return: ``det(Syl(P, Q))``, equal to :func:`resultant_roots` on the
             corresponding root-form inputs. Exact (``Fraction``) when every
             coefficient is an int or ``Fraction``, float otherwise.
    """
    value = bareiss_determinant(_sylvester_rows(p, q))
    exact = all(not isinstance(c, float) for c in p.coefficients + q.coefficients)
    logger.debug("Sylvester resultant (deg %d, %d) = %s", p.degree, q.degree, value)
    return value if exact else float(value)


def resultant_sylvester_batch(p_coeffs: np.ndarray, q_coeffs: np.ndarray) -> np.ndarray:
    """
    Sylvester resultants for stacks of polynomials of fixed degrees.

    :param p_coeffs: Array ``(N, m + 1)`` of ascending coefficients.
    :param q_coeffs: Array ``(N, n + 1)`` of ascending coefficients.
    :return: Array ``(N,)`` of determinants.
    """
    p_coeffs = np.atleast_2d(np.asarray(p_coeffs, dtype=float))
    q_coeffs = np.atleast_2d(np.asarray(q_coeffs, dtype=float))
    m = p_coeffs.shape[1] - 1
    n = q_coeffs.shape[1] - 1
    if m < 1 or n < 1:
        raise DegreeMismatch("Sylvester resultant needs non-constant polynomials")
    count = p_coeffs.shape[0]
    size = m + n
    mats = np.zeros((count, size, size), dtype=float)
    p_desc = p_coeffs[:, ::-1]
    q_desc = q_coeffs[:, ::-1]
    for row in range(n):
        mats[:, row, row:row + m + 1] = p_desc
    for row in range(m):
        mats[:, n + row, row:row + n + 1] = q_desc
    return np.linalg.det(mats)

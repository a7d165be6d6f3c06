"""
Characteristic-polynomial coefficients of ``C = diag(alpha) + R diag(beta) R^T``.

For traceless ``alpha`` and ``beta`` the characteristic polynomial is
``z**3 + p z + q`` with ``p = -tr(C**2)/2`` and ``q = -det(C)``. At fixed
``(phi, psi)`` both coefficients are quadratics in ``c = cos(theta)``;
:func:`pq_polynomials_in_c` recovers them by interpolation and certifies the
degree at a fourth point.
"""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from delta_identity.errors import DegreeCertificateFailure
from delta_identity.horn.rotations import rotations_from_c
from delta_identity.models import CoeffPoly

logger = logging.getLogger(__name__)

#: Interpolation nodes in c.
C_NODES = (-1.0, 0.0, 1.0)

#: Certificate point in c.
C_CHECK = 0.5

#: Relative residual allowed at the certificate point.
CERTIFICATE_TOL = 1e-9

#: Coefficients below this (relative) are dropped when reducing the degree.
TRIM_TOL = 1e-12

def _matrices(alpha: Sequence[float], beta: Sequence[float], rotations: np.ndarray) -> np.ndarray:
    a = np.diag(np.asarray(alpha, dtype=float))
    b = np.diag(np.asarray(beta, dtype=float))
    return a + rotations @ b @ np.swapaxes(rotations, -1, -2)


def char_poly_pq_batch(
    alpha: Sequence[float],
    beta: Sequence[float],
    rotations: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """``(p, q)`` for a stack of rotations ``(..., 3, 3)``."""
    c = _matrices(alpha, beta, rotations)
    p = -0.5 * np.einsum("...ij,...ji->...", c, c)
    q = -np.linalg.det(c)
    return p, q


def char_poly_pq(alpha: Sequence[float], beta: Sequence[float], rotation: np.ndarray) -> Tuple[float, float]:
    """
    ``(p, q)`` with ``det(z I - C) = z**3 + p z + q``.

    ``alpha = (1, -1, 0)``, ``beta = 0`` gives ``(-1, 0)`` for any rotation.
    """
    p, q = char_poly_pq_batch(alpha, beta, np.asarray(rotation, dtype=float))
    return float(p), float(q)


def pq_discriminant(p, q):
    """``-4 p**3 - 27 q**2``; non-negative exactly when the spectrum is real."""
    return -4.0 * np.asarray(p) ** 3 - 27.0 * np.asarray(q) ** 2


def pq_coefficients(
    alpha: Sequence[float],
    beta: Sequence[float],
    phi: np.ndarray,
    psi: float,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Ascending coefficients of ``P(c)`` and ``Q(c)`` for each ``phi`` at fixed ``psi``.

    :return: Arrays ``(N, 3)`` for ``P`` and ``Q``.
    :raises DegreeCertificateFailure: If a quadratic misses the certificate point.
    """
    phi = np.atleast_1d(np.asarray(phi, dtype=float))
    nodes = np.array(C_NODES + (C_CHECK,))
    rot = rotations_from_c(nodes[None, :], phi[:, None], psi)
    p_vals, q_vals = char_poly_pq_batch(alpha, beta, rot)
    out = []
    for vals, name in ((p_vals, "P"), (q_vals, "Q")):
        fm, f0, f1, fc = vals[:, 0], vals[:, 1], vals[:, 2], vals[:, 3]
        coeffs = np.stack([f0, 0.5 * (f1 - fm), 0.5 * (f1 + fm) - f0], axis=1)
        predicted = coeffs[:, 0] + C_CHECK * coeffs[:, 1] + C_CHECK**2 * coeffs[:, 2]
        scale = 1.0 + np.max(np.abs(vals[:, :3]), axis=1)
        residual = np.abs(predicted - fc) / scale
        worst = float(np.max(residual))
        if worst > CERTIFICATE_TOL:
            k = int(np.argmax(residual))
            raise DegreeCertificateFailure(
                f"{name}(c) is not quadratic at phi={phi[k]:.6g}, psi={psi:.6g}: "
                f"relative residual {worst:.3g}"
            )
        out.append(coeffs)
    return out[0], out[1]


def _reduce(coeffs: np.ndarray) -> CoeffPoly:
    values = [float(c) for c in coeffs]
    scale = max(1.0, max(abs(c) for c in values))
    while len(values) > 1 and abs(values[-1]) <= TRIM_TOL * scale:
        values.pop()
    return CoeffPoly(tuple(values))


def pq_polynomials_in_c(
    alpha: Sequence[float],
    beta: Sequence[float],
    phi: float,
    psi: float,
) -> Tuple[CoeffPoly, CoeffPoly]:
    """
    ``P`` and ``Q`` as polynomials in ``c`` at fixed ``(phi, psi)``, reduced
    to their actual degree.

    :raises DegreeCertificateFailure: If the certificate point disagrees.
    """
    p_coeffs, q_coeffs = pq_coefficients(alpha, beta, np.array([phi]), psi)
    return _reduce(p_coeffs[0]), _reduce(q_coeffs[0])


def attainable_region_box(
    alpha: Sequence[float],
    beta: Sequence[float],
) -> Tuple[Tuple[float, float], Tuple[float, float]]:
    """
    Bounding box of the attainable ``(p, q)``.

    ``tr(C**2) = |alpha|**2 + |beta|**2 + 2 tr(A R B R^T)`` and the cross term
    ranges between the anti-sorted and sorted pairings of the eigenvalues;
    ``|q|`` is bounded by the discriminant curve at the most negative ``p``.
    A degenerate ``p`` range is padded so that the grid has positive area.
    """
    a = np.sort(np.asarray(alpha, dtype=float))
    b = np.sort(np.asarray(beta, dtype=float))
    base = float(a @ a + b @ b)
    cross_hi = float(a @ b)
    cross_lo = float(a @ b[::-1])
    p_lo = -0.5 * (base + 2.0 * cross_hi)
    p_hi = -0.5 * (base + 2.0 * cross_lo)
    if p_hi - p_lo <= 1e-12 * (1.0 + abs(p_lo)):
        pad = 0.05 * (1.0 + abs(p_lo))
        p_lo, p_hi = p_lo - pad, p_hi + pad
    q_max = math.sqrt(max(-4.0 * min(p_lo, 0.0) ** 3 / 27.0, 0.0))
    if q_max == 0.0:
        q_max = 0.05
    logger.debug("Attainable box p=[%g, %g], q=[%g, %g]", p_lo, p_hi, -q_max, q_max)
    return (p_lo, p_hi), (-q_max, q_max)


def point_mass(alpha: Sequence[float], beta: Sequence[float]) -> Optional[Tuple[float, float]]:
    """
    The single attainable ``(p, q)`` when one orbit is a point (all
    eigenvalues zero), else ``None``.
    """
    for fixed, other in ((beta, alpha), (alpha, beta)):
        if all(x == 0.0 for x in fixed):
            lam = np.asarray(other, dtype=float)
            return float(-0.5 * lam @ lam), float(-np.prod(lam))
    return None

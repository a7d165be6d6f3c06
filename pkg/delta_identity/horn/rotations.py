"""
SO(3) rotations in z-x-z Euler angles and their Haar sampling.

``R = R_z(phi) R_x(theta) R_z(psi)``. Under the normalized Haar measure the
angles are independent with ``phi, psi`` uniform on ``[0, 2 pi)`` and
``c = cos(theta)`` uniform on ``[-1, 1]``. Conjugation orbits of diagonal
matrices are invariant under ``phi -> phi + pi`` and ``psi -> psi + pi``,
so the reduced ranges ``phi, psi in [0, pi]`` give the same law for
characteristic polynomials.
"""

from __future__ import annotations

import logging
import math
from typing import Dict, Tuple

import numpy as np

from delta_identity.models import EulerAngles

logger = logging.getLogger(__name__)


def _rz(angle: np.ndarray) -> np.ndarray:
    c, s = np.cos(angle), np.sin(angle)
    out = np.zeros(np.shape(angle) + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    out[..., 2, 2] = 1.0
    return out


def _rx(c: np.ndarray, s: np.ndarray) -> np.ndarray:
    out = np.zeros(np.shape(c) + (3, 3))
    out[..., 0, 0] = 1.0
    out[..., 1, 1] = c
    out[..., 1, 2] = -s
    out[..., 2, 1] = s
    out[..., 2, 2] = c
    return out


def rotations_from_c(c: np.ndarray, phi: np.ndarray, psi: np.ndarray) -> np.ndarray:
    """
    Stack of rotations from ``c = cos(theta)`` (``theta`` in ``[0, pi]``, so
    ``sin(theta) >= 0``) and the two z-angles; arguments broadcast.
    """
    c, phi, psi = np.broadcast_arrays(
        np.asarray(c, dtype=float), np.asarray(phi, dtype=float), np.asarray(psi, dtype=float)
    )
    s = np.sqrt(np.clip(1.0 - c * c, 0.0, None))
    return _rz(phi) @ _rx(c, s) @ _rz(psi)


def rotation_from_euler(angles: EulerAngles) -> np.ndarray:
    """
    ``R_z(phi) R_x(theta) R_z(psi)`` as a 3x3 array.

    ``EulerAngles(0, 0, 0)`` gives the identity.
    """
    c = math.cos(angles.theta)
    s = math.sin(angles.theta)
    return _rz(np.float64(angles.phi)) @ _rx(np.float64(c), np.float64(s)) @ _rz(np.float64(angles.psi))


def sample_euler_angles(
    rng: np.random.Generator,
    count: int,
    reduced: bool = False,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Haar-distributed ``(c, phi, psi)`` samples.

    :param rng: Random generator.
    :param count: Number of samples.
    :param reduced: Draw ``phi, psi`` from ``[0, pi]`` instead of ``[0, 2 pi)``;
                    only valid for conjugation-invariant statistics.
    :return: Arrays ``c``, ``phi``, ``psi`` of shape ``(count,)``.
    """
    span = math.pi if reduced else 2.0 * math.pi
    c = rng.uniform(-1.0, 1.0, size=count)
    phi = rng.uniform(0.0, span, size=count)
    psi = rng.uniform(0.0, span, size=count)
    return c, phi, psi


def trace_moments(rng: np.random.Generator, count: int, reduced: bool = False) -> Dict[str, float]:
    """
    First two moments of ``tr R`` under the sampler, with standard errors.

    Haar values are ``E[tr R] = 0`` and ``E[(tr R)**2] = 1``.
    """
    c, phi, psi = sample_euler_angles(rng, count, reduced)
    tr = np.trace(rotations_from_c(c, phi, psi), axis1=-2, axis2=-1)
    sq = tr * tr
    moments = {
        "mean": float(np.mean(tr)),
        "mean_stderr": float(np.std(tr, ddof=1) / math.sqrt(count)),
        "second": float(np.mean(sq)),
        "second_stderr": float(np.std(sq, ddof=1) / math.sqrt(count)),
    }
    logger.info("Trace moments over %d samples: %s", count, moments)
    return moments

"""
Mollified Monte Carlo oracle for the left side of the delta-identity.

Both deltas are replaced by a Gaussian mollifier ``theta_eps`` and

    I_eps = int dx int du int dv theta_eps(P_x(u)) theta_eps(Q_x(v)) phi(u, v)

is estimated by importance sampling: ``(u, v)`` is drawn from ``phi`` (or
uniformly from its support box) and ``x`` from a Gaussian mixture centered at
the roots, each component as wide as the mollified delta it has to hit. The
estimator is unbiased for ``I_eps``; ``I_eps`` itself approaches the
localized value with an ``O(eps**2)`` bias, which :func:`mollifier_sequence`
removes by Richardson extrapolation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from delta_identity.measures.test_functions import (
    BoxSupported,
    GaussianTest,
    TestFunction,
    TruncatedGaussian,
)
from delta_identity.models import MollifierSpec, RootPoly
from delta_identity.utils.random_streams import substreams

logger = logging.getLogger(__name__)

#: Largest ``|A| + |B|`` the oracle accepts.
MAX_ORACLE_DIM = 5

#: Samples drawn per vectorized block.
CHUNK = 250_000


@dataclass(frozen=True)
class MollifiedEstimate:
    """
    One oracle run.

    :param epsilon: Mollifier width.
    :param value: Sample mean.
    :param stderr: Standard error of the mean.
    :param samples: Sample count.
    """

    epsilon: float
    value: float
    stderr: float
    samples: int


@dataclass
class MollifierSequence:
    """Estimates over a decreasing width schedule, plus the extrapolated limit."""

    estimates: List[MollifiedEstimate] = field(default_factory=list)
    extrapolated: Optional[float] = None

    @property
    def last(self) -> MollifiedEstimate:
        return self.estimates[-1]

    def agrees_with(self, target: float, allowance: float) -> bool:
        """
        Whether the smallest-width estimate lies within three standard errors
        plus ``allowance * |target|`` of ``target``.
        """
        est = self.last
        return abs(est.value - target) <= 3.0 * est.stderr + allowance * abs(target)


def _sample_phi(phi: TestFunction, rng: np.random.Generator, count: int) -> Tuple[np.ndarray, np.ndarray]:
    """Points and importance weights with ``E[w g(y)] = int phi g``."""
    n = phi.dimension
    if isinstance(phi, (GaussianTest, TruncatedGaussian)):
        y = rng.normal(phi.center, phi.width, size=(count, n))
        if isinstance(phi, TruncatedGaussian):
            return y, phi.inside(y).astype(float)
        return y, np.ones(count)
    if isinstance(phi, BoxSupported):
        lo, hi = phi.support_box()
        y = rng.uniform(lo, hi, size=(count, n))
        return y, phi(y) * float(np.prod(hi - lo))
    raise ValueError(f"cannot sample from {phi.kind} test function")


def _poly_at(x: np.ndarray, roots: np.ndarray, leading: float) -> np.ndarray:
    return leading * np.prod(x[:, None] - roots, axis=1)


def _own_derivatives(roots: np.ndarray, leading: float) -> np.ndarray:
    """``F'(root_k)`` for every row and every ``k``."""
    diff = roots[:, :, None] - roots[:, None, :]
    k = roots.shape[1]
    diff[:, np.arange(k), np.arange(k)] = 1.0
    return leading * np.prod(diff, axis=2)


def _chunk_values(
    p: RootPoly,
    q: RootPoly,
    phi: TestFunction,
    mollifier: MollifierSpec,
    rng: np.random.Generator,
    count: int,
) -> np.ndarray:
    eps = mollifier.epsilon
    a, b = float(p.leading), float(q.leading)
    size_a = p.degree
    y, w = _sample_phi(phi, rng, count)
    u, v = y[:, :size_a], y[:, size_a:]

    centers = np.hstack([u, v])
    derivs = np.hstack([_own_derivatives(u, a), _own_derivatives(v, b)])
    with np.errstate(divide="ignore"):
        scales = np.minimum(eps / np.maximum(np.abs(derivs), 1e-12), 1.0)
    m = centers.shape[1]
    pick = rng.integers(0, m, size=count)
    rows = np.arange(count)
    x = rng.normal(centers[rows, pick], scales[rows, pick])

    z = (x[:, None] - centers) / scales
    proposal = np.mean(np.exp(-0.5 * z**2) / (scales * math.sqrt(2.0 * math.pi)), axis=1)
    target = mollifier(_poly_at(x, u, a)) * mollifier(_poly_at(x, v, b))
    return w * target / proposal


def mollified_oracle(
    p: RootPoly,
    q: RootPoly,
    phi: TestFunction,
    mollifier: MollifierSpec,
    sample_count: int,
    seed,
) -> MollifiedEstimate:
    """
    Unbiased Monte Carlo estimate of ``I_eps`` with its standard error.

    :param p: Supplies ``|A|`` and ``a``.
    :param q: Supplies ``|B|`` and ``b``.
    :param phi: Test function on ``R^{|A|+|B|}``.
    :param mollifier: Mollifier width.
    :param sample_count: Number of samples (>= 2).
    :param seed: Integer seed or ``numpy.random.SeedSequence``.
    :raises ValueError: If ``|A| + |B|`` exceeds :data:`MAX_ORACLE_DIM` or
                        ``phi`` has the wrong dimension.
    """
    n = p.degree + q.degree
    if n > MAX_ORACLE_DIM:
        raise ValueError(f"mollified oracle supports |A|+|B| <= {MAX_ORACLE_DIM}, got {n}")
    if phi.dimension != n:
        raise ValueError(f"test function must live on R^{n}, got R^{phi.dimension}")
    if sample_count < 2:
        raise ValueError("sample count must be >= 2")

    rng = np.random.default_rng(seed)
    total = 0.0
    total_sq = 0.0
    remaining = sample_count
    while remaining:
        count = min(CHUNK, remaining)
        values = _chunk_values(p, q, phi, mollifier, rng, count)
        total += math.fsum(values)
        total_sq += math.fsum(values * values)
        remaining -= count
    mean = total / sample_count
    var = max(total_sq / sample_count - mean * mean, 0.0) * sample_count / (sample_count - 1)
    stderr = math.sqrt(var / sample_count)
    logger.info("Mollified estimate (eps=%g, N=%d) = %.8g +/- %.2g", mollifier.epsilon, sample_count, mean, stderr)
    return MollifiedEstimate(mollifier.epsilon, mean, stderr, sample_count)


def richardson(estimates: Sequence[MollifiedEstimate]) -> Optional[float]:
    """
    Extrapolate the last two estimates to zero width assuming ``O(eps**2)`` bias.
    """
    if len(estimates) < 2:
        return None
    coarse, fine = estimates[-2], estimates[-1]
    r2 = (coarse.epsilon / fine.epsilon) ** 2
    return (r2 * fine.value - coarse.value) / (r2 - 1.0)


def mollifier_sequence(
    p: RootPoly,
    q: RootPoly,
    phi: TestFunction,
    epsilons: Sequence[float],
    sample_count: int,
    seed: int,
) -> MollifierSequence:
    """
    Run the oracle for every width in ``epsilons`` on independent substreams
    of ``seed`` and extrapolate.
    """
    streams = substreams(seed, len(epsilons))
    seq = MollifierSequence()
    for eps, stream in zip(epsilons, streams):
        seq.estimates.append(mollified_oracle(p, q, phi, MollifierSpec(eps), sample_count, stream))
    seq.extrapolated = richardson(seq.estimates)
    logger.debug("Richardson limit: %s", seq.extrapolated)
    return seq

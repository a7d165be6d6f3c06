"""
Monte Carlo histogram of ``(p, q)`` under Haar-random rotations.

Samples are drawn in fixed-size chunks; chunk ``k`` always uses substream
``k`` of the run seed, so the histogram is identical for any worker count.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from delta_identity.horn.charpoly import (
    attainable_region_box,
    char_poly_pq_batch,
    point_mass,
    pq_discriminant,
)
from delta_identity.horn.rotations import rotations_from_c, sample_euler_angles
from delta_identity.models import HornConfig
from delta_identity.utils.parallel import run_tasks
from delta_identity.utils.random_streams import substreams

logger = logging.getLogger(__name__)

#: Rotations per sampling chunk.
CHUNK = 100_000

#: Relative slack of the per-sample discriminant check.
DISCRIMINANT_TOL = 1e-9


@dataclass
class HornGrid:
    """
    Density values on a ``bins x bins`` grid in ``(p, q)``.

    :param p_edges: Bin edges in ``p`` (``bins + 1``).
    :param q_edges: Bin edges in ``q``.
    :param values: Array ``(bins, bins)`` indexed ``[p_bin, q_bin]``.
    :param stderr: Standard errors (Monte Carlo) or ``None``.
    :param flagged: Bins containing a divergence point (localized).
    :param method: ``"monte-carlo"`` or ``"localized"``.
    :param metadata: Run parameters.
    """

    p_edges: np.ndarray
    q_edges: np.ndarray
    values: np.ndarray
    stderr: Optional[np.ndarray] = None
    flagged: Optional[np.ndarray] = None
    method: str = "monte-carlo"
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def bin_area(self) -> float:
        return float((self.p_edges[1] - self.p_edges[0]) * (self.q_edges[1] - self.q_edges[0]))

    @property
    def p_centers(self) -> np.ndarray:
        return 0.5 * (self.p_edges[:-1] + self.p_edges[1:])

    @property
    def q_centers(self) -> np.ndarray:
        return 0.5 * (self.q_edges[:-1] + self.q_edges[1:])

    @property
    def total_mass(self) -> float:
        return float(np.sum(self.values) * self.bin_area)


def centered_range(center: float, half: float, bins: int) -> Tuple[float, float]:
    """Range of width ``2 * half`` whose middle bin is centered on ``center``."""
    width = 2.0 * half / bins
    lo = center - (bins // 2 + 0.5) * width
    return lo, lo + bins * width


def grid_edges(cfg: HornConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Bin edges from the configured ranges, defaulting to the attainable box."""
    p_box, q_box = attainable_region_box(cfg.alpha, cfg.beta)
    point = point_mass(cfg.alpha, cfg.beta)
    if point is not None:
        # atom at a bin center, away from any edge
        p_box = centered_range(point[0], 0.5 * (p_box[1] - p_box[0]), cfg.bins)
        q_box = centered_range(point[1], 0.5 * (q_box[1] - q_box[0]), cfg.bins)
    p_lo, p_hi = cfg.p_range or p_box
    q_lo, q_hi = cfg.q_range or q_box
    return np.linspace(p_lo, p_hi, cfg.bins + 1), np.linspace(q_lo, q_hi, cfg.bins + 1)


def sample_pq(
    alpha, beta, rng: np.random.Generator, count: int, reduced: bool = True
) -> Tuple[np.ndarray, np.ndarray]:
    """``count`` Haar samples of ``(p, q)``."""
    c, phi, psi = sample_euler_angles(rng, count, reduced=reduced)
    return char_poly_pq_batch(alpha, beta, rotations_from_c(c, phi, psi))


def _histogram_chunk(task) -> Tuple[np.ndarray, int]:
    alpha, beta, stream, count, p_edges, q_edges = task
    rng = np.random.default_rng(stream)
    p, q = sample_pq(alpha, beta, rng, count)
    disc = pq_discriminant(p, q)
    scale = 1.0 + 4.0 * np.abs(p) ** 3 + 27.0 * q**2
    violations = int(np.count_nonzero(disc < -DISCRIMINANT_TOL * scale))
    counts, _, _ = np.histogram2d(p, q, bins=[p_edges, q_edges])
    return counts, violations


def mc_histogram(cfg: HornConfig, workers: int = 1) -> HornGrid:
    """
    Monte Carlo estimate of the density of ``(p, q)``.

    Rotations are sampled through ``(c, phi, psi)`` with ``phi, psi``
    uniform on ``[0, pi]`` and ``c`` uniform on ``[-1, 1]``. Bin values are
    ``count / (N * area)`` with binomial standard errors.

    :param cfg: Run parameters.
    :param workers: Process count.
    """
    logger.info("Sampling %d rotations for alpha=%s, beta=%s", cfg.samples, cfg.alpha, cfg.beta)
    p_edges, q_edges = grid_edges(cfg)
    chunks = math.ceil(cfg.samples / CHUNK)
    streams = substreams(cfg.seed, chunks)
    tasks = [
        (cfg.alpha, cfg.beta, streams[k], min(CHUNK, cfg.samples - k * CHUNK), p_edges, q_edges)
        for k in range(chunks)
    ]
    results = run_tasks(_histogram_chunk, tasks, workers)
    counts = sum(r[0] for r in results)
    violations = sum(r[1] for r in results)
    if violations:
        logger.warning("%d samples violate the discriminant condition", violations)

    n = cfg.samples
    area = float((p_edges[1] - p_edges[0]) * (q_edges[1] - q_edges[0]))
    frac = counts / n
    values = frac / area
    stderr = np.sqrt(frac * (1.0 - frac) / n) / area
    logger.info("Histogram complete: %.6f of the mass inside the grid", float(np.sum(frac)))
    return HornGrid(
        p_edges=p_edges,
        q_edges=q_edges,
        values=values,
        stderr=stderr,
        method="monte-carlo",
        metadata={
            "alpha": list(cfg.alpha),
            "beta": list(cfg.beta),
            "samples": n,
            "seed": cfg.seed,
            "discriminant_violations": violations,
        },
    )

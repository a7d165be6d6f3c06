"""
Resultant-localized evaluation of the Horn density.

At fixed ``(phi, psi)`` the conditions ``P(c) = p`` and ``Q(c) = q`` are two
quadratics in ``c``. Integrating ``c`` out of ``delta(P - p) delta(Q - q)``
leaves ``|J| delta(R)`` with ``R`` their resultant, and the ``phi`` integral
then localizes on the zeros of ``R(., psi)``::

    rho(p, q) = 1/(2 pi**2) int_0^pi dpsi  sum_{R(phi*) = 0} |J| / |dR/dphi|

A zero only counts when the common root ``c*`` of the two quadratics is a
valid cosine. Zeros are found by a sign-change scan over ``phi`` followed by
vectorized bisection; the ``psi`` integral is adaptive quadrature.
"""

from __future__ import annotations

import functools
import logging
import math
import warnings
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from delta_identity.errors import DivergentPoint
from delta_identity.horn.charpoly import point_mass, pq_coefficients, pq_discriminant
from delta_identity.horn.histogram import HornGrid, grid_edges
from delta_identity.models import CoeffPoly, HornConfig
from delta_identity.polynomials.multiplier import j_degree2
from delta_identity.polynomials.resultant import resultant_sylvester_batch
from delta_identity.utils.parallel import run_tasks

logger = logging.getLogger(__name__)

#: Bracket width at which bisection stops.
BISECTION_TOL = 1e-12
MAX_BISECTIONS = 60

#: Central-difference step for dR/dphi.
DERIVATIVE_STEP = 1e-6

#: |dR/dphi| below this times max|R| over the scan is a tangential zero.
TANGENCY_TOL = 1e-6

#: Slack on ``|c*| <= 1``.
COSINE_SLACK = 1e-12

PSI_EPSABS = 1e-8
PSI_EPSREL = 1e-6
PSI_LIMIT = 200


@dataclass(frozen=True)
class ResultantZero:
    """
    One zero of ``R(., psi)``.

    :param phi: Location in ``[0, pi)``.
    :param c_star: Common root of the two quadratics, ``None`` if they are
                   proportional in their linear parts.
    :param j_value: ``J`` of the quadratics at ``phi``.
    :param slope: ``dR/dphi`` at ``phi``.
    """

    phi: float
    c_star: Optional[float]
    j_value: float
    slope: float

    @property
    def admissible(self) -> bool:
        return self.c_star is not None and abs(self.c_star) <= 1.0 + COSINE_SLACK

    @property
    def weight(self) -> float:
        return abs(self.j_value) / abs(self.slope)


# ----------------------------------------------------------------------
# Resultant in phi
# ----------------------------------------------------------------------


@functools.lru_cache(maxsize=1024)
def _scan_coefficients(
    alpha: Tuple[float, ...], beta: Tuple[float, ...], scan_points: int, psi: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    # independent of (p, q), so every grid point at the same psi node shares it
    phi = np.linspace(0.0, math.pi, scan_points, endpoint=False)
    pc, qc = pq_coefficients(alpha, beta, phi, psi)
    return phi, pc, qc


def _shifted(pc: np.ndarray, qc: np.ndarray, p: float, q: float) -> Tuple[np.ndarray, np.ndarray]:
    f = np.array(pc, dtype=float)
    g = np.array(qc, dtype=float)
    f[:, 0] -= p
    g[:, 0] -= q
    return f, g


def resultant_in_phi(cfg: HornConfig, phi: np.ndarray, psi: float, p: float, q: float) -> np.ndarray:
    """``R(phi, psi)`` of ``P(c) - p`` and ``Q(c) - q`` as formal quadratics in ``c``."""
    pc, qc = pq_coefficients(cfg.alpha, cfg.beta, np.atleast_1d(phi), psi)
    return resultant_sylvester_batch(*_shifted(pc, qc, p, q))


def _bisect(
    cfg: HornConfig, psi: float, p: float, q: float, lo: np.ndarray, hi: np.ndarray, r_lo: np.ndarray
) -> np.ndarray:
    lo, hi, r_lo = lo.copy(), hi.copy(), r_lo.copy()
    for _ in range(MAX_BISECTIONS):
        if np.all(hi - lo <= BISECTION_TOL):
            break
        mid = 0.5 * (lo + hi)
        r_mid = resultant_in_phi(cfg, mid, psi, p, q)
        same = np.sign(r_mid) == np.sign(r_lo)
        lo = np.where(same, mid, lo)
        r_lo = np.where(same, r_mid, r_lo)
        hi = np.where(same, hi, mid)
    return 0.5 * (lo + hi)


def _common_root(f: np.ndarray, g: np.ndarray) -> Optional[float]:
    # g2 F - f2 G is linear in c
    den = g[2] * f[1] - f[2] * g[1]
    if den == 0.0:
        return None
    return float((f[2] * g[0] - g[2] * f[0]) / den)


def _j_value(f: np.ndarray, g: np.ndarray) -> float:
    f = tuple(float(x) for x in f)
    g = tuple(float(x) for x in g)
    if g[2] != 0.0:
        return float(j_degree2(f, CoeffPoly(g)))
    if f[2] != 0.0:
        # swapping the roles only flips the sign of J for two quadratics
        return float(j_degree2(g, CoeffPoly(f)))
    return 0.0


def resultant_zeros(cfg: HornConfig, psi: float, p: float, q: float) -> List[ResultantZero]:
    """
    Zeros of ``R(., psi)`` on ``[0, pi)``.

    ``R`` is pi-periodic in ``phi``, so the last scan interval wraps to ``pi``.

    :raises DivergentPoint: If an admissible zero is tangential.
    """
    phi, pc, qc = _scan_coefficients(cfg.alpha, cfg.beta, cfg.scan_points, float(psi))
    values = resultant_sylvester_batch(*_shifted(pc, qc, p, q))
    scale = float(np.max(np.abs(values)))
    if scale == 0.0:
        return []

    step = math.pi / len(phi)
    exact = phi[values == 0.0]
    idx = np.nonzero(values * np.roll(values, -1) < 0.0)[0]
    found = exact
    if idx.size:
        found = np.concatenate([exact, _bisect(cfg, psi, p, q, phi[idx], phi[idx] + step, values[idx])])
    if not found.size:
        return []

    h = DERIVATIVE_STEP
    around = resultant_in_phi(cfg, np.concatenate([found + h, found - h]), psi, p, q)
    slopes = (around[: found.size] - around[found.size:]) / (2.0 * h)
    fc, gc = _shifted(*pq_coefficients(cfg.alpha, cfg.beta, found, psi), p, q)

    zeros = []
    for k, at in enumerate(found):
        zero = ResultantZero(
            phi=float(at) % math.pi,
            c_star=_common_root(fc[k], gc[k]),
            j_value=_j_value(fc[k], gc[k]),
            slope=float(slopes[k]),
        )
        if zero.admissible and abs(zero.slope) < TANGENCY_TOL * scale:
            raise DivergentPoint(p, q, float(psi), zero.phi)
        zeros.append(zero)
    return zeros


def psi_integrand(cfg: HornConfig, psi: float, p: float, q: float) -> float:
    """``sum |J| / |dR/dphi|`` over the admissible zeros at ``psi``."""
    return sum(z.weight for z in resultant_zeros(cfg, psi, p, q) if z.admissible)


# ----------------------------------------------------------------------
# Density
# ----------------------------------------------------------------------


def rho_localized(cfg: HornConfig, p: float, q: float) -> float:
    """
    Density of ``(p, q)`` from the resultant-localized formula.

    Outside the real-spectrum region the density is 0. When one orbit is a
    point the law is a point mass and has no density; 0 is returned
    everywhere and :func:`localized_grid` places the mass itself.

    :param cfg: Eigenvalues and scan resolution.
    :param p: Coefficient of ``z``.
    :param q: Constant coefficient.
    :raises DivergentPoint: If a tangential resultant zero is hit.
    """
    if point_mass(cfg.alpha, cfg.beta) is not None:
        logger.debug("Point-mass law; no density at (%g, %g)", p, q)
        return 0.0
    if pq_discriminant(p, q) < 0.0:
        return 0.0

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", integrate.IntegrationWarning)
        value, err = integrate.quad(
            lambda psi: psi_integrand(cfg, psi, p, q),
            0.0,
            math.pi,
            epsabs=PSI_EPSABS,
            epsrel=PSI_EPSREL,
            limit=PSI_LIMIT,
        )
    for w in caught:
        logger.debug("psi quadrature at (%g, %g): %s", p, q, w.message)
    density = value / (2.0 * math.pi**2)
    logger.debug("rho(%g, %g) = %.6g (quad error %.2g)", p, q, density, err)
    return density


def _subpoints(lo: float, hi: float, count: int) -> np.ndarray:
    return lo + (np.arange(count) + 0.5) * (hi - lo) / count


def _bin_task(task) -> Tuple[float, bool]:
    cfg, p_lo, p_hi, q_lo, q_hi = task
    values = []
    flagged = False
    for p in _subpoints(p_lo, p_hi, cfg.subpoints):
        for q in _subpoints(q_lo, q_hi, cfg.subpoints):
            try:
                values.append(rho_localized(cfg, float(p), float(q)))
            except DivergentPoint as exc:
                logger.info("Flagging bin p=[%g, %g], q=[%g, %g]: %s", p_lo, p_hi, q_lo, q_hi, exc)
                flagged = True
    return (float(np.mean(values)) if values else 0.0), flagged


def bin_index(edges: np.ndarray, value: float) -> Optional[int]:
    """Bin holding ``value``, binned the way ``numpy.histogram2d`` bins it."""
    if not edges[0] <= value <= edges[-1]:
        return None
    k = int(np.searchsorted(edges, value, side="right")) - 1
    return min(k, len(edges) - 2)


def _point_mass_values(p_edges: np.ndarray, q_edges: np.ndarray, point: Sequence[float]) -> np.ndarray:
    values = np.zeros((len(p_edges) - 1, len(q_edges) - 1))
    i, j = bin_index(p_edges, point[0]), bin_index(q_edges, point[1])
    if i is not None and j is not None:
        area = (p_edges[1] - p_edges[0]) * (q_edges[1] - q_edges[0])
        values[i, j] = 1.0 / area
    else:
        logger.warning("Point mass at %s lies outside the grid", tuple(point))
    return values


def localized_grid(cfg: HornConfig, workers: int = 1) -> HornGrid:
    """
    Bin averages of :func:`rho_localized` over ``subpoints x subpoints``
    interior points per bin.

    Bins with a tangential zero at any sub-point are flagged and averaged
    over their remaining sub-points.

    :param cfg: Run parameters.
    :param workers: Process count.
    """
    p_edges, q_edges = grid_edges(cfg)
    metadata = {
        "alpha": list(cfg.alpha),
        "beta": list(cfg.beta),
        "scan_points": cfg.scan_points,
        "subpoints": cfg.subpoints,
    }
    flagged = np.zeros((cfg.bins, cfg.bins), dtype=bool)

    point = point_mass(cfg.alpha, cfg.beta)
    if point is not None:
        logger.info("One orbit is a point; all mass sits at (p, q)=(%g, %g)", *point)
        values = _point_mass_values(p_edges, q_edges, point)
        return HornGrid(p_edges, q_edges, values, None, flagged, "localized", metadata)

    tasks = [
        (cfg, p_edges[i], p_edges[i + 1], q_edges[j], q_edges[j + 1])
        for i in range(cfg.bins)
        for j in range(cfg.bins)
    ]
    logger.info("Evaluating the localized density on %d bins", len(tasks))
    results = run_tasks(_bin_task, tasks, workers)
    values = np.array([r[0] for r in results]).reshape(cfg.bins, cfg.bins)
    flagged = np.array([r[1] for r in results]).reshape(cfg.bins, cfg.bins)
    if flagged.any():
        logger.warning("%d bins hold a tangential resultant zero", int(flagged.sum()))
    return HornGrid(p_edges, q_edges, values, None, flagged, "localized", metadata)

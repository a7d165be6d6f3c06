"""
Integrals of test functions against ``delta(f)`` for affine ``f``.

For ``f(y) = g . y + o`` the measure ``delta(f)`` is surface measure on
``{f = 0}`` divided by ``|g|``. :func:`hyperplane_integral` integrates a test
function, optionally times a weight, against it with one of three backends:

- exact closed form (Gaussian test function, constant weight),
- adaptive quadrature (``scipy.integrate.quad`` / ``nquad``) for hyperplanes
  of dimension <= 3,
- Monte Carlo with a proposal matched to the test function otherwise.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from delta_identity.measures.charts import build_chart, build_graph_chart
from delta_identity.measures.test_functions import (
    BoxSupported,
    CompactBump,
    GaussianTest,
    IndicatorBox,
    TestFunction,
    TruncatedGaussian,
)
from delta_identity.models import AffineFunction, IntegrationConfig, IntegrationMethod

logger = logging.getLogger(__name__)

Weight = Callable[[np.ndarray], np.ndarray]

#: Gaussian quadrature windows extend this many widths from the center.
GAUSSIAN_WINDOW_WIDTHS = 12.0

#: Highest hyperplane dimension handled by adaptive quadrature (nquad).
MAX_QUADRATURE_DIM = 3


@dataclass(frozen=True)
class IntegralEstimate:
    """
    A numerical integral with its error estimate.

    :param value: Estimated integral.
    :param error: Absolute error estimate (quadrature) or standard error
                  (Monte Carlo); 0 for closed forms.
    :param method: Backend that produced the value.
    """

    value: float
    error: float
    method: str

    def __add__(self, other: "IntegralEstimate") -> "IntegralEstimate":
        method = self.method if self.method == other.method else "mixed"
        return IntegralEstimate(self.value + other.value, self.error + other.error, method)

    def scaled(self, factor: float) -> "IntegralEstimate":
        return IntegralEstimate(self.value * factor, self.error * abs(factor), self.method)


ZERO = IntegralEstimate(0.0, 0.0, IntegrationMethod.EXACT.value)


def gaussian_hyperplane_mass(f: AffineFunction, phi: GaussianTest) -> float:
    """
    Closed form of ``int phi d delta(f)`` for an isotropic Gaussian density:
    ``exp(-d**2 / (2 s**2)) / (sqrt(2 pi) s |g|)`` with ``d`` the distance from
    the center to the hyperplane.
    """
    norm = f.grad_norm
    d = float(f(phi.center)) / norm
    s = phi.width
    return math.exp(-0.5 * (d / s) ** 2) / (math.sqrt(2.0 * math.pi) * s * norm)


def _integrand(phi: TestFunction, weight: Optional[Weight]) -> Callable[[np.ndarray], np.ndarray]:
    if weight is None:
        return phi

    def evaluate(y: np.ndarray) -> np.ndarray:
        values = phi(y)
        return np.where(values != 0.0, values * weight(y), 0.0)

    return evaluate


def _point_integral(f: AffineFunction, phi: TestFunction, weight: Optional[Weight]) -> IntegralEstimate:
    g = f.gradient[0]
    point = np.array([-f.offset / g])
    value = float(_integrand(phi, weight)(point)) / abs(g)
    return IntegralEstimate(value, 0.0, IntegrationMethod.EXACT.value)


def _quadrature_box(
    f: AffineFunction,
    phi: BoxSupported,
    cfg: IntegrationConfig,
    weight: Optional[Weight],
) -> IntegralEstimate:
    chart = build_graph_chart(f)
    lo, hi = phi.support_box()
    func = _integrand(phi, weight)
    g = f.grad
    m = len(chart.free_axes)
    # innermost variable: the free axis the solved coordinate depends on most
    inner = int(np.argmax([abs(g[a]) for a in chart.free_axes]))
    outer_positions = [p for p in range(m) if p != inner]

    def point_from(args):
        free = [0.0] * m
        free[inner] = args[0]
        for pos, val in zip(outer_positions, args[1:]):
            free[pos] = val
        return chart.embed(np.array(free))

    def integrand(*args):
        return float(func(point_from(args)))

    def inner_range(*outer):
        fixed = [0.0] * m
        for pos, val in zip(outer_positions, outer):
            fixed[pos] = val
        return chart.solve_interval(inner, fixed, lo, hi)

    ranges = [inner_range] + [
        (float(lo[chart.free_axes[p]]), float(hi[chart.free_axes[p]])) for p in outer_positions
    ]
    opts = {"epsabs": cfg.epsabs, "epsrel": cfg.epsrel, "limit": 200}
    value, err = integrate.nquad(integrand, ranges, opts=[opts] * m)
    return IntegralEstimate(value * chart.density, err * chart.density, IntegrationMethod.QUADRATURE.value)


def _quadrature_gaussian(
    f: AffineFunction,
    phi: GaussianTest,
    cfg: IntegrationConfig,
    weight: Optional[Weight],
    start_order=None,
) -> IntegralEstimate:
    chart = build_chart(f, anchor=phi.center, start_order=start_order)
    func = _integrand(phi, weight)
    half = GAUSSIAN_WINDOW_WIDTHS * phi.width

    def integrand(*s):
        return float(func(chart.embed(np.array(s))))

    opts = {"epsabs": cfg.epsabs, "epsrel": cfg.epsrel, "limit": 200}
    ranges = [(-half, half)] * chart.dimension
    value, err = integrate.nquad(integrand, ranges, opts=[opts] * chart.dimension)
    return IntegralEstimate(value * chart.density, err * chart.density, IntegrationMethod.QUADRATURE.value)


#: Spread of the Gaussian proposal for a bump, in half-widths; the bump
#: profile ``(1 - z**2)**2`` has standard deviation ``0.378`` half-widths.
BUMP_PROPOSAL_SCALE = 0.4


def _proposal_scale(phi: TestFunction) -> Optional[float]:
    """Standard deviation of a Gaussian proposal shaped like ``phi``; ``None`` for flat ``phi``."""
    if isinstance(phi, TruncatedGaussian):
        return min(phi.width, phi.half_width)
    if isinstance(phi, GaussianTest):
        return phi.width
    if isinstance(phi, CompactBump):
        return BUMP_PROPOSAL_SCALE * phi.half_width
    return None


def _monte_carlo(
    f: AffineFunction,
    phi: TestFunction,
    cfg: IntegrationConfig,
    weight: Optional[Weight],
    start_order=None,
) -> IntegralEstimate:
    """
    Importance sampling in an orthonormal chart centered on the projection of
    the test function center.

    Gaussian-shaped test functions (plain, truncated, and the bump) get a
    Gaussian proposal of matching spread, which is positive wherever ``phi``
    is. The indicator is flat, so its proposal is uniform on the cube of
    half-side ``half_width * sqrt(n)`` that contains the box's section.
    """
    chart = build_chart(f, anchor=phi.center, start_order=start_order)
    m = chart.dimension
    rng = np.random.default_rng(cfg.seed)
    func = _integrand(phi, weight)
    scale = _proposal_scale(phi)
    if scale is not None:
        s = rng.normal(0.0, scale, size=(cfg.samples, m))
        log_q = -0.5 * np.sum((s / scale) ** 2, axis=1) - m * math.log(math.sqrt(2.0 * math.pi) * scale)
        q = np.exp(log_q)
    else:
        radius = phi.half_width * math.sqrt(phi.dimension)
        s = rng.uniform(-radius, radius, size=(cfg.samples, m))
        q = np.full(cfg.samples, (2.0 * radius) ** (-m))
    ratios = func(chart.embed(s)) / q
    value = float(np.mean(ratios))
    stderr = float(np.std(ratios, ddof=1) / math.sqrt(cfg.samples)) if cfg.samples > 1 else float("inf")
    logger.debug("Monte Carlo proposal for %s: %s", phi.kind, "uniform" if scale is None else f"gaussian({scale:.4g})")
    return IntegralEstimate(value * chart.density, stderr * chart.density, IntegrationMethod.MONTE_CARLO.value)


def hyperplane_integral(
    f: AffineFunction,
    phi: TestFunction,
    cfg: IntegrationConfig,
    weight: Optional[Weight] = None,
    constant_weight: Optional[float] = None,
    start_order=None,
) -> IntegralEstimate:
    """
    ``int phi * weight d delta(f)``.

    :param f: Affine function with nonzero gradient.
    :param phi: Test function on the same R^n.
    :param cfg: Backend selection and tolerances.
    :param weight: Optional pointwise weight on the hyperplane.
    :param constant_weight: If the weight is known to be constant on the
                            hyperplane, its value; enables the closed form.
    :param start_order: Gram-Schmidt seed order for orthonormal charts.
    """
    if phi.dimension != f.dimension:
        raise ValueError(
            f"test function dimension {phi.dimension} does not match R^{f.dimension}"
        )
    if constant_weight is not None:
        weight_fn = None
        factor = constant_weight
    else:
        weight_fn = weight
        factor = 1.0

    if f.dimension == 1:
        return _point_integral(f, phi, weight_fn).scaled(factor)

    if isinstance(phi, BoxSupported) and not _hyperplane_meets_box(f, phi):
        return ZERO

    method = cfg.method
    if method is IntegrationMethod.EXACT and isinstance(phi, GaussianTest) and weight_fn is None:
        return IntegralEstimate(factor * gaussian_hyperplane_mass(f, phi), 0.0, method.value)

    m = f.dimension - 1
    if method is not IntegrationMethod.MONTE_CARLO and m <= MAX_QUADRATURE_DIM:
        if isinstance(phi, BoxSupported):
            estimate = _quadrature_box(f, phi, cfg, weight_fn)
        else:
            estimate = _quadrature_gaussian(f, phi, cfg, weight_fn, start_order)
    else:
        estimate = _monte_carlo(f, phi, cfg, weight_fn, start_order)
    logger.debug(
        "Hyperplane integral (R^%d, %s, %s) = %.12g +/- %.2g",
        f.dimension,
        phi.kind,
        estimate.method,
        estimate.value,
        estimate.error,
    )
    return estimate.scaled(factor)


def _hyperplane_meets_box(f: AffineFunction, phi: BoxSupported) -> bool:
    """Whether ``{f = 0}`` meets the closed support box (interval test on ``f``)."""
    lo, hi = phi.support_box()
    g = f.grad
    f_min = f.offset + float(np.sum(np.minimum(g * lo, g * hi)))
    f_max = f.offset + float(np.sum(np.maximum(g * lo, g * hi)))
    return f_min <= 0.0 <= f_max


def delta_affine_integrate(f: AffineFunction, phi: TestFunction, cfg: IntegrationConfig) -> float:
    """
    ``int phi d delta(f)`` for a single affine function.

    Equals ``1/|grad f|`` times the surface integral of ``phi`` over ``{f = 0}``;
    closed form for Gaussians, quadrature or Monte Carlo otherwise.
    """
    logger.info("Integrating %s test function against delta of an affine function on R^%d", phi.kind, f.dimension)
    return hyperplane_integral(f, phi, cfg).value


def delta_affine_measure_of_box(
    f: AffineFunction,
    center,
    half_width: float,
    cfg: IntegrationConfig,
) -> float:
    """``delta(f)(M)`` for the closed cube ``M`` of the given center and half-width."""
    return hyperplane_integral(f, IndicatorBox(center, half_width), cfg).value

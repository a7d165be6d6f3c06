"""
The two sides of the delta-identity, each evaluated by its own route.

Test functions live on ``R^{A u B}`` with coordinates
``(u_0, ..., u_{|A|-1}, v_0, ..., v_{|B|-1})``. Both sides localize on the
hyperplanes ``Sigma_{alpha,beta} = {u_alpha = v_beta}``:

- :func:`lhs_localized` weights ``Sigma_{alpha,beta}`` by
  ``1 / (|P'(u_alpha)| |Q'(v_beta)|)``;
- :func:`lhs_direct` integrates ``delta(P_x) (x) delta(Q_x)`` over ``x``
  without localizing first;
- :func:`rhs_localized` weights ``Sigma_{alpha,beta}`` by ``|J| / |J_{alpha,beta}|``.

Here ``P'(u_alpha)`` means the derivative of ``P = a prod (x - u)`` at its own
root, so the weights are functions of the integration point.
"""

from __future__ import annotations

import logging
import math
from numbers import Real
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import integrate

from delta_identity.errors import Divergent, OffSupport
from delta_identity.measures.affine import (
    GAUSSIAN_WINDOW_WIDTHS,
    MAX_QUADRATURE_DIM,
    ZERO,
    IntegralEstimate,
    hyperplane_integral,
)
from delta_identity.measures.divergence import divergence_probe
from delta_identity.measures.product import validate_factorization
from delta_identity.measures.test_functions import GaussianTest, TestFunction
from delta_identity.models import (
    ROOT_COINCIDENCE_TOL,
    AffineFunction,
    Family,
    IntegrationConfig,
    IntegrationMethod,
    RootPoly,
    SupportHyperplane,
)
from delta_identity.polynomials.multiplier import j_multiplier, j_multiplier_batch
from delta_identity.polynomials.roots import derivative_at

logger = logging.getLogger(__name__)

#: Outer x-window half-width in Gaussian widths for :func:`lhs_direct`.
X_WINDOW_WIDTHS = 8.0

Weight = Callable[[np.ndarray], np.ndarray]


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------


def _sizes(p: RootPoly, q: RootPoly) -> Tuple[int, int]:
    if p.label is not Family.A or q.label is not Family.B:
        raise ValueError("expected P from family A and Q from family B")
    return p.degree, q.degree


def support_function(size_a: int, size_b: int, h: SupportHyperplane) -> AffineFunction:
    """``u_alpha - v_beta`` as an affine function on ``R^{|A|+|B|}``."""
    h.check(size_a, size_b)
    grad = [0.0] * (size_a + size_b)
    grad[h.alpha] = 1.0
    grad[size_a + h.beta] = -1.0
    return AffineFunction(tuple(grad), 0.0)


def _difference(n: int, i: int, j: int) -> AffineFunction:
    grad = [0.0] * n
    grad[i] = 1.0
    grad[j] = -1.0
    return AffineFunction(tuple(grad), 0.0)


def _same_family_pairs(size_a: int, size_b: int) -> List[Tuple[str, int, int, int, int]]:
    """``(family, i, j, coord_i, coord_j)`` for every same-family root pair."""
    pairs = [("u", i, j, i, j) for i in range(size_a) for j in range(i + 1, size_a)]
    pairs += [
        ("v", i, j, size_a + i, size_a + j)
        for i in range(size_b)
        for j in range(i + 1, size_b)
    ]
    return pairs


def check_admissible(p: RootPoly, q: RootPoly, phi: TestFunction) -> None:
    """
    Refuse test functions against which the localized measure is infinite.

    On ``Sigma_{alpha,beta}`` the weight ``1/|P'(u_alpha)|`` blows up like
    ``1/|u_alpha - u_alpha'|``; that is integrable only if ``phi`` vanishes
    near ``u_alpha = v_beta = u_alpha'`` (likewise for ``v``). The decision is
    delegated to the divergence probe on the pair ``(u_alpha - v_beta,
    u_alpha - u_alpha')``.

    :raises ValueError: If ``phi`` lives in the wrong dimension.
    :raises Divergent: Naming the 0-based same-family root pair.
    """
    size_a, size_b = _sizes(p, q)
    n = size_a + size_b
    if phi.dimension != n:
        raise ValueError(f"test function must live on R^{n}, got R^{phi.dimension}")
    for family, i, j, ci, cj in _same_family_pairs(size_a, size_b):
        singular = _difference(n, ci, cj)
        for alpha in range(size_a):
            for beta in range(size_b):
                if family == "u" and alpha not in (i, j):
                    continue
                if family == "v" and beta not in (i, j):
                    continue
                h = SupportHyperplane(alpha, beta)
                fac = validate_factorization([support_function(size_a, size_b, h), singular])
                report = divergence_probe(fac, phi)
                if report.divergent:
                    raise Divergent(
                        (i, j),
                        f"{phi.kind} test function is positive where {family}{i} = {family}{j} "
                        f"meets u{alpha} = v{beta}",
                    )


def check_separation(p: RootPoly, q: RootPoly, separation: float) -> None:
    """
    Refuse configurations with two roots of one family closer than
    ``separation``.

    :raises Divergent: Naming the 0-based root pair.
    """
    for family, roots in (("u", p.roots), ("v", q.roots)):
        for i in range(len(roots)):
            for j in range(i + 1, len(roots)):
                gap = abs(float(roots[i]) - float(roots[j]))
                if gap < separation:
                    raise Divergent(
                        (i, j),
                        f"{family}-roots {i} and {j} are {gap:.3g} apart, below the "
                        f"admissible separation {separation:g}",
                    )


# ---------------------------------------------------------------------------
# Pointwise weights
# ---------------------------------------------------------------------------


def _split(y: np.ndarray, size_a: int) -> Tuple[np.ndarray, np.ndarray, Tuple[int, ...]]:
    y = np.asarray(y, dtype=float)
    lead = y.shape[:-1]
    flat = y.reshape(-1, y.shape[-1])
    return flat[:, :size_a], flat[:, size_a:], lead


def _own_derivative(roots: np.ndarray, k: int, leading: float) -> np.ndarray:
    """``F'(root_k)`` for ``F = leading * prod (x - root)``, row-wise."""
    out = np.full(roots.shape[0], float(leading))
    for i in range(roots.shape[1]):
        if i != k:
            out = out * (roots[:, k] - roots[:, i])
    return out


def lhs_weight(p: RootPoly, q: RootPoly, h: SupportHyperplane) -> Weight:
    """``y -> 1 / (|P'(u_alpha)| |Q'(v_beta)|)`` with ``P, Q`` rooted at ``y``."""
    size_a = p.degree

    def weight(y: np.ndarray) -> np.ndarray:
        u, v, lead = _split(y, size_a)
        with np.errstate(divide="ignore"):
            out = 1.0 / np.abs(
                _own_derivative(u, h.alpha, p.leading) * _own_derivative(v, h.beta, q.leading)
            )
        return out.reshape(lead)

    return weight


def j_ab_batch(u: np.ndarray, v: np.ndarray, h: SupportHyperplane, a: float, b: float) -> np.ndarray:
    """:func:`j_ab` over stacks ``(N, |A|)``, ``(N, |B|)``."""
    diff = u[:, :, None] - v[:, None, :]
    mask = np.ones(diff.shape[1:], dtype=bool)
    mask[h.alpha, h.beta] = False
    size_a, size_b = u.shape[1], v.shape[1]
    return a**size_b * b**size_a * np.prod(diff[:, mask], axis=1)


def rhs_weight(p: RootPoly, q: RootPoly, h: SupportHyperplane) -> Weight:
    """``y -> |J(u, v)| / |J_{alpha,beta}(u, v)|``."""
    size_a = p.degree
    a, b = float(p.leading), float(q.leading)

    def weight(y: np.ndarray) -> np.ndarray:
        u, v, lead = _split(y, size_a)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.abs(j_multiplier_batch(u, v, a, b)) / np.abs(j_ab_batch(u, v, h, a, b))
        return out.reshape(lead)

    return weight


# ---------------------------------------------------------------------------
# Sides
# ---------------------------------------------------------------------------


def _localized(
    p: RootPoly,
    q: RootPoly,
    phi: TestFunction,
    cfg: IntegrationConfig,
    weight_for: Callable[[SupportHyperplane], Weight],
    constant_for: Callable[[SupportHyperplane], float],
    side: str,
) -> IntegralEstimate:
    check_admissible(p, q, phi)
    size_a, size_b = p.degree, q.degree
    total = ZERO
    for alpha in range(size_a):
        for beta in range(size_b):
            h = SupportHyperplane(alpha, beta)
            f = support_function(size_a, size_b, h)
            if size_a == 1 and size_b == 1:
                term = hyperplane_integral(f, phi, cfg, constant_weight=constant_for(h))
            else:
                term = hyperplane_integral(f, phi, cfg, weight=weight_for(h))
            logger.debug("%s term (%d, %d) = %.12g +/- %.2g", side, alpha, beta, term.value, term.error)
            total = total + term
    logger.info("%s = %.12g +/- %.2g (%s)", side, total.value, total.error, total.method)
    return total


def lhs_localized(p: RootPoly, q: RootPoly, phi: TestFunction, cfg: IntegrationConfig) -> IntegralEstimate:
    """
    ``sum_{alpha,beta} int phi / (|P'(u_alpha)| |Q'(v_beta)|) d delta(u_alpha - v_beta)``.

    :param p: Supplies ``|A|`` and ``a``.
    :param q: Supplies ``|B|`` and ``b``.
    :param phi: Test function on ``R^{|A|+|B|}``.
    :raises Divergent: If ``phi`` is not admissible.
    """
    constant = 1.0 / abs(float(p.leading) * float(q.leading))
    return _localized(
        p, q, phi, cfg, lambda h: lhs_weight(p, q, h), lambda h: constant, "lhs_localized"
    )


def rhs_localized(p: RootPoly, q: RootPoly, phi: TestFunction, cfg: IntegrationConfig) -> IntegralEstimate:
    """
    ``sum_{alpha,beta} int phi |J| / |J_{alpha,beta}| d delta(u_alpha - v_beta)``,
    i.e. ``|J| delta(R)`` against ``phi``.

    :raises Divergent: If ``phi`` is not admissible.
    """

    def constant_for(h: SupportHyperplane) -> float:
        # |A| = |B| = 1: J = 1 and J_{0,0} = ab whatever the roots
        return abs(float(j_multiplier(p, q))) / abs(float(j_ab(p.roots, q.roots, h, p.leading, q.leading)))

    return _localized(p, q, phi, cfg, lambda h: rhs_weight(p, q, h), constant_for, "rhs_localized")


def _direct_bounds(
    phi: TestFunction,
    p: RootPoly,
    q: RootPoly,
    coord_a: int,
    coord_b: int,
    free: Sequence[int],
) -> Tuple[Tuple[float, float], List[Tuple[float, float]]]:
    box = phi.support_box()
    if box is not None:
        lo, hi = box
        x_range = (max(lo[coord_a], lo[coord_b]), min(hi[coord_a], hi[coord_b]))
        return x_range, [(float(lo[k]), float(hi[k])) for k in free]
    width = phi.width if isinstance(phi, GaussianTest) else 1.0
    anchors = [float(r) for r in p.roots] + [float(r) for r in q.roots] + list(phi.center)
    x_range = (min(anchors) - X_WINDOW_WIDTHS * width, max(anchors) + X_WINDOW_WIDTHS * width)
    half = GAUSSIAN_WINDOW_WIDTHS * width
    return x_range, [(phi.center[k] - half, phi.center[k] + half) for k in free]


def lhs_direct(p: RootPoly, q: RootPoly, phi: TestFunction, cfg: IntegrationConfig) -> IntegralEstimate:
    """
    ``int dx [delta(P_x) (x) delta(Q_x)](phi)`` by an outer integral over ``x``.

    For fixed ``x`` the product measure puts mass on ``{u_alpha = x, v_beta = x}``
    with weight ``1 / (|a| prod_{alpha' != alpha} |x - u_alpha'| |b| prod_{beta' != beta} |x - v_beta'|)``.
    The ``x`` window covers all roots and the test function center plus
    eight Gaussian widths, or the part of the support box where both
    coordinates can equal ``x``.

    :raises Divergent: If ``phi`` is not admissible.
    """
    check_admissible(p, q, phi)
    size_a, size_b = p.degree, q.degree
    n = size_a + size_b
    a, b = abs(float(p.leading)), abs(float(q.leading))
    opts = {"epsabs": cfg.epsabs, "epsrel": cfg.epsrel, "limit": 200}
    total = ZERO

    for alpha in range(size_a):
        for beta in range(size_b):
            ca, cb = alpha, size_a + beta
            free = [k for k in range(n) if k not in (ca, cb)]
            others_a = [k for k in range(size_a) if k != alpha]
            others_b = [size_a + k for k in range(size_b) if k != beta]
            x_range, free_ranges = _direct_bounds(phi, p, q, ca, cb, free)
            if x_range[1] <= x_range[0]:
                continue

            def point(x, rest, free=free, ca=ca, cb=cb):
                y = np.empty(np.shape(x) + (n,))
                y[..., ca] = x
                y[..., cb] = x
                for pos, k in enumerate(free):
                    y[..., k] = rest[..., pos] if np.ndim(rest) > 1 else rest[pos]
                return y

            def density(y, x, others_a=others_a, others_b=others_b):
                w = a * b
                for k in others_a + others_b:
                    w = w * np.abs(x - y[..., k])
                with np.errstate(divide="ignore"):
                    return phi(y) / w

            dims = len(free) + 1
            if dims <= MAX_QUADRATURE_DIM and cfg.method is not IntegrationMethod.MONTE_CARLO:

                def integrand(*args, point=point, density=density):
                    x = args[-1]
                    y = point(x, np.asarray(args[:-1], dtype=float))
                    return float(density(y, x))

                value, err = integrate.nquad(integrand, free_ranges + [x_range], opts=[opts] * dims)
                term = IntegralEstimate(value, err, IntegrationMethod.QUADRATURE.value)
            else:
                term = _direct_monte_carlo(point, density, free_ranges, x_range, cfg)
            logger.debug("lhs_direct term (%d, %d) = %.12g +/- %.2g", alpha, beta, term.value, term.error)
            total = total + term

    logger.info("lhs_direct = %.12g +/- %.2g (%s)", total.value, total.error, total.method)
    return total


def _direct_monte_carlo(point, density, free_ranges, x_range, cfg: IntegrationConfig) -> IntegralEstimate:
    rng = np.random.default_rng(cfg.seed)
    lows = np.array([r[0] for r in free_ranges] + [x_range[0]])
    highs = np.array([r[1] for r in free_ranges] + [x_range[1]])
    volume = float(np.prod(highs - lows))
    s = rng.uniform(lows, highs, size=(cfg.samples, lows.size))
    x = s[:, -1]
    values = density(point(x, s[:, :-1]), x) * volume
    value = float(np.mean(values))
    stderr = float(np.std(values, ddof=1) / math.sqrt(cfg.samples)) if cfg.samples > 1 else float("inf")
    return IntegralEstimate(value, stderr, IntegrationMethod.MONTE_CARLO.value)


# ---------------------------------------------------------------------------
# Pointwise algebra on Sigma_{alpha,beta}
# ---------------------------------------------------------------------------


def j_ab(u: Sequence[Real], v: Sequence[Real], h: SupportHyperplane, a: Real, b: Real) -> Real:
    """
    ``J_{alpha,beta} = a**|B| b**|A| prod_{(alpha',beta') != (alpha,beta)} (u_alpha' - v_beta')``.

    ``u = (1,), v = (1, 2), h = (0, 0)`` gives ``1 - 2 = -1``.
    """
    h.check(len(u), len(v))
    acc = a ** len(v) * b ** len(u)
    for i, ui in enumerate(u):
        for j, vj in enumerate(v):
            if (i, j) != (h.alpha, h.beta):
                acc = acc * (ui - vj)
    return acc


def j_ab_on_support(u: Sequence[Real], v: Sequence[Real], h: SupportHyperplane, a: Real, b: Real) -> Real:
    """
    ``J_{alpha,beta}`` on ``u_alpha = v_beta`` in factored form:
    ``a**(|B|-1) b**(|A|-1) (-1)**(|A|-1) P'(v_beta) Q'(u_alpha) prod_{alpha'' != alpha, beta'' != beta} (u_alpha'' - v_beta'')``.
    """
    h.check(len(u), len(v))
    p = RootPoly(a, tuple(u), Family.A)
    q = RootPoly(b, tuple(v), Family.B)
    sign = -1 if (len(u) - 1) % 2 else 1
    rest = 1
    for i, ui in enumerate(u):
        for j, vj in enumerate(v):
            if i != h.alpha and j != h.beta:
                rest = rest * (ui - vj)
    return (
        a ** (len(v) - 1)
        * b ** (len(u) - 1)
        * sign
        * derivative_at(p, v[h.beta])
        * derivative_at(q, u[h.alpha])
        * rest
    )


def _on_support(u: Sequence[Real], v: Sequence[Real], h: SupportHyperplane) -> bool:
    ua, vb = u[h.alpha], v[h.beta]
    if ua == vb:
        return True
    scale = 1.0 + max(abs(float(ua)), abs(float(vb)))
    return abs(float(ua) - float(vb)) <= ROOT_COINCIDENCE_TOL * scale


def pointwise_ratio_check(
    u: Sequence[Real],
    v: Sequence[Real],
    h: SupportHyperplane,
    a: Real,
    b: Real,
) -> Tuple[Real, Real]:
    """
    Both weights of ``Sigma_{alpha,beta}`` at a point on it.

    :return: ``(lhs_weight, rhs_weight)`` with
             ``lhs_weight = 1 / (|P'(v_beta)| |Q'(u_alpha)|)`` and
             ``rhs_weight = |J| / |J_{alpha,beta}|``; equal on the support.
    :raises OffSupport: If ``u_alpha != v_beta``.
    """
    h.check(len(u), len(v))
    if not _on_support(u, v, h):
        raise OffSupport(
            f"u{h.alpha}={u[h.alpha]!r} and v{h.beta}={v[h.beta]!r} differ; "
            f"the point is not on the support hyperplane"
        )
    p = RootPoly(a, tuple(u), Family.A)
    q = RootPoly(b, tuple(v), Family.B)
    lhs = 1 / abs(derivative_at(p, v[h.beta]) * derivative_at(q, u[h.alpha]))
    rhs = abs(j_multiplier(p, q)) / abs(j_ab(u, v, h, a, b))
    logger.debug("Pointwise weights at %s: lhs=%r rhs=%r", h, lhs, rhs)
    return lhs, rhs


def support_point(u: Sequence[Real], v: Sequence[Real], h: SupportHyperplane) -> Tuple[List[Real], List[Real]]:
    """Move ``v_beta`` onto ``u_alpha``: the nearest point of ``Sigma_{alpha,beta}`` along ``v_beta``."""
    v = list(v)
    v[h.beta] = u[h.alpha]
    return list(u), v

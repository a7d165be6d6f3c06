"""
Delta measures of products of pairwise non-proportional affine functions.

For ``f = f_1 ... f_k``,

    delta(f) = sum_j delta(f_j) / prod_{i != j} |f_i|,

each term living on one hyperplane. Factors parallel to ``f_j`` are constant
on ``{f_j = 0}`` and fold into a constant weight; the others give a
pointwise weight that is singular where their loci cross ``{f_j = 0}``.
Whether that singularity is integrable against the test function is decided
by :func:`delta_identity.measures.divergence.divergence_probe` before any
quadrature runs.
"""

from __future__ import annotations

import logging
from typing import Callable, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from delta_identity.errors import Divergent, ProportionalFactors
from delta_identity.measures.affine import ZERO, IntegralEstimate, hyperplane_integral
from delta_identity.measures.divergence import divergence_probe, loci_intersect, trend_check
from delta_identity.measures.test_functions import TestFunction
from delta_identity.models import (
    AffineFactorization,
    AffineFunction,
    IntegrationConfig,
    RootPoly,
)
from delta_identity.polynomials.roots import check_distinct, derivative_at_root
from delta_identity.utils.parallel import run_tasks

logger = logging.getLogger(__name__)

#: Relative tolerance of the 2x2-minor proportionality test.
PROPORTIONALITY_TOL = 1e-12


# ---------------------------------------------------------------------------
# Factorizations
# ---------------------------------------------------------------------------


def _augmented(f: AffineFunction) -> np.ndarray:
    return np.append(f.grad, f.offset)


def validate_factorization(factors: Sequence[AffineFunction]) -> AffineFactorization:
    """
    Check that ``factors`` is a valid factorization of a member of H(R^n).

    :param factors: Nonempty list of affine functions of one dimension.
    :return: The validated :class:`AffineFactorization`.
    :raises ValueError: On an empty list or mixed dimensions.
    :raises ProportionalFactors: With the 1-based indices of the first pair
                                 whose augmented vectors are proportional.
    """
    factors = tuple(factors)
    if not factors:
        raise ValueError("a factorization needs at least one factor")
    dims = {f.dimension for f in factors}
    if len(dims) != 1:
        raise ValueError(f"factors live in different dimensions: {sorted(dims)}")

    augmented = [_augmented(f) for f in factors]
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            ai, aj = augmented[i], augmented[j]
            # all 2x2 minors vanish iff the vectors are proportional
            minors = np.outer(ai, aj) - np.outer(aj, ai)
            scale = float(np.linalg.norm(ai) * np.linalg.norm(aj))
            if float(np.max(np.abs(minors))) <= PROPORTIONALITY_TOL * scale:
                raise ProportionalFactors(i + 1, j + 1)
    logger.debug("Validated factorization of %d factors on R^%d", len(factors), factors[0].dimension)
    return AffineFactorization(factors)


def root_factorization(p: RootPoly, x: float) -> AffineFactorization:
    """
    Factorization of ``u -> P_x(u) = leading * prod_alpha (x - u_alpha)`` on
    ``R^|A|``; the leading coefficient scales the first factor.
    """
    n = p.degree
    factors = []
    for alpha in range(n):
        grad = [0.0] * n
        grad[alpha] = -1.0
        f = AffineFunction(tuple(grad), float(x))
        factors.append(f.scaled(float(p.leading)) if alpha == 0 else f)
    return validate_factorization(factors)


# ---------------------------------------------------------------------------
# One hyperplane term
# ---------------------------------------------------------------------------


def _point_on(f: AffineFunction) -> np.ndarray:
    g = f.grad
    return -f.offset * g / float(g @ g)


def _term(
    fj: AffineFunction,
    others: Iterable[AffineFunction],
    phi: TestFunction,
    cfg: IntegrationConfig,
    exclusions: Sequence[Tuple[AffineFunction, float]] = (),
) -> IntegralEstimate:
    """
    ``int phi / prod |others| d delta(f_j)``, optionally with ``|f_i| < eta``
    cut out for each ``(f_i, eta)`` in ``exclusions``.
    """
    anchor = _point_on(fj)
    constant = 1.0
    varying: List[AffineFunction] = []
    for fi in others:
        if loci_intersect(fi, fj):
            varying.append(fi)
        else:
            constant /= abs(float(fi(anchor)))

    if not varying and not exclusions:
        return hyperplane_integral(fj, phi, cfg, constant_weight=constant)

    def weight(y: np.ndarray) -> np.ndarray:
        out = np.ones(np.asarray(y).shape[:-1])
        with np.errstate(divide="ignore"):
            for fi in varying:
                out = out / np.abs(fi(y))
        for fi, eta in exclusions:
            out = np.where(np.abs(fi(y)) < eta, 0.0, out)
        return out

    return hyperplane_integral(fj, phi, cfg, weight=weight).scaled(constant)


def _term_task(task) -> IntegralEstimate:
    return _term(*task)


def _product_sum(
    factors: Sequence[AffineFunction],
    phi: TestFunction,
    cfg: IntegrationConfig,
    contact: Set[Tuple[int, int]] = frozenset(),
    eta: Optional[float] = None,
    workers: int = 1,
) -> IntegralEstimate:
    tasks = []
    for j, fj in enumerate(factors):
        others = [fi for i, fi in enumerate(factors) if i != j]
        exclusions = []
        if eta is not None:
            exclusions = [
                (fi, eta)
                for i, fi in enumerate(factors)
                if i != j and (min(i, j) + 1, max(i, j) + 1) in contact
            ]
        tasks.append((fj, others, phi, cfg, exclusions))
    total = ZERO
    for term in run_tasks(_term_task, tasks, workers):
        total = total + term
    return total


def _raise_if_divergent(fac: AffineFactorization, phi: TestFunction, cfg: IntegrationConfig) -> None:
    report = divergence_probe(fac, phi)
    if report.divergent:
        finding = next(f for f in report.findings if f.pair == report.divergent_pairs[0])
        raise Divergent(finding.pair, finding.message)
    contact = set(report.contact_pairs)
    if not contact:
        return

    def excluded(eta: float) -> float:
        return _product_sum(fac.factors, phi, cfg, contact, eta).value

    divergent, values = trend_check(excluded, cfg.eta)
    if divergent:
        pair = min(contact)
        raise Divergent(pair, f"exclusion-window integrals keep growing: {values}")


# ---------------------------------------------------------------------------
# Public integrals
# ---------------------------------------------------------------------------


def delta_product_integrate(
    fac: AffineFactorization,
    phi: TestFunction,
    cfg: IntegrationConfig,
    workers: int = 1,
) -> IntegralEstimate:
    """
    ``int phi d delta(f_1 ... f_k)``.

    :param fac: Validated factorization.
    :param phi: Test function on R^n.
    :param cfg: Integration settings.
    :param workers: Process count for the hyperplane terms.
    :return: Value and error estimate summed over the ``k`` hyperplane terms.
    :raises Divergent: If the crossing of two factor loci is not integrable
                       against ``phi``.
    """
    logger.info("Integrating %s test function against delta of %d affine factors", phi.kind, len(fac))
    _raise_if_divergent(fac, phi, cfg)
    estimate = _product_sum(fac.factors, phi, cfg, workers=workers)
    logger.info("Product integral = %.12g +/- %.2g (%s)", estimate.value, estimate.error, estimate.method)
    return estimate


def delta_Px_integrate(
    p: RootPoly,
    x: float,
    phi: TestFunction,
    cfg: IntegrationConfig,
) -> IntegralEstimate:
    """
    ``int phi d delta(P_x)`` with ``P_x(u) = leading * prod (x - u_alpha)`` as
    a function of the roots ``u`` in ``R^|A|``.

    Each term sets ``u_alpha = x`` and weights the remaining
    ``(|A|-1)``-dimensional integral by ``1 / (|a| prod_{alpha' != alpha} |x - u_alpha'|)``.

    :param p: Supplies ``|A|`` (its degree) and ``a`` (its leading coefficient);
              its root values are not used.
    :raises Divergent: When two of the hyperplanes ``u_alpha = x`` cross inside
                       the region where ``phi`` is positive.
    """
    if phi.dimension != p.degree:
        raise ValueError(f"test function must live on R^{p.degree}, got R^{phi.dimension}")
    return delta_product_integrate(root_factorization(p, x), phi, cfg)


def delta_1d_integrate(p: RootPoly, phi: Union[TestFunction, Callable[[float], float]]) -> float:
    """
    ``sum_k phi(root_k) / |P'(root_k)|``: the one-dimensional delta measure
    is a finite sum of weighted point masses.

    :param phi: A 1-D test function or any Borel function of one real variable.
    :raises RepeatedRoot: If two roots coincide.
    """
    check_distinct(p.roots)
    total = 0.0
    for k, root in enumerate(p.roots):
        if isinstance(phi, TestFunction):
            value = float(phi(np.array([float(root)])))
        else:
            value = float(phi(root))
        total += value / abs(float(derivative_at_root(p, k)))
    return total


def product_rule_check(
    f: AffineFactorization,
    g: AffineFactorization,
    phi: TestFunction,
    cfg: IntegrationConfig,
) -> Tuple[IntegralEstimate, IntegralEstimate]:
    """
    Both sides of ``delta(fg) = delta(g)/|f| + delta(f)/|g|`` against ``phi``.

    The left side runs :func:`delta_product_integrate` on the concatenated
    factorization. The right side integrates each factor of ``g`` with the
    weight ``1 / (|f(y)| prod_{i != j} |g_i(y)|)``, evaluating ``f`` as a whole
    product rather than factor by factor, and symmetrically for ``f``.

    :raises Divergent: Propagated from the concatenated factorization.
    """
    combined = validate_factorization(tuple(f.factors) + tuple(g.factors))
    lhs = delta_product_integrate(combined, phi, cfg)

    def side(own: AffineFactorization, other: AffineFactorization) -> IntegralEstimate:
        total = ZERO
        for j, fj in enumerate(own.factors):
            rest = [fi for i, fi in enumerate(own.factors) if i != j]

            def weight(y: np.ndarray, rest=rest) -> np.ndarray:
                with np.errstate(divide="ignore"):
                    out = 1.0 / np.abs(other.product(y))
                    for fi in rest:
                        out = out / np.abs(fi(y))
                return out

            total = total + hyperplane_integral(fj, phi, cfg, weight=weight)
        return total

    rhs = side(g, f) + side(f, g)
    logger.info("Product rule: lhs=%.12g rhs=%.12g", lhs.value, rhs.value)
    return lhs, rhs

"""
Divergence diagnostics for delta measures of products of affine functions.

For ``f = f_1 ... f_k`` the measure ``delta(f)`` carries the weight
``1 / prod_{i != j} |f_i|`` on ``{f_j = 0}``. When two zero loci cross, that
weight has a non-integrable ``1/|distance|`` singularity along the
codimension-2 set ``{f_i = f_j = 0}``, and the integral of any test function
that stays positive near it is infinite.

The probe mirrors a rule runner: each :class:`PairRule` inspects one pair of
factors against the test function and may emit a :class:`PairFinding`.
Geometry decides first; :func:`trend_check` provides the numeric fallback
for borderline (boundary-contact) cases.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from delta_identity.measures.test_functions import BoxSupported, TestFunction
from delta_identity.models import AffineFactorization, AffineFunction

logger = logging.getLogger(__name__)

DIVERGENT = "DIVERGENT"
CONTACT = "CONTACT"

#: Relative tolerance for parallel gradients and for LP contact decisions.
GEOMETRY_TOL = 1e-10


@dataclass
class PairFinding:
    """
    Outcome of one rule on one pair of factors.

    :param pair: 1-based factor indices ``(i, j)``, ``i < j``.
    :param severity: ``DIVERGENT`` or ``CONTACT`` (locus touches the support
                     boundary only; decided numerically).
    :param rule: Name of the emitting rule.
    :param message: Human-readable explanation.
    """

    pair: Tuple[int, int]
    severity: str
    rule: str
    message: str


@dataclass
class DivergenceReport:
    """All findings of a probe run."""

    findings: List[PairFinding] = field(default_factory=list)

    @property
    def divergent_pairs(self) -> List[Tuple[int, int]]:
        return [f.pair for f in self.findings if f.severity == DIVERGENT]

    @property
    def contact_pairs(self) -> List[Tuple[int, int]]:
        return [f.pair for f in self.findings if f.severity == CONTACT]

    @property
    def divergent(self) -> bool:
        return bool(self.divergent_pairs)


class PairRule(Protocol):
    """
    Protocol for divergence rules.

    ``evaluate`` is only called for pairs whose zero loci intersect.
    """

    name: str

    def evaluate(
        self,
        fi: AffineFunction,
        fj: AffineFunction,
        pair: Tuple[int, int],
        phi: TestFunction,
    ) -> Optional[PairFinding]:
        ...


def loci_intersect(fi: AffineFunction, fj: AffineFunction) -> bool:
    """
    Whether ``{f_i = 0}`` and ``{f_j = 0}`` meet in a codimension-2 set.

    Non-parallel gradients always give a nonempty intersection; parallel
    gradients of non-proportional factors give disjoint hyperplanes.
    """
    gi, gj = fi.grad, fj.grad
    cross = np.outer(gi, gj) - np.outer(gj, gi)
    scale = float(np.linalg.norm(gi) * np.linalg.norm(gj))
    return float(np.max(np.abs(cross))) > GEOMETRY_TOL * scale


class NowhereZeroRule:
    """A test function positive everywhere diverges on every crossing."""

    name = "nowhere_zero"

    def evaluate(self, fi, fj, pair, phi) -> Optional[PairFinding]:
        if not phi.nowhere_zero:
            return None
        return PairFinding(
            pair=pair,
            severity=DIVERGENT,
            rule=self.name,
            message=f"{phi.kind} test function is positive on the crossing of factors {pair}",
        )


class SupportOverlapRule:
    """
    For box-supported test functions, solve
    ``max t  s.t.  f_i(y) = f_j(y) = 0,  lo + t <= y <= hi - t``.

    ``t > 0`` means the crossing enters the open box (divergent), ``t ~ 0``
    means it only touches the boundary.
    """

    name = "support_overlap"

    def evaluate(self, fi, fj, pair, phi) -> Optional[PairFinding]:
        if not isinstance(phi, BoxSupported):
            return None
        depth = crossing_depth(fi, fj, phi)
        tol = GEOMETRY_TOL * max(1.0, phi.half_width)
        logger.debug("Crossing depth for pair %s: %.6g", pair, depth)
        if depth > tol:
            return PairFinding(pair, DIVERGENT, self.name, f"crossing of factors {pair} enters the support")
        if depth >= -tol:
            return PairFinding(pair, CONTACT, self.name, f"crossing of factors {pair} touches the support boundary")
        return None


def crossing_depth(fi: AffineFunction, fj: AffineFunction, phi: BoxSupported) -> float:
    """
    Largest ``t`` such that a point of ``{f_i = f_j = 0}`` lies ``t`` inside
    every face of the support box (negative when the crossing misses it).
    """
    lo, hi = phi.support_box()
    n = fi.dimension
    c = np.zeros(n + 1)
    c[-1] = -1.0
    a_eq = np.zeros((2, n + 1))
    a_eq[0, :n] = fi.grad
    a_eq[1, :n] = fj.grad
    b_eq = np.array([-fi.offset, -fj.offset])
    eye = np.eye(n)
    a_ub = np.vstack([
        np.hstack([eye, np.ones((n, 1))]),
        np.hstack([-eye, np.ones((n, 1))]),
    ])
    b_ub = np.concatenate([hi, -lo])
    bounds = [(None, None)] * n + [(None, phi.half_width)]
    res = linprog(c, A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        logger.debug("Crossing LP status %d: %s", res.status, res.message)
        return -np.inf
    return float(-res.fun)


DEFAULT_RULES: Sequence[PairRule] = (NowhereZeroRule(), SupportOverlapRule())


def divergence_probe(
    fac: AffineFactorization,
    phi: TestFunction,
    rules: Sequence[PairRule] | None = None,
) -> DivergenceReport:
    """
    Decide, pair by pair, whether the crossing of two factor loci forces
    ``int phi d delta(f)`` to diverge.

    :param fac: Validated factorization.
    :param phi: Test function.
    :param rules: Optional rule sequence; defaults to geometric rules.
    :return: A :class:`DivergenceReport` listing divergent and contact pairs.
    """
    rules = DEFAULT_RULES if rules is None else rules
    report = DivergenceReport()
    factors = fac.factors
    for i in range(len(factors)):
        for j in range(i + 1, len(factors)):
            if not loci_intersect(factors[i], factors[j]):
                continue
            pair = (i + 1, j + 1)
            for rule in rules:
                finding = rule.evaluate(factors[i], factors[j], pair, phi)
                if finding is not None:
                    findings_log = logger.warning if finding.severity == DIVERGENT else logger.info
                    findings_log("Pair %s: %s", pair, finding.message)
                    report.findings.append(finding)
                    break
    return report


def trend_check(
    excluded_integral: Callable[[float], float],
    eta: float,
    rel_tol: float = 1e-8,
) -> Tuple[bool, List[float]]:
    """
    Numeric divergence test by shrinking an exclusion window.

    Evaluates the integral with ``|f_i| < eta`` cut out for ``eta, eta/2,
    eta/4``. An integrable singularity makes the increments shrink
    geometrically; a logarithmic one keeps them constant.

    :param excluded_integral: Integral as a function of the window radius.
    :param eta: Initial window radius.
    :param rel_tol: Increments below this (relative) are treated as converged.
    :return: ``(divergent, values)``.
    """
    values = [excluded_integral(eta / 2**k) for k in range(3)]
    d1 = values[1] - values[0]
    d2 = values[2] - values[1]
    scale = max(1.0, abs(values[-1]))
    if abs(d2) <= rel_tol * scale:
        return False, values
    divergent = d1 > 0 and d2 > 0.75 * d1
    logger.debug("Trend check values %s -> divergent=%s", values, divergent)
    return divergent, values

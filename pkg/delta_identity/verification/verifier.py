"""
Identity verification engine.

Evaluates ``int dx delta(P_x) (x) delta(Q_x)`` and ``|J| delta(R)`` against
one test function by independent routes and assesses their agreement.

The assessment mirrors a unit-test runner: each check may emit a
:class:`Finding`, and the report's severity is FAIL as soon as one finding
fails, PASS otherwise.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional, Sequence

from delta_identity.errors import DeltaIdentityError, Divergent
from delta_identity.measures.affine import IntegralEstimate
from delta_identity.measures.test_functions import TestFunction
from delta_identity.models import RootPoly, SupportHyperplane, VerificationConfig
from delta_identity.polynomials.multiplier import j_multiplier, j_product_form, j_tilde, sign_relation
from delta_identity.verification.mollifier import MollifierSequence, mollifier_sequence
from delta_identity.verification.sides import (
    check_admissible,
    check_separation,
    lhs_direct,
    lhs_localized,
    pointwise_ratio_check,
    rhs_localized,
    support_point,
)

logger = logging.getLogger(__name__)

METHODS = ("lhs_localized", "lhs_direct", "rhs_localized")


@dataclass
class Finding:
    """
    A single check outcome.

    :param rule: Name of the check.
    :param severity: PASS or FAIL.
    :param message: Human-readable explanation.
    """

    rule: str
    severity: str  # PASS | FAIL
    message: str


@dataclass
class IdentityReport:
    """
    Outcome of one verification run.

    :param label: Name of the configuration.
    :param size_a: ``|A|``.
    :param size_b: ``|B|``.
    :param test_function: Description of the test function.
    :param values: Value per method; ``None`` when the run diverged.
    :param errors: Error estimate per method.
    :param mollified: Oracle estimates per width, as dictionaries.
    :param extrapolated: Richardson limit of the oracle, if run.
    :param pointwise_max_rel: Largest relative gap of the pointwise ratio
                              check over the configuration's support points.
    :param j_forms_max_rel: Largest relative gap between the forms of ``J``.
    :param divergence: Divergence message, if any.
    :param tolerance: Relative tolerance between quadrature methods.
    :param severity: PASS or FAIL.
    :param findings: All findings.
    """

    label: str
    size_a: int
    size_b: int
    test_function: Dict[str, Any]
    values: Dict[str, Optional[float]] = field(default_factory=dict)
    errors: Dict[str, float] = field(default_factory=dict)
    mollified: List[Dict[str, float]] = field(default_factory=list)
    extrapolated: Optional[float] = None
    pointwise_max_rel: Optional[float] = None
    j_forms_max_rel: Optional[float] = None
    divergence: Optional[str] = None
    tolerance: float = 1e-6
    severity: str = "PASS"
    findings: List[Finding] = field(default_factory=list)

    @property
    def reference(self) -> Optional[float]:
        return self.values.get("lhs_localized")

    @property
    def abs_discrepancy(self) -> Optional[float]:
        """Spread of the method values, recomputed from the stored values."""
        finite = [v for v in self.values.values() if v is not None]
        if len(finite) < 2:
            return None
        return max(finite) - min(finite)

    @property
    def rel_discrepancy(self) -> Optional[float]:
        spread = self.abs_discrepancy
        if spread is None:
            return None
        scale = max(abs(v) for v in self.values.values() if v is not None)
        return spread / scale if scale > 0 else 0.0

    @property
    def passed(self) -> bool:
        return self.severity == "PASS"


def _relative_gap(x: float, y: float) -> float:
    scale = max(abs(x), abs(y))
    return abs(x - y) / scale if scale > 0 else 0.0


def _pointwise_sweep(p: RootPoly, q: RootPoly) -> Optional[float]:
    """Pointwise ratio check at ``v_beta := u_alpha`` for every ``(alpha, beta)``."""
    worst: Optional[float] = None
    for alpha in range(p.degree):
        for beta in range(q.degree):
            h = SupportHyperplane(alpha, beta)
            u, v = support_point(p.roots, q.roots, h)
            try:
                lhs, rhs = pointwise_ratio_check(u, v, h, p.leading, q.leading)
            except (DeltaIdentityError, ZeroDivisionError) as exc:
                # moving v_beta can create a repeated root or a vanishing J_{alpha,beta}
                logger.debug("Skipping support point %s: %s", h, exc)
                continue
            gap = _relative_gap(float(lhs), float(rhs))
            worst = gap if worst is None else max(worst, gap)
    return worst


def _j_forms_gap(p: RootPoly, q: RootPoly) -> Optional[float]:
    """Largest relative gap between J, its product form and the sign-adjusted J~."""
    try:
        j = float(j_multiplier(p, q))
        forms = (float(j_product_form(p, q)), sign_relation(p.degree, q.degree) * float(j_tilde(p, q)))
    except DeltaIdentityError as exc:
        logger.debug("Skipping J form check: %s", exc)
        return None
    return max(_relative_gap(j, other) for other in forms)


def _assess(report: IdentityReport, estimates: Dict[str, IntegralEstimate], cfg: VerificationConfig) -> None:
    ref = estimates["lhs_localized"]
    for name in ("lhs_direct", "rhs_localized"):
        other = estimates[name]
        allowed = cfg.tolerance * max(abs(ref.value), abs(other.value)) + 3.0 * (ref.error + other.error)
        gap = abs(other.value - ref.value)
        severity = "PASS" if gap <= allowed else "FAIL"
        report.findings.append(
            Finding(
                rule=f"agreement:{name}",
                severity=severity,
                message=f"|{name} - lhs_localized| = {gap:.3g} (allowed {allowed:.3g})",
            )
        )

    if report.j_forms_max_rel is not None:
        ok = report.j_forms_max_rel <= cfg.algebraic_tolerance
        report.findings.append(
            Finding(
                rule="j_forms",
                severity="PASS" if ok else "FAIL",
                message=f"J against its product form and J~: relative gap {report.j_forms_max_rel:.3g}",
            )
        )

    if report.pointwise_max_rel is not None:
        ok = report.pointwise_max_rel <= cfg.algebraic_tolerance
        report.findings.append(
            Finding(
                rule="pointwise_ratio",
                severity="PASS" if ok else "FAIL",
                message=f"largest relative gap {report.pointwise_max_rel:.3g}",
            )
        )


def _assess_mollifier(report: IdentityReport, seq: MollifierSequence, target: float, cfg: VerificationConfig) -> None:
    ok = seq.agrees_with(target, cfg.mollifier_allowance)
    last = seq.last
    report.findings.append(
        Finding(
            rule="mollifier",
            severity="PASS" if ok else "FAIL",
            message=(
                f"eps={last.epsilon:g}: {last.value:.6g} +/- {last.stderr:.2g} "
                f"vs localized {target:.6g}"
            ),
        )
    )


def verify_identity(
    p: RootPoly,
    q: RootPoly,
    phi: TestFunction,
    cfg: VerificationConfig,
    label: str = "",
) -> IdentityReport:
    """
    Run every route and assemble an :class:`IdentityReport`.

    A divergent configuration (inadmissible test function or roots of one
    family closer than ``cfg.separation``) yields a FAIL report carrying the
    divergence message instead of raising.

    :param p: ``P`` (family A); its roots define the configuration.
    :param q: ``Q`` (family B).
    :param phi: Test function on ``R^{|A|+|B|}``.
    :param cfg: Verification settings.
    :param label: Name recorded on the report.
    :return: The report.
    """
    logger.info("Verifying identity for %s (|A|=%d, |B|=%d, %s)", label or "configuration", p.degree, q.degree, phi.kind)
    report = IdentityReport(
        label=label,
        size_a=p.degree,
        size_b=q.degree,
        test_function=phi.describe(),
        tolerance=cfg.tolerance,
    )

    try:
        check_separation(p, q, cfg.separation)
        check_admissible(p, q, phi)
        estimates = {
            "lhs_localized": lhs_localized(p, q, phi, cfg.integration),
            "lhs_direct": lhs_direct(p, q, phi, cfg.integration),
            "rhs_localized": rhs_localized(p, q, phi, cfg.integration),
        }
    except Divergent as exc:
        logger.warning("%s: %s", label or "configuration", exc)
        report.divergence = str(exc)
        report.values = {name: None for name in METHODS}
        report.findings.append(Finding(rule="divergence", severity="FAIL", message=str(exc)))
        report.severity = "FAIL"
        return report

    report.values = {name: est.value for name, est in estimates.items()}
    report.errors = {name: est.error for name, est in estimates.items()}
    report.pointwise_max_rel = _pointwise_sweep(p, q)
    report.j_forms_max_rel = _j_forms_gap(p, q)
    _assess(report, estimates, cfg)

    if cfg.mollifier:
        seq = mollifier_sequence(p, q, phi, cfg.epsilons, cfg.mollifier_samples, cfg.seed)
        report.mollified = [asdict(e) for e in seq.estimates]
        report.extrapolated = seq.extrapolated
        _assess_mollifier(report, seq, estimates["lhs_localized"].value, cfg)

    report.severity = "FAIL" if any(f.severity == "FAIL" for f in report.findings) else "PASS"
    log = logger.info if report.passed else logger.warning
    log(
        "Verification %s: %s (relative spread %s)",
        label or "configuration",
        report.severity,
        "n/a" if report.rel_discrepancy is None else f"{report.rel_discrepancy:.3g}",
    )
    return report


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return value


def report_to_dict(report: IdentityReport) -> Dict[str, Any]:
    """Plain-dictionary form of a report, including the derived discrepancies."""
    return {
        "label": report.label,
        "size_a": report.size_a,
        "size_b": report.size_b,
        "test_function": report.test_function,
        "values": {k: _finite(v) for k, v in report.values.items()},
        "errors": report.errors,
        "abs_discrepancy": report.abs_discrepancy,
        "rel_discrepancy": report.rel_discrepancy,
        "pointwise_max_rel": report.pointwise_max_rel,
        "j_forms_max_rel": report.j_forms_max_rel,
        "mollified": report.mollified,
        "extrapolated": report.extrapolated,
        "divergence": report.divergence,
        "tolerance": report.tolerance,
        "severity": report.severity,
        "findings": [asdict(f) for f in report.findings],
    }


def report_to_json(reports: Sequence[IdentityReport], provenance: Optional[Dict[str, str]] = None) -> str:
    """
    Serialize verification reports to a JSON string.

    :param reports: Reports from :func:`verify_identity`.
    :param provenance: Optional source block (config path and hash).
    :return: Indented JSON string terminated by a trailing newline.
    """
    payload: Dict[str, Any] = {"reports": [report_to_dict(r) for r in reports]}
    if provenance is not None:
        payload = {"source": provenance, **payload}
    return json.dumps(payload, indent=2) + "\n"

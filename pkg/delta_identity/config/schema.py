"""
Schema validation for run configuration documents.

Documents are plain mappings (parsed JSON or YAML). Validation is explicit
rather than schema-library driven: each builder checks required and unknown
keys, converts scalars and hands the result to the dataclasses in
:mod:`delta_identity.models`, whose own invariants run in ``__post_init__``.
Every problem surfaces as :class:`ConfigError` before any computation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence

from delta_identity.errors import ConfigError, DeltaIdentityError
from delta_identity.measures.product import validate_factorization
from delta_identity.measures.test_functions import TestFunction, make_test_function
from delta_identity.models import (
    DEFAULT_EPSILONS,
    AffineFactorization,
    AffineFunction,
    Family,
    HornConfig,
    IntegrationConfig,
    IntegrationMethod,
    RootPoly,
    VerificationConfig,
)

logger = logging.getLogger(__name__)


# ----------------------------------------------------------------------
# Key and scalar helpers
# ----------------------------------------------------------------------


def require_keys(obj: Mapping[str, Any], keys: Iterable[str], where: str = "document") -> None:
    """
    Require that the given mapping has the specified keys.

    :param obj: Mapping to validate.
    :param keys: Required keys.
    :param where: Location used in the error message.
    :raises ConfigError: If any key is missing.
    """
    missing = [k for k in keys if k not in obj]
    if missing:
        raise ConfigError(f"{where}: missing required keys: {missing}")


def reject_unknown_keys(obj: Mapping[str, Any], allowed: Iterable[str], where: str = "document") -> None:
    """
    :raises ConfigError: If the mapping holds keys outside ``allowed``.
    """
    allowed = set(allowed)
    unknown = sorted(k for k in obj if k not in allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown keys: {unknown}")


def _mapping(value: Any, where: str) -> Mapping[str, Any]:
    if not isinstance(value, Mapping):
        raise ConfigError(f"{where}: expected a mapping, got {type(value).__name__}")
    return value


def _real(value: Any, where: str) -> float:
    # PyYAML reads exponent literals without a dot ("1e-6") as strings
    if isinstance(value, bool):
        raise ConfigError(f"{where}: expected a number, got a boolean")
    if isinstance(value, str):
        try:
            value = float(value)
        except ValueError:
            raise ConfigError(f"{where}: expected a number, got {value!r}") from None
    if not isinstance(value, (int, float)):
        raise ConfigError(f"{where}: expected a number, got {type(value).__name__}")
    if not math.isfinite(value):
        raise ConfigError(f"{where}: must be finite")
    return value


def _positive(value: Any, where: str) -> float:
    value = _real(value, where)
    if not value > 0:
        raise ConfigError(f"{where}: must be > 0, got {value}")
    return value


def _integer(value: Any, where: str, minimum: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if value < minimum:
        raise ConfigError(f"{where}: must be >= {minimum}, got {value}")
    return value


def _reals(value: Any, where: str, length: Optional[int] = None) -> List[float]:
    if not isinstance(value, Sequence) or isinstance(value, str):
        raise ConfigError(f"{where}: expected a list of numbers")
    out = [_real(v, f"{where}[{k}]") for k, v in enumerate(value)]
    if length is not None and len(out) != length:
        raise ConfigError(f"{where}: expected {length} entries, got {len(out)}")
    return out


def _seed(doc: Mapping[str, Any], override: Optional[int], where: str) -> int:
    if override is not None:
        return _integer(override, "--seed")
    if "seed" not in doc:
        raise ConfigError(f"{where}: a seed is required (no wall-clock seeding)")
    return _integer(doc["seed"], f"{where}.seed")


# ----------------------------------------------------------------------
# Shared blocks
# ----------------------------------------------------------------------

INTEGRATION_KEYS = ("method", "samples", "eta", "epsabs", "epsrel")
POLY_KEYS = ("leading", "roots")
TEST_FUNCTION_KEYS = ("kind", "center", "width", "half_width")


def build_integration(block: Optional[Mapping[str, Any]], seed: int, base: IntegrationConfig) -> IntegrationConfig:
    """Integration settings, starting from ``base`` and applying ``block``."""
    if block is None:
        return IntegrationConfig(base.method, base.samples, base.eta, seed, base.epsabs, base.epsrel)
    block = _mapping(block, "integration")
    reject_unknown_keys(block, INTEGRATION_KEYS, "integration")
    try:
        method = IntegrationMethod(block.get("method", base.method.value))
    except ValueError:
        choices = [m.value for m in IntegrationMethod]
        raise ConfigError(f"integration.method: expected one of {choices}") from None
    return IntegrationConfig(
        method=method,
        samples=_integer(block.get("samples", base.samples), "integration.samples", minimum=1),
        eta=_positive(block.get("eta", base.eta), "integration.eta"),
        seed=seed,
        epsabs=_positive(block.get("epsabs", base.epsabs), "integration.epsabs"),
        epsrel=_positive(block.get("epsrel", base.epsrel), "integration.epsrel"),
    )


def build_root_poly(block: Any, family: Family, where: str) -> RootPoly:
    """``{"leading": a, "roots": [...]}`` to a :class:`RootPoly`."""
    block = _mapping(block, where)
    require_keys(block, ("roots",), where)
    reject_unknown_keys(block, POLY_KEYS, where)
    leading = _real(block.get("leading", 1), f"{where}.leading")
    roots = _reals(block["roots"], f"{where}.roots")
    try:
        return RootPoly(leading, tuple(roots), family)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def build_test_function(block: Any, dimension: int, where: str) -> TestFunction:
    """Test-function block to a :class:`TestFunction` on ``R^dimension``."""
    block = _mapping(block, where)
    require_keys(block, ("kind", "center"), where)
    reject_unknown_keys(block, TEST_FUNCTION_KEYS, where)
    params: Dict[str, Any] = {"kind": block["kind"], "center": _reals(block["center"], f"{where}.center")}
    for key in ("width", "half_width"):
        if key in block:
            params[key] = _positive(block[key], f"{where}.{key}")
    try:
        phi = make_test_function(params)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    if phi.dimension != dimension:
        raise ConfigError(f"{where}: center has dimension {phi.dimension}, expected {dimension}")
    return phi


# ----------------------------------------------------------------------
# verify
# ----------------------------------------------------------------------

VERIFY_KEYS = (
    "seed",
    "tolerance",
    "algebraic_tolerance",
    "separation",
    "integration",
    "mollifier",
    "configurations",
)
MOLLIFIER_KEYS = ("enabled", "epsilons", "samples", "allowance")
CASE_KEYS = ("label", "p", "q", "test_function")


@dataclass
class VerifyCase:
    """One configuration of a verify run."""

    label: str
    p: RootPoly
    q: RootPoly
    test_function: TestFunction


@dataclass
class VerifyRun:
    """A validated verify document."""

    settings: VerificationConfig
    cases: List[VerifyCase] = field(default_factory=list)


def _build_case(block: Any, k: int) -> VerifyCase:
    where = f"configurations[{k}]"
    block = _mapping(block, where)
    require_keys(block, ("p", "q", "test_function"), where)
    reject_unknown_keys(block, CASE_KEYS, where)
    p = build_root_poly(block["p"], Family.A, f"{where}.p")
    q = build_root_poly(block["q"], Family.B, f"{where}.q")
    phi = build_test_function(block["test_function"], p.degree + q.degree, f"{where}.test_function")
    label = block.get("label", f"config-{k}")
    if not isinstance(label, str):
        raise ConfigError(f"{where}.label: expected a string")
    return VerifyCase(label=label, p=p, q=q, test_function=phi)


def build_verify_run(
    doc: Any,
    seed: Optional[int] = None,
    tolerance: Optional[float] = None,
) -> VerifyRun:
    """
    Validate a verify document.

    :param doc: Parsed document.
    :param seed: ``--seed`` override.
    :param tolerance: ``--tolerance`` override.
    :raises ConfigError: On any schema violation.
    """
    doc = _mapping(doc, "document")
    require_keys(doc, ("configurations",))
    reject_unknown_keys(doc, VERIFY_KEYS)
    run_seed = _seed(doc, seed, "document")
    defaults = VerificationConfig()

    mollifier = _mapping(doc.get("mollifier", {}), "mollifier")
    reject_unknown_keys(mollifier, MOLLIFIER_KEYS, "mollifier")
    enabled = mollifier.get("enabled", False)
    if not isinstance(enabled, bool):
        raise ConfigError("mollifier.enabled: expected a boolean")

    tol = tolerance if tolerance is not None else doc.get("tolerance", defaults.tolerance)
    try:
        settings = VerificationConfig(
            integration=build_integration(doc.get("integration"), run_seed, defaults.integration),
            tolerance=_positive(tol, "tolerance"),
            algebraic_tolerance=_positive(
                doc.get("algebraic_tolerance", defaults.algebraic_tolerance), "algebraic_tolerance"
            ),
            separation=_real(doc.get("separation", defaults.separation), "separation"),
            mollifier=enabled,
            epsilons=tuple(_reals(mollifier.get("epsilons", list(DEFAULT_EPSILONS)), "mollifier.epsilons")),
            mollifier_samples=_integer(
                mollifier.get("samples", defaults.mollifier_samples), "mollifier.samples", minimum=2
            ),
            mollifier_allowance=_real(mollifier.get("allowance", defaults.mollifier_allowance), "mollifier.allowance"),
            seed=run_seed,
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

    configurations = doc["configurations"]
    if not isinstance(configurations, list) or not configurations:
        raise ConfigError("configurations: expected a non-empty list")
    run = VerifyRun(settings=settings, cases=[_build_case(c, k) for k, c in enumerate(configurations)])
    logger.debug("Validated verify document with %d configurations", len(run.cases))
    return run


# ----------------------------------------------------------------------
# integrate
# ----------------------------------------------------------------------

INTEGRATE_KEYS = ("seed", "factors", "test_function", "integration")
FACTOR_KEYS = ("gradient", "offset")


@dataclass
class IntegrateRun:
    """A validated integrate document."""

    factorization: AffineFactorization
    test_function: TestFunction
    integration: IntegrationConfig


def build_integrate_run(doc: Any, seed: Optional[int] = None, tolerance: Optional[float] = None) -> IntegrateRun:
    """
    Validate an integrate document.

    :param seed: ``--seed`` override.
    :param tolerance: ``--tolerance`` override of the relative quadrature
                      tolerance ``integration.epsrel``.
    :raises ConfigError: On any schema violation, including proportional or
                         zero-gradient factors.
    """
    doc = _mapping(doc, "document")
    require_keys(doc, ("factors", "test_function"))
    reject_unknown_keys(doc, INTEGRATE_KEYS)
    run_seed = _seed(doc, seed, "document")

    raw = doc["factors"]
    if not isinstance(raw, list) or not raw:
        raise ConfigError("factors: expected a non-empty list")
    factors = []
    for k, block in enumerate(raw):
        where = f"factors[{k}]"
        block = _mapping(block, where)
        require_keys(block, ("gradient",), where)
        reject_unknown_keys(block, FACTOR_KEYS, where)
        gradient = _reals(block["gradient"], f"{where}.gradient")
        if not gradient:
            raise ConfigError(f"{where}.gradient: must not be empty")
        offset = _real(block.get("offset", 0.0), f"{where}.offset")
        try:
            factors.append(AffineFunction(tuple(gradient), offset))
        except DeltaIdentityError as exc:
            raise ConfigError(f"{where}: {exc}") from exc
    if len({f.dimension for f in factors}) != 1:
        raise ConfigError("factors: gradients must share one dimension")
    try:
        factorization = validate_factorization(factors)
    except DeltaIdentityError as exc:
        raise ConfigError(f"factors: {exc}") from exc

    phi = build_test_function(doc["test_function"], factorization.dimension, "test_function")
    integration = build_integration(doc.get("integration"), run_seed, IntegrationConfig())
    if tolerance is not None:
        integration = replace(integration, epsrel=_positive(tolerance, "--tolerance"))
    return IntegrateRun(factorization=factorization, test_function=phi, integration=integration)


# ----------------------------------------------------------------------
# horn
# ----------------------------------------------------------------------

HORN_KEYS = ("alpha", "beta", "samples", "seed", "grid", "scan_points", "subpoints", "tolerance")
GRID_KEYS = ("p_range", "q_range", "bins")


def build_horn_config(doc: Any, seed: Optional[int] = None, tolerance: Optional[float] = None) -> HornConfig:
    """
    Validate a horn document.

    :param seed: ``--seed`` override.
    :param tolerance: ``--tolerance`` override of the |z| agreement limit.
    :raises ConfigError: On any schema violation, including eigenvalue
                         triples that do not sum to zero.
    """
    doc = _mapping(doc, "document")
    require_keys(doc, ("alpha", "beta"))
    reject_unknown_keys(doc, HORN_KEYS)
    run_seed = _seed(doc, seed, "document")
    grid = _mapping(doc.get("grid", {}), "grid")
    reject_unknown_keys(grid, GRID_KEYS, "grid")
    defaults = HornConfig((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))
    tol = tolerance if tolerance is not None else doc.get("tolerance", defaults.tolerance)

    ranges = {}
    for key in ("p_range", "q_range"):
        ranges[key] = tuple(_reals(grid[key], f"grid.{key}", length=2)) if key in grid else None
    try:
        return HornConfig(
            alpha=tuple(_reals(doc["alpha"], "alpha", length=3)),
            beta=tuple(_reals(doc["beta"], "beta", length=3)),
            samples=_integer(doc.get("samples", defaults.samples), "samples", minimum=1),
            p_range=ranges["p_range"],
            q_range=ranges["q_range"],
            bins=_integer(grid.get("bins", defaults.bins), "grid.bins", minimum=1),
            seed=run_seed,
            scan_points=_integer(doc.get("scan_points", defaults.scan_points), "scan_points", minimum=8),
            subpoints=_integer(doc.get("subpoints", defaults.subpoints), "subpoints", minimum=1),
            tolerance=_positive(tol, "tolerance"),
        )
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc

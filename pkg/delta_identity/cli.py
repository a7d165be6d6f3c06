"""
Command-line interface for delta-identity.

This module provides four commands:

- verify:
    Check the resultant delta-identity for every configuration of a
    document and write report.json into the output directory. Exit 1 if
    any configuration fails.

- expand-j:
    Print the exact expansion of J for given family sizes.

- horn:
    Compare the Monte Carlo and resultant-localized Horn densities and
    write mc_grid.csv, localized_grid.csv and compare.csv.

- integrate:
    Integrate a test function against the delta measure of a product of
    affine functions and print the value, or the divergent pair and exit 1.

Configuration errors exit with code 2 before any output file is created.
The CLI is intentionally thin. All domain logic lives elsewhere.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import List, Optional, Tuple

from delta_identity.config.loader import load_document
from delta_identity.config.schema import (
    VerifyCase,
    build_horn_config,
    build_integrate_run,
    build_verify_run,
)
from delta_identity.errors import ConfigError, Divergent
from delta_identity.horn.compare import comparison_summary, compare_report, write_comparison_csv, write_grid_csv
from delta_identity.logging_config import configure_logging, parse_level
from delta_identity.measures.product import delta_product_integrate
from delta_identity.models import Family, RootPoly, VerificationConfig
from delta_identity.polynomials.multiplier import j_multiplier
from delta_identity.polynomials.symbolic import MAX_SYMBOLIC_SIZE, MultiPoly, expand_j_symbolic
from delta_identity.utils.parallel import run_tasks
from delta_identity.utils.source_fingerprint import build_source_metadata
from delta_identity.verification.verifier import IdentityReport, report_to_json, verify_identity

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2

#: File name of the verify report inside the output directory.
REPORT_NAME = "report.json"


def _require_output_dir(path: Path) -> None:
    if not path.is_dir():
        raise ConfigError(f"output directory does not exist: {path}")


# -------------------------------------------------------------------------
# verify
# -------------------------------------------------------------------------


def _verify_task(task: Tuple[VerifyCase, VerificationConfig]) -> IdentityReport:
    case, settings = task
    return verify_identity(case.p, case.q, case.test_function, settings, label=case.label)


def _cmd_verify(args: argparse.Namespace) -> int:
    """Verify every configuration of a document and write the JSON report."""
    logger.info("Running verify command on %s", args.config)

    doc, text = load_document(args.config)
    run = build_verify_run(doc, seed=args.seed, tolerance=args.tolerance)
    out = Path(args.out)
    _require_output_dir(out)
    report_path = out / REPORT_NAME

    reports = run_tasks(_verify_task, [(case, run.settings) for case in run.cases], args.workers)
    provenance = build_source_metadata(Path(args.config), text)
    report_path.write_text(report_to_json(reports, provenance), encoding="utf-8")

    for report in reports:
        value = report.reference
        shown = "DIVERGENT" if value is None else f"{value:.6f}"
        print(f"{report.label}: {report.severity} {shown}")
    failed = [r.label for r in reports if not r.passed]
    logger.info("Verification report written to %s (%d of %d failed)", report_path, len(failed), len(reports))
    return EXIT_FAILED if failed else EXIT_OK


# -------------------------------------------------------------------------
# expand-j
# -------------------------------------------------------------------------


def _check_points(size_a: int, size_b: int) -> List[Tuple[List[Fraction], List[Fraction]]]:
    # distinct rationals, u and v interleaved so that no u equals a v
    points = []
    for shift in (Fraction(1, 3), Fraction(-2, 7), Fraction(5, 2)):
        u = [shift + Fraction(2 * k, 1) for k in range(size_a)]
        v = [shift + Fraction(2 * k + 1, 3) for k in range(size_b)]
        points.append((u, v))
    return points


def self_check_expansion(poly: MultiPoly, size_a: int, size_b: int, a: Fraction, b: Fraction) -> None:
    """
    Compare the expansion with :func:`j_multiplier` at rational points, exactly.

    :raises ArithmeticError: On any mismatch.
    """
    for u, v in _check_points(size_a, size_b):
        expected = j_multiplier(RootPoly(a, tuple(u), Family.A), RootPoly(b, tuple(v), Family.B))
        got = poly.evaluate(list(u) + list(v))
        if got != expected:
            raise ArithmeticError(f"expansion disagrees with J at u={u}, v={v}: {got} != {expected}")
    logger.debug("Expansion matches J at %d rational points", len(_check_points(size_a, size_b)))


def _cmd_expand_j(args: argparse.Namespace) -> int:
    """Print the exact expansion of J."""
    size_a, size_b = args.sizes
    if not (1 <= size_a <= MAX_SYMBOLIC_SIZE and 1 <= size_b <= MAX_SYMBOLIC_SIZE):
        raise ConfigError(f"family sizes must lie in 1..{MAX_SYMBOLIC_SIZE}, got {size_a},{size_b}")
    a, b = args.a, args.b
    if a == 0 or b == 0:
        raise ConfigError("leading coefficients must be nonzero")
    logger.info("Expanding J for |A|=%d, |B|=%d, a=%s, b=%s", size_a, size_b, a, b)

    poly = expand_j_symbolic(size_a, size_b, a, b)
    try:
        self_check_expansion(poly, size_a, size_b, a, b)
    except ArithmeticError as exc:
        logger.error("Self-check failed: %s", exc)
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(poly.to_string())
    return EXIT_OK


# -------------------------------------------------------------------------
# horn
# -------------------------------------------------------------------------


def _cmd_horn(args: argparse.Namespace) -> int:
    """Compare both Horn densities and write the three CSV files."""
    logger.info("Running horn command on %s", args.config)

    doc, text = load_document(args.config)
    cfg = build_horn_config(doc, seed=args.seed, tolerance=args.tolerance)
    out = Path(args.out)
    _require_output_dir(out)

    report = compare_report(cfg, workers=args.workers)
    write_grid_csv(report.mc, out / "mc_grid.csv")
    write_grid_csv(report.localized, out / "localized_grid.csv")
    write_comparison_csv(report, out / "compare.csv")

    summary = {"source": build_source_metadata(Path(args.config), text), **comparison_summary(report)}
    print(json.dumps(summary, indent=2))
    return EXIT_OK if report.passed else EXIT_FAILED


# -------------------------------------------------------------------------
# integrate
# -------------------------------------------------------------------------


def _cmd_integrate(args: argparse.Namespace) -> int:
    """Print the integral, or the divergent factor pair with exit code 1."""
    logger.info("Running integrate command on %s", args.config)

    doc, _ = load_document(args.config)
    run = build_integrate_run(doc, seed=args.seed, tolerance=args.tolerance)
    try:
        estimate = delta_product_integrate(run.factorization, run.test_function, run.integration, args.workers)
    except Divergent as exc:
        logger.warning("%s", exc)
        print(f"DIVERGENT ({exc.pair[0]},{exc.pair[1]})")
        return EXIT_FAILED
    print(f"{estimate.value:.12g}")
    return EXIT_OK


# -------------------------------------------------------------------------
# argument parser
# -------------------------------------------------------------------------


def _sizes(text: str) -> Tuple[int, int]:
    try:
        a, b = (int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected two sizes like 2,3, got {text!r}") from None
    return a, b


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected a rational number, got {text!r}") from None


def _workers(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1")
    return value


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="delta-identity",
        description="Delta measures, the resultant delta-identity and the Horn density",
    )
    parser.add_argument("--log-level", default="INFO")

    subparsers = parser.add_subparsers(dest="cmd", required=True)

    # verify
    verify_cmd = subparsers.add_parser("verify", help="Verify the identity for a configuration document")
    verify_cmd.add_argument("--config", required=True)
    verify_cmd.add_argument("--out", required=True, help="Existing output directory for report.json")
    verify_cmd.add_argument("--seed", type=int)
    verify_cmd.add_argument("--workers", type=_workers, default=1)
    verify_cmd.add_argument("--tolerance", type=float)
    verify_cmd.set_defaults(func=_cmd_verify)

    # expand-j
    expand_cmd = subparsers.add_parser("expand-j", help="Print the exact expansion of J")
    expand_cmd.add_argument("sizes", type=_sizes, help="|A|,|B|")
    expand_cmd.add_argument("--a", type=_rational, default=Fraction(1))
    expand_cmd.add_argument("--b", type=_rational, default=Fraction(1))
    expand_cmd.set_defaults(func=_cmd_expand_j)

    # horn
    horn_cmd = subparsers.add_parser("horn", help="Compare Monte Carlo and localized Horn densities")
    horn_cmd.add_argument("--config", required=True)
    horn_cmd.add_argument("--out", required=True, help="Existing output directory")
    horn_cmd.add_argument("--seed", type=int)
    horn_cmd.add_argument("--workers", type=_workers, default=1)
    horn_cmd.add_argument("--tolerance", type=float, help="Largest |z| of an agreeing bin")
    horn_cmd.set_defaults(func=_cmd_horn)

    # integrate
    integrate_cmd = subparsers.add_parser("integrate", help="Integrate against a product delta measure")
    integrate_cmd.add_argument("--config", required=True)
    integrate_cmd.add_argument("--seed", type=int)
    integrate_cmd.add_argument("--workers", type=_workers, default=1)
    integrate_cmd.add_argument("--tolerance", type=float, help="Relative quadrature tolerance")
    integrate_cmd.set_defaults(func=_cmd_integrate)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_arg_parser()
    args = parser.parse_args(argv)

    try:
        level = parse_level(args.log_level)
    except ValueError as exc:
        parser.error(str(exc))
    configure_logging(level)

    try:
        return args.func(args)
    except ConfigError as exc:
        logger.error("%s", exc)
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())

"""
delta-identity

Delta measures on hyperplane arrangements and a numerical verification
harness for the resultant delta-identity

    int dx delta(P_x) (x) delta(Q_x) = |J| delta(R),

with a Horn-problem application.

Public API layers:

- Polynomials:
    Root and coefficient forms, resultants, the multiplier J and its exact
    symbolic expansion.

- Measures:
    Delta measures of affine functions and of their products, with
    divergence detection.

- Verification:
    Independent evaluations of both sides of the identity and a report.

- Horn:
    Density of characteristic-polynomial coefficients of A + R B R^T by
    Monte Carlo and by the resultant-localized formula.
"""

from __future__ import annotations

# ---- Polynomials ----
from delta_identity.polynomials.multiplier import j_degree2, j_multiplier, j_product_form, j_tilde
from delta_identity.polynomials.resultant import resultant_roots, resultant_sylvester
from delta_identity.polynomials.symbolic import MultiPoly, expand_j_symbolic

# ---- Measures ----
from delta_identity.measures.affine import delta_affine_integrate
from delta_identity.measures.divergence import divergence_probe
from delta_identity.measures.product import (
    delta_1d_integrate,
    delta_product_integrate,
    delta_Px_integrate,
    validate_factorization,
)
from delta_identity.measures.test_functions import (
    CompactBump,
    GaussianTest,
    IndicatorBox,
    TestFunction,
    TruncatedGaussian,
)

# ---- Verification ----
from delta_identity.verification.verifier import IdentityReport, verify_identity

# ---- Horn ----
from delta_identity.horn.compare import compare_report
from delta_identity.horn.histogram import HornGrid, mc_histogram
from delta_identity.horn.localized import rho_localized

# ---- Core Models ----
from delta_identity.models import (
    AffineFactorization,
    AffineFunction,
    CoeffPoly,
    HornConfig,
    IntegrationConfig,
    RootPoly,
    VerificationConfig,
)

__all__ = [
    # Polynomials
    "j_degree2",
    "j_multiplier",
    "j_product_form",
    "j_tilde",
    "resultant_roots",
    "resultant_sylvester",
    "MultiPoly",
    "expand_j_symbolic",

    # Measures
    "delta_affine_integrate",
    "divergence_probe",
    "delta_1d_integrate",
    "delta_product_integrate",
    "delta_Px_integrate",
    "validate_factorization",
    "CompactBump",
    "GaussianTest",
    "IndicatorBox",
    "TestFunction",
    "TruncatedGaussian",

    # Verification
    "IdentityReport",
    "verify_identity",

    # Horn
    "compare_report",
    "HornGrid",
    "mc_histogram",
    "rho_localized",

    # Models
    "AffineFactorization",
    "AffineFunction",
    "CoeffPoly",
    "HornConfig",
    "IntegrationConfig",
    "RootPoly",
    "VerificationConfig",
]

"""
Tests for core data models.
"""

from fractions import Fraction

import numpy as np
import pytest
from scipy.integrate import trapezoid

from delta_identity.errors import ZeroGradient
from delta_identity.models import (
    AffineFactorization,
    AffineFunction,
    CoeffPoly,
    Family,
    HornConfig,
    IntegrationConfig,
    MollifierSpec,
    RootPoly,
    SupportHyperplane,
    VerificationConfig,
)


def test_root_poly_creation():
    poly = RootPoly(2, (0.5, -1.0), Family.B)

    assert poly.degree == 2
    assert poly.label == Family.B
    assert poly.with_roots((3.0,)).leading == 2
    assert poly.with_roots((3.0,)).label == Family.B


def test_root_poly_keeps_fractions_exact():
    poly = RootPoly(Fraction(1, 3), (Fraction(1, 2),))
    assert poly.leading == Fraction(1, 3)
    assert poly.roots == (Fraction(1, 2),)


@pytest.mark.parametrize(
    "leading, roots",
    [(0, (1.0,)), (1, ()), (1, (float("nan"),)), (float("inf"), (1.0,))],
)
def test_root_poly_rejects(leading, roots):
    with pytest.raises(ValueError):
        RootPoly(leading, roots)


def test_coeff_poly_evaluation():
    poly = CoeffPoly((2, -3, 1))

    assert poly.degree == 2
    assert poly.leading == 1
    assert poly(1) == 0
    assert poly(3) == 2


def test_coeff_poly_rejects_trailing_zero():
    with pytest.raises(ValueError):
        CoeffPoly((1, 0))
    with pytest.raises(ValueError):
        CoeffPoly(())


def test_affine_function_evaluation():
    f = AffineFunction((1.0, 2.0), -1.0)

    assert f.dimension == 2
    assert f(np.array([1.0, 1.0])) == pytest.approx(2.0)
    assert f(np.array([[0.0, 0.0], [1.0, 0.0]])) == pytest.approx([-1.0, 0.0])
    assert f.grad_norm == pytest.approx(np.sqrt(5.0))
    assert f.scaled(-2.0).offset == pytest.approx(2.0)


def test_affine_function_rejects_zero_gradient():
    with pytest.raises(ZeroGradient):
        AffineFunction((0.0, 0.0), 1.0)
    with pytest.raises(ZeroGradient):
        AffineFunction((1.0, -2.0), 0.5).scaled(0.0)
    with pytest.raises(ValueError):
        AffineFunction((), 0.0)


def test_root_poly_construction_is_silent(caplog):
    """Root polynomials are built inside sampling loops and must not log."""
    with caplog.at_level("DEBUG", logger="delta_identity"):
        for k in range(100):
            RootPoly(1.0, (float(k), float(k) + 0.5))
    assert caplog.records == []


def test_factorization_product():
    fact = AffineFactorization((AffineFunction((1.0, 0.0)), AffineFunction((0.0, 1.0), 1.0)))

    assert len(fact) == 2
    assert fact.dimension == 2
    assert fact.product(np.array([2.0, 3.0])) == pytest.approx(8.0)


def test_setting_defaults():
    integration = IntegrationConfig()
    settings = VerificationConfig()
    horn = HornConfig((1.0, 0.0, -1.0), (0.0, 0.0, 0.0))

    assert integration.samples > 0
    assert settings.tolerance == pytest.approx(1e-6)
    assert settings.epsilons == (0.1, 0.05, 0.025)
    assert settings.mollifier is False
    assert horn.bins == 20
    assert horn.p_range is None


def test_settings_reject_bad_values():
    with pytest.raises(ValueError):
        IntegrationConfig(samples=0)
    with pytest.raises(ValueError):
        VerificationConfig(epsilons=(0.05, 0.1))
    with pytest.raises(ValueError):
        HornConfig((1.0, 0.0, 0.0), (0.0, 0.0, 0.0))


def test_support_hyperplane_range_check():
    SupportHyperplane(1, 0).check(2, 1)
    with pytest.raises(ValueError):
        SupportHyperplane(2, 0).check(2, 1)


def test_mollifier_is_normalized():
    mollifier = MollifierSpec(0.1)
    t = np.linspace(-1.0, 1.0, 20001)
    assert trapezoid(mollifier(t), t) == pytest.approx(1.0, abs=1e-8)
    with pytest.raises(ValueError):
        MollifierSpec(0.0)

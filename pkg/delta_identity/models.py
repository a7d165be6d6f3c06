"""
Core data models for delta-identity.

These classes define the structural representation of:
- Root-factored and coefficient-form polynomials
- Affine functions and their factorizations (members of H(R^n))
- Integration and mollifier settings
- Horn-problem run parameters

They are deliberately lightweight and side-effect free. Scalars are kept
as given (``float``, ``int`` or ``fractions.Fraction``) so that exact
rational inputs stay exact through the polynomial layer.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from numbers import Real
from typing import Optional, Sequence, Tuple

import numpy as np

from delta_identity.errors import ZeroGradient

#: Relative closeness under which two roots count as repeated.
ROOT_COINCIDENCE_TOL = 1e-12


class Family(str, Enum):
    """
    Which side of the identity a polynomial belongs to.

    ``A`` polynomials carry the ``u`` roots, ``B`` polynomials the ``v`` roots.
    """

    A = "A"
    B = "B"


@dataclass(frozen=True)
class RootPoly:
    """
    A real polynomial in root form, ``leading * prod(x - root_i)``.

    :param leading: Nonzero leading coefficient (``a`` or ``b``).
    :param roots: Real roots, in caller order; indices are root labels.
    :param label: Family tag, ``A`` for ``P`` and ``B`` for ``Q``.
    """

    leading: Real
    roots: Tuple[Real, ...]
    label: Family = Family.A

    def __post_init__(self) -> None:
        object.__setattr__(self, "roots", tuple(self.roots))
        if self.leading == 0:
            raise ValueError("leading coefficient must be nonzero")
        if not self.roots:
            raise ValueError("a RootPoly needs at least one root")
        if not all(math.isfinite(r) for r in self.roots):
            raise ValueError(f"roots must be finite reals, got {self.roots}")
        if not math.isfinite(self.leading):
            raise ValueError("leading coefficient must be finite")

    @property
    def degree(self) -> int:
        return len(self.roots)

    def with_roots(self, roots: Sequence[Real]) -> "RootPoly":
        """Same leading coefficient and family, new roots."""
        return RootPoly(self.leading, tuple(roots), self.label)


@dataclass(frozen=True)
class CoeffPoly:
    """
    A real polynomial in coefficient form, ascending degree order.

    ``CoeffPoly((2, -3, 1))`` is ``x**2 - 3x + 2``.
    """

    coefficients: Tuple[Real, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        if not self.coefficients:
            raise ValueError("a CoeffPoly needs at least one coefficient")
        if len(self.coefficients) > 1 and self.coefficients[-1] == 0:
            raise ValueError("highest-degree coefficient must be nonzero")

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    @property
    def leading(self) -> Real:
        return self.coefficients[-1]

    def __call__(self, x: float) -> float:
        # Horner, highest degree first
        acc = 0
        for c in reversed(self.coefficients):
            acc = acc * x + c
        return acc


@dataclass(frozen=True)
class AffineFunction:
    """
    Affine function ``f(y) = gradient . y + offset`` on R^n.

    :param gradient: Real vector with at least one nonzero entry.
    :raises ZeroGradient: If every gradient entry is zero.
    :param offset: Real scalar.
    """

    gradient: Tuple[float, ...]
    offset: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "gradient", tuple(float(g) for g in self.gradient))
        object.__setattr__(self, "offset", float(self.offset))
        if not self.gradient:
            raise ValueError("gradient must have dimension >= 1")
        if not any(g != 0.0 for g in self.gradient):
            raise ZeroGradient(f"affine function has zero gradient {self.gradient}")

    @property
    def dimension(self) -> int:
        return len(self.gradient)

    @property
    def grad(self) -> np.ndarray:
        return np.asarray(self.gradient, dtype=float)

    @property
    def grad_norm(self) -> float:
        return float(np.linalg.norm(self.grad))

    def __call__(self, y: np.ndarray) -> np.ndarray:
        """Evaluate at a point or a stack of points (last axis is R^n)."""
        return np.asarray(y, dtype=float) @ self.grad + self.offset

    def scaled(self, factor: float) -> "AffineFunction":
        return AffineFunction(tuple(factor * g for g in self.gradient), factor * self.offset)


@dataclass(frozen=True)
class AffineFactorization:
    """
    An ordered factorization ``(f_1, ..., f_k)`` of a member of H(R^n).

    Build instances through
    :func:`delta_identity.measures.product.validate_factorization`, which
    checks pairwise non-proportionality.
    """

    factors: Tuple[AffineFunction, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dimension(self) -> int:
        return self.factors[0].dimension

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def product(self, y: np.ndarray) -> np.ndarray:
        """Evaluate ``f = prod f_i`` at a point or stack of points."""
        out = np.ones(np.asarray(y).shape[:-1])
        for f in self.factors:
            out = out * f(y)
        return out


class IntegrationMethod(str, Enum):
    """Backends for integrals against delta measures."""

    EXACT = "exact-closed-form"
    QUADRATURE = "adaptive-quadrature"
    MONTE_CARLO = "monte-carlo"


@dataclass(frozen=True)
class IntegrationConfig:
    """
    Numerical settings for delta-measure integrals.

    :param method: Preferred backend; ``EXACT`` falls back to quadrature when
                   no closed form exists, quadrature falls back to Monte Carlo
                   above three integration dimensions.
    :param samples: Monte Carlo sample count.
    :param eta: Singularity exclusion radius for the trend check.
    :param seed: Random seed for Monte Carlo.
    :param epsabs: Absolute tolerance handed to adaptive quadrature.
    :param epsrel: Relative tolerance handed to adaptive quadrature.
    """

    method: IntegrationMethod = IntegrationMethod.EXACT
    samples: int = 200_000
    eta: float = 1e-3
    seed: int = 0
    epsabs: float = 1e-13
    epsrel: float = 1e-10

    def __post_init__(self) -> None:
        if self.samples < 1:
            raise ValueError("sample count must be >= 1")
        if not self.eta > 0:
            raise ValueError("exclusion radius eta must be > 0")


@dataclass(frozen=True)
class SupportHyperplane:
    """The hyperplane ``u_alpha = v_beta`` in root space."""

    alpha: int
    beta: int

    def check(self, size_a: int, size_b: int) -> None:
        if not (0 <= self.alpha < size_a and 0 <= self.beta < size_b):
            raise ValueError(
                f"support index ({self.alpha}, {self.beta}) out of range "
                f"for |A|={size_a}, |B|={size_b}"
            )


@dataclass(frozen=True)
class MollifierSpec:
    """Gaussian mollifier of standard deviation ``epsilon``."""

    epsilon: float

    def __post_init__(self) -> None:
        if not self.epsilon > 0:
            raise ValueError("mollifier width must be > 0")

    def __call__(self, t: np.ndarray) -> np.ndarray:
        e = self.epsilon
        return np.exp(-0.5 * (np.asarray(t) / e) ** 2) / (e * math.sqrt(2.0 * math.pi))


#: Mollifier widths run by the verifier, largest first.
DEFAULT_EPSILONS = (0.1, 0.05, 0.025)


@dataclass(frozen=True)
class VerificationConfig:
    """
    Settings of one identity verification.

    :param integration: Settings handed to every hyperplane integral.
    :param tolerance: Relative tolerance between quadrature methods.
    :param algebraic_tolerance: Relative tolerance for exact identities
                                (pointwise ratio, J forms).
    :param separation: Smallest admissible distance between two roots of one
                       family.
    :param mollifier: Whether to run the mollified Monte Carlo oracle.
    :param epsilons: Mollifier widths, strictly decreasing.
    :param mollifier_samples: Monte Carlo samples per width.
    :param mollifier_allowance: Relative allowance on top of three standard
                                errors when comparing the oracle.
    :param seed: Root seed of the oracle's random streams.
    """

    integration: IntegrationConfig = IntegrationConfig(
        method=IntegrationMethod.EXACT, epsabs=1e-12, epsrel=1e-9
    )
    tolerance: float = 1e-6
    algebraic_tolerance: float = 1e-10
    separation: float = 0.5
    mollifier: bool = False
    epsilons: Tuple[float, ...] = DEFAULT_EPSILONS
    mollifier_samples: int = 1_000_000
    mollifier_allowance: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "epsilons", tuple(float(e) for e in self.epsilons))
        if not self.tolerance > 0 or not self.algebraic_tolerance > 0:
            raise ValueError("tolerances must be > 0")
        if self.separation < 0:
            raise ValueError("separation must be >= 0")
        if not self.epsilons or any(e <= 0 for e in self.epsilons):
            raise ValueError("mollifier widths must be > 0")
        if any(b >= a for a, b in zip(self.epsilons, self.epsilons[1:])):
            raise ValueError("mollifier widths must be strictly decreasing")
        if self.mollifier_samples < 2:
            raise ValueError("mollifier sample count must be >= 2")


@dataclass(frozen=True)
class EulerAngles:
    """
    z-x-z Euler angles of a rotation.

    ``theta`` lies in [0, pi]; ``phi`` and ``psi`` in [0, 2 pi), of which the
    reduced range [0, pi] suffices for conjugation orbits.
    """

    theta: float
    phi: float
    psi: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.theta <= math.pi:
            raise ValueError(f"theta out of range: {self.theta}")
        for name in ("phi", "psi"):
            value = getattr(self, name)
            if not 0.0 <= value <= 2.0 * math.pi:
                raise ValueError(f"{name} out of range: {value}")

    @property
    def c(self) -> float:
        return math.cos(self.theta)


@dataclass(frozen=True)
class HornConfig:
    """
    Parameters of a Horn-problem run.

    :param alpha: Eigenvalues of the first orbit (sum 0).
    :param beta: Eigenvalues of the second orbit (sum 0).
    :param samples: Monte Carlo sample count.
    :param p_range: ``(p_lo, p_hi)``; ``None`` uses the attainable region box.
    :param q_range: ``(q_lo, q_hi)``; ``None`` uses the attainable region box.
    :param bins: Bins per axis.
    :param seed: Random seed.
    :param scan_points: phi samples per psi in the resultant zero scan.
    :param subpoints: Per-axis evaluation points for bin averages.
    :param tolerance: Largest |z| at which a Monte Carlo bin still agrees with
                      the localized density.
    """

    alpha: Tuple[float, float, float]
    beta: Tuple[float, float, float]
    samples: int = 1_000_000
    p_range: Optional[Tuple[float, float]] = None
    q_range: Optional[Tuple[float, float]] = None
    bins: int = 20
    seed: int = 0
    scan_points: int = 512
    subpoints: int = 2
    tolerance: float = 3.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", tuple(float(a) for a in self.alpha))
        object.__setattr__(self, "beta", tuple(float(b) for b in self.beta))
        for name in ("alpha", "beta"):
            values = getattr(self, name)
            if len(values) != 3:
                raise ValueError(f"{name} must have 3 eigenvalues")
            if abs(sum(values)) > 1e-12:
                raise ValueError(f"{name} must be traceless, sum={sum(values)}")
        if self.bins < 1:
            raise ValueError("bins must be >= 1")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.scan_points < 8:
            raise ValueError("scan_points must be >= 8")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be > 0")
        if self.subpoints < 1:
            raise ValueError("subpoints must be >= 1")
        for name in ("p_range", "q_range"):
            rng = getattr(self, name)
            if rng is not None:
                lo, hi = float(rng[0]), float(rng[1])
                if not lo < hi:
                    raise ValueError(f"{name} must be increasing, got {rng}")
                object.__setattr__(self, name, (lo, hi))

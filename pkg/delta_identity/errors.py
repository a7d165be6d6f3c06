"""
Error types for the delta-identity package.

Every error raised by the domain layers derives from
:class:`DeltaIdentityError`, itself a ``ValueError``, so callers that only
care about "bad input" can keep catching ``ValueError``.
"""

from __future__ import annotations

from typing import Optional, Tuple


class DeltaIdentityError(ValueError):
    """Base class for all package errors."""


class RepeatedRoot(DeltaIdentityError):
    """Two roots coincide within the configured tolerance."""

    def __init__(self, message: str, indices: Optional[Tuple[int, int]] = None) -> None:
        super().__init__(message)
        self.indices = indices


class DegreeMismatch(DeltaIdentityError):
    """A polynomial does not have the degree an operation requires."""


class DivisibilityFailure(DeltaIdentityError):
    """An exact polynomial division left a nonzero remainder."""


class ZeroGradient(DeltaIdentityError):
    """An affine function has an all-zero gradient (it is constant)."""


class ProportionalFactors(DeltaIdentityError):
    """Two factors of a factorization are scalar multiples of each other."""

    def __init__(self, i: int, j: int) -> None:
        super().__init__(f"factors {i} and {j} are proportional")
        self.pair = (i, j)


class Divergent(DeltaIdentityError):
    """
    An integral against a delta measure is infinite.

    :param pair: The pair of factor (or root) indices whose intersection
                 locus forces the divergence.
    :param reason: Human-readable explanation.
    """

    def __init__(self, pair: Tuple[int, int], reason: str = "") -> None:
        message = f"DIVERGENT (pair {pair[0]},{pair[1]})"
        if reason:
            message = f"{message}: {reason}"
        super().__init__(message)
        self.pair = pair
        self.reason = reason


class OffSupport(DeltaIdentityError):
    """A point that must lie on a support hyperplane does not."""


class DegreeCertificateFailure(DeltaIdentityError):
    """An interpolated polynomial failed its degree certificate."""


class DivergentPoint(DeltaIdentityError):
    """A density evaluation hit a tangential zero of the resultant."""

    def __init__(self, p: float, q: float, psi: float, phi: float) -> None:
        super().__init__(
            f"tangential resultant zero at psi={psi:.6g}, phi={phi:.6g} "
            f"for (p, q)=({p:.6g}, {q:.6g})"
        )
        self.p = p
        self.q = q
        self.psi = psi
        self.phi = phi


class ConfigError(DeltaIdentityError):
    """A run configuration document is malformed or incomplete."""

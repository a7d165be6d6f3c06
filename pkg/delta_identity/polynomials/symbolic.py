"""
Exact multivariate polynomials over the rationals, and the symbolic
expansion of ``J``.

:class:`MultiPoly` is a sparse map from exponent tuples to
``fractions.Fraction`` coefficients over the variables
``u_0 .. u_{|A|-1}, v_0 .. v_{|B|-1}``. It supports ring arithmetic,
evaluation and exact division by a linear factor ``x_i - x_j``.

:func:`expand_j_symbolic` brings the defining sum of ``J`` to the common
denominator ``prod_{b' < b''} (v_b' - v_b'')`` and divides it out exactly;
a nonzero remainder raises :class:`DivisibilityFailure`.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from numbers import Rational, Real
from typing import Dict, Iterable, List, Sequence, Tuple

from delta_identity.errors import DivisibilityFailure

logger = logging.getLogger(__name__)

Exponent = Tuple[int, ...]

#: Largest family size the symbolic expansion accepts.
MAX_SYMBOLIC_SIZE = 4


class MultiPoly:
    """
    Sparse polynomial with exact rational coefficients.

    :param nvars: Number of variables.
    :param terms: Mapping from exponent tuples to coefficients; zero
                  coefficients are dropped.
    :param names: Variable names used for printing.
    """

    __slots__ = ("nvars", "terms", "names")

    def __init__(
        self,
        nvars: int,
        terms: Dict[Exponent, Rational] | None = None,
        names: Sequence[str] | None = None,
    ) -> None:
        self.nvars = nvars
        self.names = tuple(names) if names is not None else tuple(f"x{i}" for i in range(nvars))
        self.terms: Dict[Exponent, Fraction] = {}
        for exp, coeff in (terms or {}).items():
            if len(exp) != nvars:
                raise ValueError(f"exponent {exp} does not match {nvars} variables")
            c = Fraction(coeff)
            if c != 0:
                self.terms[tuple(exp)] = c

    # ------------------------------------------------------------------
    # constructors
    # ------------------------------------------------------------------

    @classmethod
    def constant(cls, nvars: int, value: Rational, names: Sequence[str] | None = None) -> "MultiPoly":
        return cls(nvars, {(0,) * nvars: value}, names)

    @classmethod
    def variable(cls, nvars: int, index: int, names: Sequence[str] | None = None) -> "MultiPoly":
        exp = [0] * nvars
        exp[index] = 1
        return cls(nvars, {tuple(exp): 1}, names)

    def _new(self, terms: Dict[Exponent, Fraction]) -> "MultiPoly":
        out = MultiPoly(self.nvars, names=self.names)
        out.terms = {e: c for e, c in terms.items() if c != 0}
        return out

    # ------------------------------------------------------------------
    # arithmetic
    # ------------------------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.nvars != self.nvars:
                raise ValueError("variable count mismatch")
            return other
        return MultiPoly.constant(self.nvars, other, self.names)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        res = dict(self.terms)
        for e, c in other.terms.items():
            res[e] = res.get(e, Fraction(0)) + c
        return self._new(res)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return self._new({e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        res: Dict[Exponent, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                res[e] = res.get(e, Fraction(0)) + c1 * c2
        return self._new(res)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "MultiPoly":
        out = MultiPoly.constant(self.nvars, 1, self.names)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultiPoly):
            other = self._coerce(other)
        return self.nvars == other.nvars and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    # ------------------------------------------------------------------
    # queries
    # ------------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=0)

    def degree_in(self, index: int) -> int:
        return max((e[index] for e in self.terms), default=0)

    def __len__(self) -> int:
        return len(self.terms)

    def evaluate(self, point: Sequence[Real]) -> Real:
        """Evaluate at ``point``; exact for rational points."""
        if len(point) != self.nvars:
            raise ValueError(f"expected {self.nvars} coordinates, got {len(point)}")
        total = Fraction(0) if all(isinstance(x, Rational) for x in point) else 0.0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term = term * x ** k
            total = total + term
        return total

    # ------------------------------------------------------------------
    # division
    # ------------------------------------------------------------------

    def _split_by(self, index: int) -> Dict[int, "MultiPoly"]:
        """Coefficients of powers of variable ``index`` (as polynomials)."""
        parts: Dict[int, Dict[Exponent, Fraction]] = {}
        for e, c in self.terms.items():
            k = e[index]
            reduced = e[:index] + (0,) + e[index + 1:]
            parts.setdefault(k, {})[reduced] = c
        return {k: self._new(t) for k, t in parts.items()}

    def divmod_linear(self, i: int, j: int) -> Tuple["MultiPoly", "MultiPoly"]:
        """
        Divide by ``x_i - x_j`` (monic in ``x_i``) by synthetic division.

        :return: ``(quotient, remainder)`` with the remainder free of ``x_i``.
        """
        if i == j:
            raise ValueError("linear factor needs two distinct variables")
        parts = self._split_by(i)
        top = max(parts, default=0)
        xi = MultiPoly.variable(self.nvars, i, self.names)
        xj = MultiPoly.variable(self.nvars, j, self.names)
        zero = MultiPoly(self.nvars, names=self.names)
        quotient = zero
        carry = zero
        for k in range(top, 0, -1):
            carry = parts.get(k, zero) + xj * carry
            quotient = quotient + carry * xi ** (k - 1)
        remainder = parts.get(0, zero) + xj * carry
        return quotient, remainder

    def exact_div_linear(self, i: int, j: int) -> "MultiPoly":
        """
        Exact quotient by ``x_i - x_j``.

        :raises DivisibilityFailure: If the remainder is nonzero.
        """
        quotient, remainder = self.divmod_linear(i, j)
        if not remainder.is_zero():
            raise DivisibilityFailure(
                f"{self.names[i]} - {self.names[j]} does not divide the numerator "
                f"({len(remainder)} remainder terms)"
            )
        return quotient

    # ------------------------------------------------------------------
    # printing
    # ------------------------------------------------------------------

    def sorted_terms(self) -> List[Tuple[Exponent, Fraction]]:
        """
        Terms in graded lexicographic order: higher total degree first, ties
        broken lexicographically with earlier variables (``u`` before ``v``)
        dominant.
        """
        return sorted(self.terms.items(), key=lambda item: (-sum(item[0]), tuple(-k for k in item[0])))

    def _monomial(self, exp: Exponent) -> str:
        parts = []
        for name, k in zip(self.names, exp):
            if k == 1:
                parts.append(name)
            elif k > 1:
                parts.append(f"{name}^{k}")
        return "*".join(parts)

    def to_string(self) -> str:
        """Canonical text form, e.g. ``-u0 + v0*v1 - 1/2``."""
        if not self.terms:
            return "0"
        chunks = []
        for idx, (exp, coeff) in enumerate(self.sorted_terms()):
            mono = self._monomial(exp)
            mag = abs(coeff)
            if mono:
                body = mono if mag == 1 else f"{mag}*{mono}"
            else:
                body = str(mag)
            if idx == 0:
                chunks.append(f"-{body}" if coeff < 0 else body)
            else:
                chunks.append(f" - {body}" if coeff < 0 else f" + {body}")
        return "".join(chunks)

    def __repr__(self) -> str:
        return f"MultiPoly({self.to_string()})"


def root_variable_names(size_a: int, size_b: int) -> Tuple[str, ...]:
    return tuple(f"u{i}" for i in range(size_a)) + tuple(f"v{j}" for j in range(size_b))


def _product(polys: Iterable[MultiPoly], nvars: int, names: Sequence[str]) -> MultiPoly:
    out = MultiPoly.constant(nvars, 1, names)
    for p in polys:
        out = out * p
    return out


def expand_j_symbolic(size_a: int, size_b: int, a: Rational = 1, b: Rational = 1) -> MultiPoly:
    """
    Exact polynomial expansion of ``J(u, v)``.

    :param size_a: ``|A|`` (>= 1).
    :param size_b: ``|B|`` (>= 1).
    :param a: Leading coefficient of ``P`` (nonzero rational).
    :param b: Leading coefficient of ``Q`` (nonzero rational).
    :raises ValueError: On sizes out of range or zero leading coefficients.
    :raises DivisibilityFailure: If the common-denominator numerator is not
                                 divisible, which would contradict polynomiality.
    """
    if size_a < 1 or size_b < 1:
        raise ValueError("family sizes must be >= 1")
    if size_a > MAX_SYMBOLIC_SIZE or size_b > MAX_SYMBOLIC_SIZE:
        raise ValueError(f"family sizes above {MAX_SYMBOLIC_SIZE} are not supported")
    a = Fraction(a)
    b = Fraction(b)
    if a == 0 or b == 0:
        raise ValueError("leading coefficients must be nonzero")

    logger.info("Expanding J symbolically for |A|=%d, |B|=%d", size_a, size_b)
    nvars = size_a + size_b
    names = root_variable_names(size_a, size_b)
    u = [MultiPoly.variable(nvars, i, names) for i in range(size_a)]
    v = [MultiPoly.variable(nvars, size_a + j, names) for j in range(size_b)]

    # N_b = prod_a (v_b - u_a)
    n_factors = [_product((vb - ua for ua in u), nvars, names) for vb in v]
    pairs = [(j, k) for j in range(size_b) for k in range(j + 1, size_b)]

    numerator = MultiPoly(nvars, names=names)
    for bp in range(size_b):
        # prod_{b'' != b'} (v_b' - v_b'') = (-1)**#{b'' < b'} * prod of D-factors touching b'
        sign = -1 if bp % 2 else 1
        others = _product((n_factors[j] for j in range(size_b) if j != bp), nvars, names)
        complement = _product(
            (v[j] - v[k] for (j, k) in pairs if bp not in (j, k)), nvars, names
        )
        numerator = numerator + sign * others * complement
    logger.debug("J numerator has %d terms before division", len(numerator))

    quotient = numerator
    for j, k in pairs:
        quotient = quotient.exact_div_linear(size_a + j, size_a + k)

    result = quotient * (b ** (size_a - 1) * a ** (size_b - 1))
    logger.info("J expansion complete: %d terms, total degree %d", len(result), result.total_degree)
    return result

"""
Positive Borel test functions integrated against delta measures.

Four kinds are supported:

- :class:`GaussianTest`: isotropic Gaussian density, nowhere zero.
- :class:`CompactBump`: ``prod_i max(0, 1 - ((y_i - c_i)/w)**2)**2``,
  supported on the closed box of half-width ``w``.
- :class:`TruncatedGaussian`: Gaussian density times the box indicator.
- :class:`IndicatorBox`: the indicator of the box itself, which turns an
  integral into the measure of the box.

All evaluate on a single point or a stack of points (last axis is R^n).
"""

from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Box = Tuple[np.ndarray, np.ndarray]


class TestFunction(ABC):
    """
    Strategy interface for test functions.

    Every kind has a center; box-supported kinds also have a half-width and
    report their support through :meth:`support_box`.
    """

    __test__ = False  # not a pytest class

    kind: str = "abstract"

    def __init__(self, center: Sequence[float]) -> None:
        self.center = np.asarray(center, dtype=float).reshape(-1)
        if self.center.size == 0:
            raise ValueError("test function center must have dimension >= 1")

    @property
    def dimension(self) -> int:
        return int(self.center.size)

    @abstractmethod
    def __call__(self, y: np.ndarray) -> np.ndarray:
        """Evaluate at ``y`` of shape ``(..., n)``."""
        raise NotImplementedError

    def support_box(self) -> Optional[Box]:
        """``(lo, hi)`` of the closed support box, or ``None`` if unbounded."""
        return None

    @property
    def nowhere_zero(self) -> bool:
        return self.support_box() is None

    @abstractmethod
    def permuted(self, order: Sequence[int]) -> "TestFunction":
        """Same function with coordinates reordered; new coordinate ``k`` is old coordinate ``order[k]``."""
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.kind, "center": [float(c) for c in self.center]}

    def _check(self, y: np.ndarray) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dimension:
            raise ValueError(
                f"{self.kind} test function is {self.dimension}-dimensional, "
                f"got points of dimension {y.shape[-1]}"
            )
        return y


class GaussianTest(TestFunction):
    """
    Isotropic Gaussian density ``N(center, width**2 I)``; integrates to 1.

    :param center: Mean vector.
    :param width: Standard deviation (> 0).
    """

    kind = "gaussian"

    def __init__(self, center: Sequence[float], width: float = 1.0) -> None:
        super().__init__(center)
        if not width > 0:
            raise ValueError("Gaussian width must be > 0")
        self.width = float(width)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        r2 = np.sum((y - self.center) ** 2, axis=-1)
        norm = (2.0 * math.pi * self.width**2) ** (-0.5 * self.dimension)
        return norm * np.exp(-0.5 * r2 / self.width**2)

    def permuted(self, order: Sequence[int]) -> "GaussianTest":
        return GaussianTest(self.center[list(order)], self.width)

    def describe(self) -> dict:
        return {**super().describe(), "width": self.width}


class BoxSupported(TestFunction):
    """Shared behaviour of test functions supported on a centered box."""

    def __init__(self, center: Sequence[float], half_width: float) -> None:
        super().__init__(center)
        if not half_width > 0:
            raise ValueError("half-width must be > 0")
        self.half_width = float(half_width)

    def support_box(self) -> Box:
        return self.center - self.half_width, self.center + self.half_width

    def inside(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        return np.all(np.abs(y - self.center) <= self.half_width, axis=-1)

    def describe(self) -> dict:
        return {**super().describe(), "half_width": self.half_width}


class CompactBump(BoxSupported):
    """
    ``prod_i max(0, 1 - ((y_i - c_i)/w)**2)**2``: C^1, positive on the open box.
    """

    kind = "bump"

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        z = (y - self.center) / self.half_width
        return np.prod(np.maximum(0.0, 1.0 - z**2) ** 2, axis=-1)

    def permuted(self, order: Sequence[int]) -> "CompactBump":
        return CompactBump(self.center[list(order)], self.half_width)


class TruncatedGaussian(BoxSupported):
    """
    Gaussian density ``N(center, width**2 I)`` restricted to the box of
    half-width ``half_width``.
    """

    kind = "truncated-gaussian"

    def __init__(self, center: Sequence[float], width: float, half_width: float) -> None:
        super().__init__(center, half_width)
        if not width > 0:
            raise ValueError("Gaussian width must be > 0")
        self.width = float(width)

    def __call__(self, y: np.ndarray) -> np.ndarray:
        y = self._check(y)
        r2 = np.sum((y - self.center) ** 2, axis=-1)
        norm = (2.0 * math.pi * self.width**2) ** (-0.5 * self.dimension)
        return np.where(self.inside(y), norm * np.exp(-0.5 * r2 / self.width**2), 0.0)

    def permuted(self, order: Sequence[int]) -> "TruncatedGaussian":
        return TruncatedGaussian(self.center[list(order)], self.width, self.half_width)

    def describe(self) -> dict:
        return {**super().describe(), "width": self.width}


class IndicatorBox(BoxSupported):
    """Indicator of the closed box; integrating it measures the box."""

    kind = "indicator"

    def __call__(self, y: np.ndarray) -> np.ndarray:
        return self.inside(y).astype(float)

    def permuted(self, order: Sequence[int]) -> "IndicatorBox":
        return IndicatorBox(self.center[list(order)], self.half_width)


def make_test_function(params: dict) -> TestFunction:
    """
    Build a test function from a configuration mapping.

    ``{"kind": "gaussian", "center": [...], "width": 1.0}`` and the analogous
    ``bump`` / ``truncated-gaussian`` / ``indicator`` forms.

    :raises ValueError: On an unknown kind or missing parameters.
    """
    kind = params.get("kind")
    center = params.get("center")
    if center is None:
        raise ValueError("test function needs a center")
    if kind == GaussianTest.kind:
        return GaussianTest(center, params.get("width", 1.0))
    if kind == CompactBump.kind:
        return CompactBump(center, params["half_width"])
    if kind == TruncatedGaussian.kind:
        return TruncatedGaussian(center, params.get("width", 1.0), params["half_width"])
    if kind == IndicatorBox.kind:
        return IndicatorBox(center, params["half_width"])
    raise ValueError(f"unknown test function kind: {kind!r}")

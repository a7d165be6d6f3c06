"""
Coordinate charts on affine hyperplanes.

A :class:`HyperplaneChart` realizes ``delta(f)`` for affine ``f`` as surface
Lebesgue measure on ``{f = 0}`` times ``1 / |grad f|``: a point on the
hyperplane plus an orthonormal basis of its direction space.

A :class:`GraphChart` writes the hyperplane as a graph over the coordinates
other than the one with the largest gradient entry; in those coordinates
``delta(f)`` is plain Lebesgue measure times ``1 / |grad_k f|``, and box
supports map to boxes, which suits adaptive quadrature.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from delta_identity.models import AffineFunction

logger = logging.getLogger(__name__)

_GS_DROP = 1e-10


def _unit_gradient(f: AffineFunction) -> Tuple[np.ndarray, float]:
    g = f.grad
    norm = float(np.linalg.norm(g))
    return g / norm, norm


@dataclass(frozen=True)
class HyperplaneChart:
    """
    Orthonormal chart on ``{f_j = 0}``.

    :param index: Factor index ``j`` the chart belongs to.
    :param point: A point on the hyperplane.
    :param basis: Array ``(n, n-1)`` whose columns are an orthonormal basis
                  of the direction space.
    :param density: ``1 / |grad f_j|``.
    """

    index: int
    point: np.ndarray
    basis: np.ndarray
    density: float

    @property
    def dimension(self) -> int:
        return int(self.basis.shape[1])

    def embed(self, s: np.ndarray) -> np.ndarray:
        """Map chart coordinates ``(..., n-1)`` to points ``(..., n)``."""
        return self.point + np.asarray(s, dtype=float) @ self.basis.T

    def coordinates(self, y: np.ndarray) -> np.ndarray:
        """Orthogonal projection of points onto chart coordinates."""
        return (np.asarray(y, dtype=float) - self.point) @ self.basis


def build_chart(
    f: AffineFunction,
    index: int = 0,
    anchor: Optional[Sequence[float]] = None,
    start_order: Optional[Sequence[int]] = None,
) -> HyperplaneChart:
    """
    Build an orthonormal chart by Gram-Schmidt on the unit normal followed by
    the standard basis vectors.

    :param f: Affine function with nonzero gradient.
    :param index: Factor index recorded on the chart.
    :param anchor: Point projected orthogonally onto the hyperplane to give the
                   chart origin; defaults to the origin of R^n.
    :param start_order: Order in which standard basis vectors are fed to
                        Gram-Schmidt; defaults to ``0 .. n-1``. Different
                        orders give different (equally valid) bases.
    """
    normal, norm = _unit_gradient(f)
    n = f.dimension
    anchor_vec = np.zeros(n) if anchor is None else np.asarray(anchor, dtype=float)
    point = anchor_vec - (float(f(anchor_vec)) / norm) * normal

    order = list(range(n)) if start_order is None else list(start_order)
    accepted = [normal]
    for k in order:
        e = np.zeros(n)
        e[k] = 1.0
        for b in accepted:
            e = e - (e @ b) * b
        length = float(np.linalg.norm(e))
        if length > _GS_DROP:
            accepted.append(e / length)
        if len(accepted) == n:
            break
    basis = np.column_stack(accepted[1:]) if n > 1 else np.zeros((1, 0))
    logger.debug("Built chart for factor %d in R^%d (|grad|=%.6g)", index, n, norm)
    return HyperplaneChart(index=index, point=point, basis=basis, density=1.0 / norm)


@dataclass(frozen=True)
class GraphChart:
    """
    ``{f = 0}`` as the graph ``y_k = -(offset + sum_{i != k} g_i y_i) / g_k``.

    :param index: Factor index.
    :param solve_axis: The coordinate ``k`` solved for.
    :param free_axes: The remaining coordinates, in increasing order.
    :param density: ``1 / |g_k|``.
    """

    index: int
    f: AffineFunction
    solve_axis: int
    free_axes: Tuple[int, ...]
    density: float

    def embed(self, free: np.ndarray) -> np.ndarray:
        """Map free coordinates ``(..., n-1)`` to points ``(..., n)``."""
        free = np.asarray(free, dtype=float)
        g = self.f.grad
        n = self.f.dimension
        y = np.zeros(free.shape[:-1] + (n,))
        for pos, axis in enumerate(self.free_axes):
            y[..., axis] = free[..., pos]
        rest = free @ g[list(self.free_axes)] if self.free_axes else 0.0
        y[..., self.solve_axis] = -(self.f.offset + rest) / g[self.solve_axis]
        return y

    def solve_interval(
        self,
        inner_axis_pos: int,
        fixed: Sequence[float],
        lo: np.ndarray,
        hi: np.ndarray,
    ) -> Tuple[float, float]:
        """
        Range of the free coordinate at position ``inner_axis_pos`` for which
        the solved coordinate stays in ``[lo_k, hi_k]``, the others being
        ``fixed`` (aligned with ``free_axes``, entry at ``inner_axis_pos``
        ignored). Intersected with ``[lo, hi]`` of that coordinate; empty
        ranges collapse to a point.
        """
        g = self.f.grad
        k = self.solve_axis
        axis = self.free_axes[inner_axis_pos]
        rest = self.f.offset + sum(
            g[a] * fixed[pos]
            for pos, a in enumerate(self.free_axes)
            if pos != inner_axis_pos
        )
        lower, upper = float(lo[axis]), float(hi[axis])
        coef = -g[axis] / g[k]
        base = -rest / g[k]
        if coef != 0.0:
            # y_k = base + coef * t must stay in [lo_k, hi_k]
            t1 = (lo[k] - base) / coef
            t2 = (hi[k] - base) / coef
            lower = max(lower, min(t1, t2))
            upper = min(upper, max(t1, t2))
        elif not lo[k] <= base <= hi[k]:
            upper = lower
        if upper < lower:
            upper = lower
        return lower, upper


def build_graph_chart(f: AffineFunction, index: int = 0) -> GraphChart:
    """
    Graph chart solving for the coordinate with the largest ``|g_k|``
    (smallest index on ties).
    """
    g = f.grad
    k = int(np.argmax(np.abs(g)))
    free = tuple(i for i in range(f.dimension) if i != k)
    return GraphChart(index=index, f=f, solve_axis=k, free_axes=free, density=1.0 / abs(g[k]))

"""
Tests for hyperplane charts.

These tests verify that:

- Orthonormal charts embed onto the hyperplane with orthonormal columns.
- Graph charts solve for the dominant coordinate.
- Interval solving keeps the solved coordinate inside the box.
"""

from __future__ import annotations

import numpy as np
import pytest

from delta_identity.measures.charts import build_chart, build_graph_chart
from delta_identity.models import AffineFunction


def test_orthonormal_chart_lies_on_hyperplane(rng):
    f = AffineFunction((1.0, -2.0, 0.5), 0.3)
    chart = build_chart(f, anchor=[1.0, 1.0, 1.0])
    assert chart.dimension == 2
    assert chart.basis.T @ chart.basis == pytest.approx(np.eye(2), abs=1e-12)
    points = chart.embed(rng.normal(size=(5, 2)))
    assert f(points) == pytest.approx(np.zeros(5), abs=1e-12)
    assert chart.density == pytest.approx(1.0 / np.linalg.norm([1.0, -2.0, 0.5]))


def test_chart_origin_is_projection_of_anchor():
    f = AffineFunction((0.0, 2.0), -2.0)
    chart = build_chart(f, anchor=[3.0, 5.0])
    assert list(chart.point) == pytest.approx([3.0, 1.0])


def test_start_order_changes_basis_not_plane():
    f = AffineFunction((1.0, 1.0, 1.0), 0.0)
    one = build_chart(f, start_order=[0, 1, 2])
    other = build_chart(f, start_order=[2, 1, 0])
    assert not np.allclose(one.basis, other.basis)
    # both span the orthogonal complement of the normal
    normal = np.ones(3) / np.sqrt(3.0)
    assert normal @ one.basis == pytest.approx(np.zeros(2), abs=1e-12)
    assert normal @ other.basis == pytest.approx(np.zeros(2), abs=1e-12)


def test_graph_chart_solves_dominant_axis():
    f = AffineFunction((0.5, -4.0, 1.0), 2.0)
    chart = build_graph_chart(f)
    assert chart.solve_axis == 1
    assert chart.free_axes == (0, 2)
    assert chart.density == pytest.approx(0.25)
    y = chart.embed(np.array([1.0, -1.0]))
    assert float(f(y)) == pytest.approx(0.0, abs=1e-12)


def test_solve_interval_respects_box():
    f = AffineFunction((1.0, 2.0), 0.0)
    chart = build_graph_chart(f)
    lo, hi = np.array([-1.0, -1.0]), np.array([1.0, 1.0])
    # y1 = -y0 / 2 stays in [-1, 1] for all y0 in [-1, 1]
    assert chart.solve_interval(0, [0.0], lo, hi) == pytest.approx((-1.0, 1.0))

    f = AffineFunction((1.0, 2.0), 3.0)
    chart = build_graph_chart(f)
    # y1 = -(3 + y0) / 2 lies in [-1, 1] only for y0 in [-1, -1]
    low, high = chart.solve_interval(0, [0.0], lo, hi)
    assert low == pytest.approx(-1.0)
    assert high == pytest.approx(-1.0)

"""
Tests for the Monte Carlo Horn histogram.

These tests verify that:

- The histogram is a normalized density with binomial errors.
- A point-mass law lands in a single bin, away from any edge.
- Results do not depend on the worker count.
"""

from __future__ import annotations

import numpy as np
import pytest

from delta_identity.horn.histogram import CHUNK, centered_range, grid_edges, mc_histogram
from delta_identity.models import HornConfig

POINT = HornConfig(alpha=(1.0, -1.0, 0.0), beta=(0.0, 0.0, 0.0), samples=5_000, bins=5, seed=3)


def test_centered_range_puts_center_mid_bin():
    lo, hi = centered_range(-1.0, 0.1, 4)
    assert hi - lo == pytest.approx(0.2)
    edges = np.linspace(lo, hi, 5)
    middle = 0.5 * (edges[2] + edges[3])
    assert middle == pytest.approx(-1.0)


def test_grid_edges_respect_configured_ranges():
    cfg = HornConfig(alpha=(1.0, 0.0, -1.0), beta=(1.0, 0.0, -1.0), bins=4, p_range=(-3.0, -1.0), q_range=(-1.0, 1.0))
    p_edges, q_edges = grid_edges(cfg)
    assert p_edges.tolist() == pytest.approx([-3.0, -2.5, -2.0, -1.5, -1.0])
    assert q_edges.tolist() == pytest.approx([-1.0, -0.5, 0.0, 0.5, 1.0])


def test_histogram_is_normalized():
    cfg = HornConfig(alpha=(1.0, 0.0, -1.0), beta=(1.0, 0.0, -1.0), samples=20_000, bins=6, seed=11)
    grid = mc_histogram(cfg)
    assert grid.values.shape == (6, 6)
    assert grid.total_mass == pytest.approx(1.0, abs=1e-12)
    assert np.all(grid.stderr >= 0.0)
    assert grid.metadata["discriminant_violations"] == 0


def test_point_mass_occupies_one_bin():
    grid = mc_histogram(POINT)
    occupied = np.argwhere(grid.values > 0.0)
    assert occupied.tolist() == [[2, 2]]
    assert grid.values[2, 2] == pytest.approx(1.0 / grid.bin_area)
    assert grid.p_centers[2] == pytest.approx(-1.0)
    assert grid.q_centers[2] == pytest.approx(0.0, abs=1e-12)


def test_seeded_runs_repeat():
    a = mc_histogram(POINT)
    b = mc_histogram(POINT)
    assert np.array_equal(a.values, b.values)


def test_worker_count_does_not_change_result():
    cfg = HornConfig(
        alpha=(2.0, -0.5, -1.5),
        beta=(1.0, 0.0, -1.0),
        samples=CHUNK + 25_000,
        bins=5,
        seed=7,
    )
    serial = mc_histogram(cfg, workers=1)
    pooled = mc_histogram(cfg, workers=2)
    assert np.array_equal(serial.values, pooled.values)
    assert np.array_equal(serial.stderr, pooled.stderr)

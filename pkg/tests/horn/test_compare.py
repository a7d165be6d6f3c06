"""
Tests for the Horn density comparison and its CSV output.

These tests verify that:

- z-scores use the Monte Carlo error with a one-count floor.
- Flagged bins are excluded from the pass fraction.
- The agreement threshold on |z| is configurable.
- Grids on different edges are rejected.
- CSV files carry the documented columns, one row per bin.
- The point-mass demo passes end to end.
"""

from __future__ import annotations

import csv

import numpy as np
import pytest

from delta_identity.horn.compare import (
    COMPARE_COLUMNS,
    GRID_COLUMNS,
    compare_grids,
    compare_report,
    comparison_summary,
    write_comparison_csv,
    write_grid_csv,
)
from delta_identity.horn.histogram import HornGrid
from delta_identity.models import HornConfig

EDGES = np.array([0.0, 1.0, 2.0])


def _mc(values, stderr, samples=100):
    return HornGrid(
        EDGES, EDGES, np.array(values, dtype=float), np.array(stderr, dtype=float),
        method="monte-carlo", metadata={"samples": samples},
    )


def _loc(values, flagged=None):
    flags = np.zeros((2, 2), dtype=bool) if flagged is None else np.array(flagged)
    return HornGrid(EDGES, EDGES, np.array(values, dtype=float), None, flags, "localized", {})


def test_z_scores_and_pass_fraction():
    mc = _mc([[0.25, 0.25], [0.25, 0.25]], [[0.05, 0.05], [0.05, 0.05]])
    loc = _loc([[0.25, 0.30], [0.25, 0.60]], flagged=[[False, False], [False, True]])
    report = compare_grids(mc, loc)

    z = [row.z for row in report.rows]
    assert z[0] == pytest.approx(0.0)
    assert z[1] == pytest.approx(-1.0)
    assert z[3] is None
    assert report.flagged_bins == [(1, 1)]
    assert report.pass_fraction == pytest.approx(1.0)
    assert report.passed


def test_failing_bins_lower_pass_fraction():
    mc = _mc([[0.25, 0.25], [0.25, 0.25]], [[0.01, 0.01], [0.01, 0.01]])
    loc = _loc([[0.25, 0.25], [0.25, 0.50]])
    report = compare_grids(mc, loc)
    assert report.pass_fraction == pytest.approx(0.75)
    assert report.severity == "FAIL"


def test_wider_z_limit_accepts_more_bins():
    mc = _mc([[0.25, 0.25], [0.25, 0.25]], [[0.01, 0.01], [0.01, 0.01]])
    loc = _loc([[0.25, 0.25], [0.25, 0.50]])
    report = compare_grids(mc, loc, z_limit=30.0)
    assert report.pass_fraction == pytest.approx(1.0)
    assert comparison_summary(report)["z_limit"] == 30.0


def test_empty_bins_use_one_count_floor():
    mc = _mc([[0.0, 0.0], [0.0, 1.0]], [[0.0, 0.0], [0.0, 0.0]], samples=50)
    loc = _loc([[0.0, 0.0], [0.0, 1.0]])
    report = compare_grids(mc, loc)
    assert report.rows[0].mc_stderr == pytest.approx(1.0 / 50)


def test_mismatched_edges_rejected():
    mc = _mc([[0.25, 0.25], [0.25, 0.25]], [[0.05, 0.05], [0.05, 0.05]])
    other = HornGrid(EDGES + 0.5, EDGES, np.zeros((2, 2)), None, np.zeros((2, 2), dtype=bool), "localized")
    with pytest.raises(ValueError, match="edges"):
        compare_grids(mc, other)


def test_csv_files(tmp_path):
    mc = _mc([[0.25, 0.25], [0.25, 0.25]], [[0.05, 0.05], [0.05, 0.05]])
    loc = _loc([[0.25, 0.30], [0.25, 0.60]], flagged=[[False, False], [False, True]])
    report = compare_grids(mc, loc)

    write_grid_csv(mc, tmp_path / "mc_grid.csv")
    write_grid_csv(loc, tmp_path / "localized_grid.csv")
    write_comparison_csv(report, tmp_path / "compare.csv")

    with (tmp_path / "mc_grid.csv").open(newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == GRID_COLUMNS
    assert len(rows) == 5
    assert rows[1] == ["0.0", "1.0", "0.0", "1.0", "0.25", "0.05", "0"]

    with (tmp_path / "localized_grid.csv").open(newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[1][5] == ""
    assert rows[4][6] == "1"

    with (tmp_path / "compare.csv").open(newline="") as handle:
        rows = list(csv.reader(handle))
    assert tuple(rows[0]) == COMPARE_COLUMNS
    assert rows[4][7] == ""
    assert rows[4][8] == "1"


def test_summary_fields():
    mc = _mc([[0.25, 0.25], [0.25, 0.25]], [[0.05, 0.05], [0.05, 0.05]])
    report = compare_grids(mc, _loc([[0.25, 0.30], [0.25, 0.25]]))
    summary = comparison_summary(report)
    assert summary["severity"] == "PASS"
    assert summary["bins"] == 4
    assert summary["max_abs_z"] == pytest.approx(1.0)
    assert summary["mc_mass"] == pytest.approx(1.0)


def test_point_mass_demo_passes():
    cfg = HornConfig(alpha=(1.0, -1.0, 0.0), beta=(0.0, 0.0, 0.0), samples=10_000, bins=5, seed=1)
    report = compare_report(cfg)
    assert report.passed
    assert report.pass_fraction == pytest.approx(1.0)
    assert report.mc.total_mass == pytest.approx(1.0)
    assert report.localized.total_mass == pytest.approx(1.0)

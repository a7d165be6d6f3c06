"""
Bin-by-bin comparison of the Monte Carlo and resultant-localized densities,
plus CSV emission of both grids and of the comparison table.

Numbers are written with ``repr`` (shortest round-trip form) so reruns with
the same seed produce byte-identical files.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from delta_identity.horn.histogram import HornGrid, mc_histogram
from delta_identity.horn.localized import localized_grid
from delta_identity.models import HornConfig

logger = logging.getLogger(__name__)

#: Default largest |z| of an agreeing bin.
Z_LIMIT = 3.0

#: Share of unflagged bins that must agree.
PASS_FRACTION = 0.95

GRID_COLUMNS = ("p_lo", "p_hi", "q_lo", "q_hi", "value", "stderr", "flag")
COMPARE_COLUMNS = ("p_lo", "p_hi", "q_lo", "q_hi", "mc", "mc_stderr", "localized", "z", "flag")


@dataclass
class BinComparison:
    """One row of the comparison table; ``z`` is ``None`` on flagged bins."""

    p_lo: float
    p_hi: float
    q_lo: float
    q_hi: float
    mc: float
    mc_stderr: float
    localized: float
    z: Optional[float]
    flagged: bool


@dataclass
class ComparisonReport:
    """
    Outcome of :func:`compare_report`.

    :param mc: Monte Carlo grid.
    :param localized: Localized grid.
    :param rows: Per-bin comparison, ``p`` major.
    :param pass_fraction: Share of unflagged bins with ``|z| <= z_limit``.
    :param flagged_bins: ``(p_bin, q_bin)`` of bins with a tangential zero.
    :param z_limit: Largest |z| of an agreeing bin.
    """

    mc: HornGrid
    localized: HornGrid
    rows: List[BinComparison] = field(default_factory=list)
    pass_fraction: float = 1.0
    flagged_bins: List[Tuple[int, int]] = field(default_factory=list)
    z_limit: float = Z_LIMIT

    @property
    def passed(self) -> bool:
        return self.pass_fraction >= PASS_FRACTION

    @property
    def severity(self) -> str:
        return "PASS" if self.passed else "FAIL"


def _stderr_floor(grid: HornGrid) -> float:
    # one-count resolution; keeps empty bins from getting a zero error
    return 1.0 / (grid.metadata["samples"] * grid.bin_area)


def compare_grids(mc: HornGrid, localized: HornGrid, z_limit: float = Z_LIMIT) -> ComparisonReport:
    """
    z-scores ``(mc - localized) / sigma_mc`` per bin.

    :param mc: Grid from :func:`mc_histogram`.
    :param localized: Grid from :func:`localized_grid` on the same edges.
    :param z_limit: Largest |z| of an agreeing bin.
    :raises ValueError: If the grids do not share their edges.
    """
    if not (np.array_equal(mc.p_edges, localized.p_edges) and np.array_equal(mc.q_edges, localized.q_edges)):
        raise ValueError("grids must share their bin edges")
    floor = _stderr_floor(mc)
    flagged = localized.flagged if localized.flagged is not None else np.zeros(mc.values.shape, dtype=bool)
    report = ComparisonReport(mc=mc, localized=localized, z_limit=z_limit)
    agreeing = 0
    checked = 0
    bins_p, bins_q = mc.values.shape
    for i in range(bins_p):
        for j in range(bins_q):
            se = max(float(mc.stderr[i, j]), floor)
            is_flagged = bool(flagged[i, j])
            z = None
            if is_flagged:
                report.flagged_bins.append((i, j))
            else:
                z = (float(mc.values[i, j]) - float(localized.values[i, j])) / se
                checked += 1
                agreeing += abs(z) <= z_limit
            report.rows.append(
                BinComparison(
                    p_lo=float(mc.p_edges[i]),
                    p_hi=float(mc.p_edges[i + 1]),
                    q_lo=float(mc.q_edges[j]),
                    q_hi=float(mc.q_edges[j + 1]),
                    mc=float(mc.values[i, j]),
                    mc_stderr=se,
                    localized=float(localized.values[i, j]),
                    z=z,
                    flagged=is_flagged,
                )
            )
    report.pass_fraction = agreeing / checked if checked else 1.0
    return report


def compare_report(cfg: HornConfig, workers: int = 1) -> ComparisonReport:
    """
    Run both density estimates over the configured grid and compare them.

    :param cfg: Run parameters.
    :param workers: Process count for both estimates.
    """
    mc = mc_histogram(cfg, workers)
    localized = localized_grid(cfg, workers)
    report = compare_grids(mc, localized, cfg.tolerance)
    log = logger.info if report.passed else logger.warning
    log(
        "Horn comparison %s: %.1f%% of %d unflagged bins within |z| <= %g, %d flagged",
        report.severity,
        100.0 * report.pass_fraction,
        len(report.rows) - len(report.flagged_bins),
        report.z_limit,
        len(report.flagged_bins),
    )
    return report


def comparison_summary(report: ComparisonReport) -> Dict[str, Any]:
    """Scalar summary of a comparison, suitable for printing as JSON."""
    finite = [abs(r.z) for r in report.rows if r.z is not None]
    return {
        "severity": report.severity,
        "pass_fraction": report.pass_fraction,
        "z_limit": report.z_limit,
        "bins": len(report.rows),
        "flagged_bins": [list(b) for b in report.flagged_bins],
        "max_abs_z": max(finite) if finite else None,
        "mc_mass": report.mc.total_mass,
        "localized_mass": report.localized.total_mass,
    }


# ----------------------------------------------------------------------
# CSV output
# ----------------------------------------------------------------------


def _fmt(value: Optional[float]) -> str:
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return ""
    return repr(float(value))


def write_grid_csv(grid: HornGrid, path: Path) -> None:
    """Write ``p_lo,p_hi,q_lo,q_hi,value,stderr,flag`` rows, ``p`` major."""
    bins_p, bins_q = grid.values.shape
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(GRID_COLUMNS)
        for i in range(bins_p):
            for j in range(bins_q):
                stderr = None if grid.stderr is None else grid.stderr[i, j]
                flag = bool(grid.flagged[i, j]) if grid.flagged is not None else False
                writer.writerow(
                    [
                        _fmt(grid.p_edges[i]),
                        _fmt(grid.p_edges[i + 1]),
                        _fmt(grid.q_edges[j]),
                        _fmt(grid.q_edges[j + 1]),
                        _fmt(grid.values[i, j]),
                        _fmt(stderr),
                        int(flag),
                    ]
                )
    logger.info("Wrote %s grid to %s", grid.method, path)


def write_comparison_csv(report: ComparisonReport, path: Path) -> None:
    """Write the per-bin comparison table."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(COMPARE_COLUMNS)
        for row in report.rows:
            writer.writerow(
                [
                    _fmt(row.p_lo),
                    _fmt(row.p_hi),
                    _fmt(row.q_lo),
                    _fmt(row.q_hi),
                    _fmt(row.mc),
                    _fmt(row.mc_stderr),
                    _fmt(row.localized),
                    _fmt(row.z),
                    int(row.flagged),
                ]
            )
    logger.info("Wrote comparison table to %s", path)

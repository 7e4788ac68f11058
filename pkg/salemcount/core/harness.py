"""
Empirical-versus-predicted tables.

Each table row is a dataclass whose field names are the CSV header, so the
output of ``write_rows`` can go straight into an external plotter.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import logging
import math
from dataclasses import asdict, dataclass, fields
from fractions import Fraction
from typing import IO, Any, Dict, Iterable, List, Optional, Sequence

import numpy as np

from salemcount.core.asymptotics import integrate_rho, omega_leading
from salemcount.core.census import IntervalSpec, empirical_tuple_count
from salemcount.core.census_store import get_census
from salemcount.core.config import CensusConfig, QuadratureSpec
from salemcount.core.error_handling import BoundTooSmall, EmptyCensus, InputError
from salemcount.core.kernel import rho_batch

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CountRow:
    H: Fraction
    empirical: int
    predicted: float
    residual: float
    residual_over_Hm: float

    @classmethod
    def build(cls, m: int, H: Fraction, empirical: int, predicted: float) -> "CountRow":
        residual = empirical - predicted
        return cls(H=H, empirical=empirical, predicted=predicted, residual=residual,
                   residual_over_Hm=residual / float(H) ** m)


@dataclass(frozen=True)
class HistogramRow:
    bin_lo: float
    bin_hi: float
    empirical_mass: float
    predicted_mass: float


@dataclass(frozen=True)
class ReducibleRow:
    H: Fraction
    reducible: int
    reducible_over_Hm: float


@dataclass(frozen=True)
class DensityRow:
    theta: tuple
    rho: float


def _check_grid(H_grid: Sequence[Fraction]) -> List[Fraction]:
    grid = [Fraction(h) for h in H_grid]
    for h in grid:
        if h <= 1:
            raise BoundTooSmall("Every bound must exceed 1", additional_context={"H": str(h)})
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise InputError("Bounds must be strictly ascending", additional_context={"bounds": [str(h) for h in grid]})
    return grid


def census_table(
    m: int,
    H_grid: Sequence[Fraction],
    cache_dir: Optional[str] = None,
    cfg: Optional[CensusConfig] = None,
) -> List[CountRow]:
    """Irreducible counts against omega_m H^{m+1}."""
    omega = float(omega_leading(m))
    rows = []
    for h in _check_grid(H_grid):
        summary = get_census(m, h, cache_dir, cfg)
        rows.append(CountRow.build(m, h, summary.irreducible_count, omega * float(h) ** (m + 1)))
    return rows


def tuple_table(
    m: int,
    k: int,
    iv: IntervalSpec,
    H_grid: Sequence[Fraction],
    q: Optional[QuadratureSpec] = None,
    cache_dir: Optional[str] = None,
    cfg: Optional[CensusConfig] = None,
) -> List[CountRow]:
    """Angle-tuple counts in the box I_1 x ... x I_k against the density integral."""
    iv.check_disjoint()
    grid = _check_grid(H_grid)
    mass = integrate_rho(m, k, iv, q)
    omega = float(omega_leading(m))
    logger.info(f"Density mass of {iv} for m={m}: {mass!r}")
    rows = []
    for h in grid:
        summary = get_census(m, h, cache_dir, cfg)
        empirical = empirical_tuple_count(summary.records, iv)
        rows.append(CountRow.build(m, h, empirical, omega * float(h) ** (m + 1) * mass))
    return rows


def angle_histogram(
    m: int,
    H: Fraction,
    bins: int,
    cache_dir: Optional[str] = None,
    cfg: Optional[CensusConfig] = None,
    q: Optional[QuadratureSpec] = None,
) -> List[HistogramRow]:
    """
    Pooled conjugate angles against rho_{m,1} / m.

    Bins are left-closed; the last bin also holds pi.
    """
    if bins < 1:
        raise InputError("Need at least one bin", additional_context={"bins": bins})
    summary = get_census(m, Fraction(H), cache_dir, cfg)
    angles = np.asarray(summary.angles(), dtype=float)
    if angles.size == 0:
        raise EmptyCensus("Census has no Salem numbers", additional_context={"m": m, "H": str(H)})
    edges = [math.pi * i / bins for i in range(bins + 1)]
    edges[-1] = math.pi
    index = np.clip(np.searchsorted(np.asarray(edges), angles, side="right") - 1, 0, bins - 1)
    counts = np.bincount(index, minlength=bins)
    rows = []
    for i in range(bins):
        predicted = integrate_rho(m, 1, IntervalSpec.of((edges[i], edges[i + 1])), q) / m
        rows.append(HistogramRow(edges[i], edges[i + 1], float(counts[i]) / angles.size, predicted))
    return rows


def reducible_table(
    m: int,
    H_grid: Sequence[Fraction],
    cache_dir: Optional[str] = None,
    cfg: Optional[CensusConfig] = None,
) -> List[ReducibleRow]:
    rows = []
    for h in _check_grid(H_grid):
        summary = get_census(m, h, cache_dir, cfg)
        rows.append(ReducibleRow(h, summary.reducible_count, summary.reducible_count / float(h) ** m))
    return rows


def density_table(m: int, k: int, grid: int, intervals: Optional[IntervalSpec] = None) -> List[DensityRow]:
    """
    rho_{m,k} on a midpoint grid, ``grid`` points per axis.

    Tuples with two equal angles report 0.
    """
    if grid < 1:
        raise InputError("Grid must have at least one point", additional_context={"grid": grid})
    if not 1 <= k <= m:
        raise InputError("Need 1 <= k <= m", additional_context={"m": m, "k": k})
    spans = [(0.0, math.pi)] * k
    if intervals is not None:
        if intervals.k != k:
            raise InputError("Interval count must equal k", additional_context={"k": k, "intervals": intervals.k})
        spans = [(iv.lo, iv.hi) for iv in intervals.intervals]
    axes = [[lo + (hi - lo) * (2 * i + 1) / (2 * grid) for i in range(grid)] for lo, hi in spans]
    points = np.array(list(itertools.product(*axes)), dtype=float).reshape(-1, k)
    rho = rho_batch(m, points)
    if k > 1:
        x = -np.cos(points)
        coincident = np.zeros(points.shape[0], dtype=bool)
        for i, j in itertools.combinations(range(k), 2):
            coincident |= x[:, i] == x[:, j]
        rho = np.where(coincident, 0.0, rho)
    return [DensityRow(tuple(float(t) for t in pt), float(r)) for pt, r in zip(points, rho)]


def _flatten(row: Any) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for name, value in asdict(row).items():
        if isinstance(value, tuple):
            if len(value) == 1:
                out[name] = value[0]
            else:
                for i, v in enumerate(value, start=1):
                    out[f"{name}_{i}"] = v
        elif isinstance(value, Fraction):
            out[name] = str(value)
        else:
            out[name] = value
    return out


def rows_to_json(rows: Iterable[Any]) -> str:
    return json.dumps([_flatten(r) for r in rows], indent=2)


def header_fields(row_type: type) -> List[str]:
    return [f.name for f in fields(row_type)]


def rows_to_csv(rows: Iterable[Any], row_type: Optional[type] = None) -> str:
    flat = [_flatten(r) for r in rows]
    if flat:
        names = list(flat[0])
    elif row_type is not None:
        names = header_fields(row_type)
    else:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=names, lineterminator="\n")
    writer.writeheader()
    writer.writerows(flat)
    return buf.getvalue()


def write_rows(rows: Sequence[Any], out: IO[str], fmt: str = "csv", row_type: Optional[type] = None) -> None:
    """Write rows as CSV (header = field names) or a JSON array."""
    if fmt == "json":
        out.write(rows_to_json(rows) + "\n")
    elif fmt == "csv":
        out.write(rows_to_csv(rows, row_type))
    else:
        raise InputError(f"Unknown output format {fmt!r}", additional_context={"format": fmt})

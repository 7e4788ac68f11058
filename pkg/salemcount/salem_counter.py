"""
Main SalemCounter class tying census enumeration, the angle kernel and the
asymptotic constants together behind one configured object.
"""

import uuid
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, TypeVar, Union

from pydantic import BaseModel, Field

from salemcount.core.asymptotics import (
    mc_volume,
    omega_leading,
    selberg_closed,
    selberg_exact,
    selberg_monte_carlo,
)
from salemcount.core.census import CensusSummary, IntervalSpec
from salemcount.core.census_store import get_census
from salemcount.core.config import (
    CensusConfig,
    McEstimate,
    McSpec,
    QuadratureScheme,
    QuadratureSpec,
    SalemConfig,
    load_config,
)
from salemcount.core.error_handling import SalemError
from salemcount.core.harness import (
    CountRow,
    DensityRow,
    HistogramRow,
    ReducibleRow,
    angle_histogram,
    census_table,
    density_table,
    reducible_table,
    tuple_table,
)
from salemcount.core.logger import setup_logger, with_correlation_id
from salemcount.core.provenance import ProvenanceRecorder

T = TypeVar("T")
Rational = Union[int, Fraction, str]


class SelbergResult(BaseModel):
    """Closed form, exact value when available, optional Monte-Carlo check."""

    n: int
    alpha: float
    beta: float
    gamma: float
    closed: float
    exact: Optional[str] = None
    monte_carlo: Optional[McEstimate] = None


class VolumeResult(BaseModel):
    m: int
    H: str
    estimate: float
    stderr: float
    samples: int
    seed: int
    leading_term: float = Field(description="omega_m H^(m+1)")


class SalemCounter:
    """
    Entry point for Salem-number counting experiments.

    Args:
        config_path: Optional YAML configuration file
        log_level: Logging level (DEBUG, INFO, WARNING, ERROR)
        log_file: Path to log file
        cache_dir: Census cache directory (overrides config)
        jobs: Enumeration workers (overrides config)
        provenance_dir: Where run sidecars are written (overrides config)
        json_logs: Emit one JSON object per log record
    """

    def __init__(
        self,
        config_path: Optional[str] = None,
        log_level: Optional[str] = None,
        log_file: Optional[str] = None,
        cache_dir: Optional[str] = None,
        jobs: Optional[int] = None,
        provenance_dir: Optional[str] = None,
        json_logs: Optional[bool] = None,
    ) -> None:
        self.config_path = config_path
        self.config = load_config(config_path) if config_path else SalemConfig()
        log_cfg = self.config.logging
        self.logger = setup_logger(
            log_level or log_cfg.level,
            log_file or log_cfg.file,
            format_as_json=log_cfg.json_format if json_logs is None else json_logs,
        )
        census_updates: Dict[str, Any] = {}
        if cache_dir is not None:
            census_updates["cache_dir"] = cache_dir
        if jobs is not None:
            census_updates["jobs"] = jobs
        if census_updates:
            self.config.census = self.config.census.model_copy(update=census_updates)
        self.provenance = ProvenanceRecorder(provenance_dir or self.config.provenance_dir)
        self.last_sidecar: Optional[Path] = None
        self.logger.debug("Initialized SalemCounter")

    # -- plumbing ----------------------------------------------------------

    def census_config(self, jobs: Optional[int] = None, tolerance: Optional[float] = None) -> CensusConfig:
        updates: Dict[str, Any] = {}
        if jobs is not None:
            updates["jobs"] = jobs
        if tolerance is not None:
            updates["tolerance"] = tolerance
        return self.config.census.model_copy(update=updates) if updates else self.config.census

    def quadrature(self, nodes: Optional[int] = None, scheme: Optional[QuadratureScheme] = None) -> QuadratureSpec:
        updates: Dict[str, Any] = {}
        if nodes is not None:
            updates["nodes"] = nodes
        if scheme is not None:
            updates["scheme"] = scheme
        base = self.config.quadrature
        return QuadratureSpec.model_validate({**base.model_dump(), **updates}) if updates else base

    def monte_carlo(self, samples: Optional[int] = None, seed: Optional[int] = None) -> McSpec:
        updates: Dict[str, Any] = {}
        if samples is not None:
            updates["samples"] = samples
        if seed is not None:
            updates["seed"] = seed
        base = self.config.monte_carlo
        return McSpec.model_validate({**base.model_dump(), **updates}) if updates else base

    def _run(self, command: str, parameters: Dict[str, Any], work: Callable[[], T],
             summarize: Callable[[T], Dict[str, Any]]) -> T:
        with with_correlation_id(str(uuid.uuid4())) as cid:
            self.provenance.start_run(cid, command, parameters, self.config_path)
            self.logger.info(f"Running {command}")
            try:
                result = work()
            except SalemError as e:
                e.correlation_id = cid
                self.logger.error(f"{command} failed: {e}")
                self.provenance.record_error(e.message, category=e.error_category.value)
                self.last_sidecar = self.provenance.complete_run(False)
                raise
            self.last_sidecar = self.provenance.complete_run(True, summarize(result))
            return result

    # -- operations --------------------------------------------------------

    def census(self, m: int, H: Rational, jobs: Optional[int] = None,
               tolerance: Optional[float] = None) -> CensusSummary:
        h = Fraction(H)
        cfg = self.census_config(jobs, tolerance)
        return self._run(
            "census",
            {"m": m, "H": h, "jobs": cfg.jobs, "tolerance": cfg.tolerance},
            lambda: get_census(m, h, cfg.cache_dir, cfg),
            lambda s: {"class_count": s.class_count, "irreducible_count": s.irreducible_count,
                       "reducible_count": s.reducible_count},
        )

    def compare_counts(self, m: int, bounds: Sequence[Rational]) -> List[CountRow]:
        grid = [Fraction(b) for b in bounds]
        cfg = self.config.census
        return self._run(
            "compare-counts",
            {"m": m, "bounds": grid},
            lambda: census_table(m, grid, cfg.cache_dir, cfg),
            lambda rows: {"rows": len(rows)},
        )

    def compare_reducible(self, m: int, bounds: Sequence[Rational]) -> List[ReducibleRow]:
        grid = [Fraction(b) for b in bounds]
        cfg = self.config.census
        return self._run(
            "compare-reducible",
            {"m": m, "bounds": grid},
            lambda: reducible_table(m, grid, cfg.cache_dir, cfg),
            lambda rows: {"rows": len(rows)},
        )

    def compare_angles(self, m: int, H: Rational, bins: int, nodes: Optional[int] = None,
                       scheme: Optional[QuadratureScheme] = None) -> List[HistogramRow]:
        h = Fraction(H)
        cfg = self.config.census
        q = self.quadrature(nodes, scheme)
        return self._run(
            "compare-angles",
            {"m": m, "H": h, "bins": bins, "nodes": q.nodes, "scheme": q.scheme.value},
            lambda: angle_histogram(m, h, bins, cfg.cache_dir, cfg, q),
            lambda rows: {"bins": len(rows)},
        )

    def compare_tuples(self, m: int, k: int, intervals: IntervalSpec, bounds: Sequence[Rational],
                       nodes: Optional[int] = None, scheme: Optional[QuadratureScheme] = None) -> List[CountRow]:
        grid = [Fraction(b) for b in bounds]
        cfg = self.config.census
        q = self.quadrature(nodes, scheme)
        return self._run(
            "compare-tuples",
            {"m": m, "k": k, "intervals": str(intervals), "bounds": grid, "nodes": q.nodes},
            lambda: tuple_table(m, k, intervals, grid, q, cfg.cache_dir, cfg),
            lambda rows: {"rows": len(rows)},
        )

    def density(self, m: int, k: int, grid: int, intervals: Optional[IntervalSpec] = None) -> List[DensityRow]:
        return self._run(
            "density",
            {"m": m, "k": k, "grid": grid, "intervals": str(intervals) if intervals else None},
            lambda: density_table(m, k, grid, intervals),
            lambda rows: {"rows": len(rows)},
        )

    def volume(self, m: int, H: Rational, samples: Optional[int] = None, seed: Optional[int] = None) -> VolumeResult:
        h = Fraction(H)
        mc = self.monte_carlo(samples, seed)

        def work() -> VolumeResult:
            est = mc_volume(m, float(h), mc)
            lead = float(omega_leading(m)) * float(h) ** (m + 1)
            return VolumeResult(m=m, H=str(h), estimate=est.estimate, stderr=est.stderr,
                                samples=est.samples, seed=est.seed, leading_term=lead)

        return self._run(
            "volume",
            {"m": m, "H": h, "samples": mc.samples, "seed": mc.seed},
            work,
            lambda r: {"estimate": r.estimate, "stderr": r.stderr},
        )

    def selberg(self, n: int, alpha: Rational, beta: Rational, gamma: Rational,
                samples: Optional[int] = None, seed: Optional[int] = None) -> SelbergResult:
        a, b, g = Fraction(alpha), Fraction(beta), Fraction(gamma)

        def work() -> SelbergResult:
            closed = selberg_closed(n, float(a), float(b), float(g))
            exact = selberg_exact(n, a, b, g)
            mc = None
            if samples is not None:
                mc = selberg_monte_carlo(n, float(a), float(b), float(g), self.monte_carlo(samples, seed))
            return SelbergResult(n=n, alpha=float(a), beta=float(b), gamma=float(g), closed=closed,
                                 exact=str(exact) if exact is not None else None, monte_carlo=mc)

        return self._run(
            "selberg",
            {"n": n, "alpha": a, "beta": b, "gamma": g, "samples": samples, "seed": seed},
            work,
            lambda r: {"closed": r.closed, "exact": r.exact},
        )

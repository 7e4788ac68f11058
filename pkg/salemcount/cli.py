"""
Command Line Interface for salemcount.

Tables go to ``--out`` or standard output; status and logs go to stderr.
"""

import csv
import io
import json
import sys
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence

import typer
from rich.console import Console

from salemcount import __version__
from salemcount.core.census import CensusSummary, IntervalSpec
from salemcount.core.census_store import dump_jsonl
from salemcount.core.config import QuadratureScheme, parse_rational
from salemcount.core.error_handling import SalemError, is_usage_error
from salemcount.core.harness import CountRow, DensityRow, HistogramRow, ReducibleRow, write_rows
from salemcount.salem_counter import SalemCounter

app = typer.Typer(
    name="salemcount",
    help="Count Salem numbers of fixed degree and compare them with their limiting distribution.",
    add_completion=False,
)

console = Console(stderr=True)

GRAMMAR: Dict[str, str] = {
    "census": "census --m <int> --bound <rat> [--jobs <int>] [--cache <dir>] [--format csv|jsonl] [--out <path>]",
    "density": 'density --m <int> --k <int> [--intervals "a:b[,a:b...]"] --grid <int> [--out <path>]',
    "compare-counts": "compare-counts --m <int> --bounds <rat,rat,...> [--cache <dir>] [--out <path>]",
    "compare-angles": "compare-angles --m <int> --bound <rat> --bins <int> [--cache <dir>] [--out <path>]",
    "compare-tuples": 'compare-tuples --m <int> --k <int> --intervals "a:b,..." --bounds <rat,...> [--out <path>]',
    "compare-reducible": "compare-reducible --m <int> --bounds <rat,rat,...> [--cache <dir>] [--out <path>]",
    "volume": "volume --m <int> --bound <rat> --samples <int> --seed <u64> [--out <path>]",
    "selberg": "selberg --n <int> --alpha <real> --beta <real> --gamma <real>",
}

FORMATS = ("csv", "json")


@dataclass
class GlobalOptions:
    config: Optional[str] = None
    log_level: Optional[str] = None
    log_file: Optional[str] = None
    json_logs: Optional[bool] = None
    provenance_dir: Optional[str] = None


def _usage(command: str, flag: str, message: str) -> typer.BadParameter:
    return typer.BadParameter(f"{message}\nUsage: salemcount {GRAMMAR[command]}", param_hint=flag)


def _rational(text: str, command: str, flag: str) -> Fraction:
    try:
        return parse_rational(text)
    except SalemError:
        raise _usage(command, flag, f"{text!r} is not a rational number") from None


def _rational_list(text: str, command: str, flag: str) -> List[Fraction]:
    parts = [p.strip() for p in text.split(",") if p.strip()]
    return [_rational(p, command, flag) for p in parts]


def _intervals(text: str, command: str) -> IntervalSpec:
    try:
        return IntervalSpec.parse(text)
    except SalemError as e:
        raise _usage(command, "--intervals", e.message) from None


def _format(fmt: str, command: str, allowed: Sequence[str] = FORMATS) -> str:
    if fmt not in allowed:
        raise _usage(command, "--format", f"format must be one of {', '.join(allowed)}")
    return fmt


def _counter(ctx: typer.Context, cache_dir: Optional[Path] = None, jobs: Optional[int] = None) -> SalemCounter:
    opts: GlobalOptions = ctx.obj or GlobalOptions()
    return SalemCounter(
        config_path=opts.config,
        log_level=opts.log_level,
        log_file=opts.log_file,
        cache_dir=str(cache_dir) if cache_dir else None,
        jobs=jobs,
        provenance_dir=opts.provenance_dir,
        json_logs=opts.json_logs,
    )


@contextmanager
def _guard(command: str) -> Iterator[None]:
    """Map library failures onto exit codes: 2 for bad arguments, 1 otherwise."""
    try:
        yield
    except SalemError as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        if is_usage_error(e):
            console.print(f"Usage: salemcount {GRAMMAR[command]}")
            raise typer.Exit(code=2)
        raise typer.Exit(code=1)


def _write(text: str, out: Optional[Path]) -> None:
    if out is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(text, encoding="utf-8")
    console.print(f"Wrote {out}")


def _emit_rows(rows: Sequence[Any], out: Optional[Path], fmt: str, row_type: type) -> None:
    buf = io.StringIO()
    write_rows(rows, buf, fmt, row_type)
    _write(buf.getvalue(), out)


def _census_csv(summary: CensusSummary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["m", "coeffs", "trace_coeffs", "alpha_lo", "alpha_hi", "angles"])
    for rec in summary.records:
        writer.writerow([
            rec.m,
            " ".join(str(c) for c in rec.coeffs),
            " ".join(str(c) for c in rec.trace_coeffs),
            repr(rec.alpha_lo),
            repr(rec.alpha_hi),
            " ".join(repr(a) for a in rec.angles),
        ])
    return buf.getvalue()


def _flat_dict_csv(data: Dict[str, Any]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(data), lineterminator="\n")
    writer.writeheader()
    writer.writerow(data)
    return buf.getvalue()


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(
        None, "--config", "-c", help="Path to configuration YAML file", exists=True, dir_okay=False, readable=True
    ),
    log_level: Optional[str] = typer.Option(
        None, "--log-level", "-l", help="Logging level (DEBUG, INFO, WARNING, ERROR)"
    ),
    log_file: Optional[Path] = typer.Option(None, "--log-file", "-f", help="Path to log file"),
    json_logs: Optional[bool] = typer.Option(None, "--json-logs/--text-logs", help="Emit logs as JSON objects"),
    provenance_dir: Optional[Path] = typer.Option(
        None, "--provenance-dir", help="Directory for run_<id>.json provenance sidecars"
    ),
) -> None:
    """Count Salem numbers and compare them with their limiting distribution."""
    ctx.obj = GlobalOptions(
        config=str(config) if config else None,
        log_level=log_level,
        log_file=str(log_file) if log_file else None,
        json_logs=json_logs,
        provenance_dir=str(provenance_dir) if provenance_dir else None,
    )


@app.command()
def version() -> None:
    """Show the version of salemcount."""
    typer.echo(f"salemcount v{__version__}")


@app.command()
def census(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles (degree 2m+2)"),
    bound: str = typer.Option(..., "--bound", help="Height bound H > 1, as p/q or a decimal"),
    jobs: Optional[int] = typer.Option(None, "--jobs", min=1, help="Enumeration workers (default: all cores)"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="Census cache directory"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or jsonl"),
    tolerance: Optional[float] = typer.Option(None, "--tolerance", help="Width of the certified alpha enclosure"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Enumerate every Salem number of degree 2m+2 up to the bound."""
    fmt = _format(fmt, "census", ("csv", "jsonl"))
    h = _rational(bound, "census", "--bound")
    if tolerance is not None and tolerance <= 0:
        raise _usage("census", "--tolerance", "tolerance must be positive")
    with _guard("census"):
        summary = _counter(ctx, cache, jobs).census(m, h, tolerance=tolerance)
        _write(dump_jsonl(summary) if fmt == "jsonl" else _census_csv(summary), out)
        console.print(
            f"[green]m={m} H={h}:[/green] {summary.irreducible_count} Salem numbers, "
            f"{summary.reducible_count} reducible class members"
        )


@app.command()
def density(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles"),
    k: int = typer.Option(..., "--k", min=1, help="Number of angles in each tuple"),
    intervals: Optional[str] = typer.Option(
        None, "--intervals", help='Per-axis ranges "a:b[,a:b...]" (default [0, pi])'
    ),
    grid: int = typer.Option(..., "--grid", min=1, help="Midpoints per axis"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Tabulate the k-angle density on a midpoint grid."""
    fmt = _format(fmt, "density")
    spec = _intervals(intervals, "density") if intervals else None
    if k > m:
        raise _usage("density", "--k", "k must not exceed m")
    with _guard("density"):
        rows = _counter(ctx).density(m, k, grid, spec)
        _emit_rows(rows, out, fmt, DensityRow)


@app.command("compare-counts")
def compare_counts(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles"),
    bounds: str = typer.Option(..., "--bounds", help="Ascending bounds, comma separated"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="Census cache directory"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Census counts against the leading term omega_m H^(m+1)."""
    fmt = _format(fmt, "compare-counts")
    grid = _rational_list(bounds, "compare-counts", "--bounds")
    with _guard("compare-counts"):
        rows = _counter(ctx, cache).compare_counts(m, grid)
        _emit_rows(rows, out, fmt, CountRow)


@app.command("compare-reducible")
def compare_reducible(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles"),
    bounds: str = typer.Option(..., "--bounds", help="Ascending bounds, comma separated"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="Census cache directory"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Reducible class members, scaled by H^m."""
    fmt = _format(fmt, "compare-reducible")
    grid = _rational_list(bounds, "compare-reducible", "--bounds")
    with _guard("compare-reducible"):
        rows = _counter(ctx, cache).compare_reducible(m, grid)
        _emit_rows(rows, out, fmt, ReducibleRow)


@app.command("compare-angles")
def compare_angles(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles"),
    bound: str = typer.Option(..., "--bound", help="Height bound H > 1"),
    bins: int = typer.Option(..., "--bins", min=1, help="Number of equal-width bins on [0, pi]"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="Census cache directory"),
    nodes: Optional[int] = typer.Option(None, "--nodes", min=2, help="Maximum quadrature nodes per dimension"),
    scheme: Optional[QuadratureScheme] = typer.Option(None, "--scheme", help="Quadrature rule"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Histogram of pooled conjugate angles against the one-angle density."""
    fmt = _format(fmt, "compare-angles")
    h = _rational(bound, "compare-angles", "--bound")
    with _guard("compare-angles"):
        rows = _counter(ctx, cache).compare_angles(m, h, bins, nodes, scheme)
        _emit_rows(rows, out, fmt, HistogramRow)


@app.command("compare-tuples")
def compare_tuples(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles"),
    k: int = typer.Option(..., "--k", min=1, help="Number of intervals"),
    intervals: str = typer.Option(..., "--intervals", help='Disjoint angle intervals "a:b,..."'),
    bounds: str = typer.Option(..., "--bounds", help="Ascending bounds, comma separated"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="Census cache directory"),
    nodes: Optional[int] = typer.Option(None, "--nodes", min=2, help="Maximum quadrature nodes per dimension"),
    scheme: Optional[QuadratureScheme] = typer.Option(None, "--scheme", help="Quadrature rule"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Angle-tuple counts in a box against omega_m H^(m+1) times the density integral."""
    fmt = _format(fmt, "compare-tuples")
    spec = _intervals(intervals, "compare-tuples")
    if spec.k != k:
        raise _usage("compare-tuples", "--k", f"--k is {k} but {spec.k} interval(s) were given")
    grid = _rational_list(bounds, "compare-tuples", "--bounds")
    with _guard("compare-tuples"):
        rows = _counter(ctx, cache).compare_tuples(m, k, spec, grid, nodes, scheme)
        _emit_rows(rows, out, fmt, CountRow)


@app.command()
def volume(
    ctx: typer.Context,
    m: int = typer.Option(..., "--m", min=1, help="Number of conjugate angles"),
    bound: str = typer.Option(..., "--bound", help="Height bound H > 1"),
    samples: int = typer.Option(..., "--samples", min=1, help="Monte-Carlo samples"),
    seed: int = typer.Option(..., "--seed", min=0, max=2**64 - 1, help="Unsigned 64-bit seed"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Monte-Carlo volume of the coefficient region."""
    fmt = _format(fmt, "volume")
    h = _rational(bound, "volume", "--bound")
    with _guard("volume"):
        result = _counter(ctx).volume(m, h, samples, seed)
        data = result.model_dump()
        _write(json.dumps(data, indent=2) + "\n" if fmt == "json" else _flat_dict_csv(data), out)


@app.command()
def selberg(
    ctx: typer.Context,
    n: int = typer.Option(..., "--n", min=1, help="Dimension"),
    alpha: str = typer.Option(..., "--alpha", help="alpha > 0"),
    beta: str = typer.Option(..., "--beta", help="beta > 0"),
    gamma: str = typer.Option(..., "--gamma", help="gamma"),
    samples: Optional[int] = typer.Option(None, "--samples", min=1, help="Add a Monte-Carlo estimate"),
    seed: Optional[int] = typer.Option(None, "--seed", min=0, max=2**64 - 1, help="Monte-Carlo seed"),
    fmt: str = typer.Option("csv", "--format", help="Output format: csv or json"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Output file (default: stdout)"),
) -> None:
    """Evaluate the Selberg integral S_n(alpha, beta, gamma)."""
    fmt = _format(fmt, "selberg")
    a = _rational(alpha, "selberg", "--alpha")
    b = _rational(beta, "selberg", "--beta")
    g = _rational(gamma, "selberg", "--gamma")
    with _guard("selberg"):
        result = _counter(ctx).selberg(n, a, b, g, samples, seed)
        if fmt == "json":
            _write(result.model_dump_json(indent=2) + "\n", out)
            return
        data = result.model_dump(exclude={"monte_carlo"})
        data["exact"] = data["exact"] or ""
        if result.monte_carlo is not None:
            data["mc_estimate"] = result.monte_carlo.estimate
            data["mc_stderr"] = result.monte_carlo.stderr
        _write(_flat_dict_csv(data), out)


if __name__ == "__main__":
    app()

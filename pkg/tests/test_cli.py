import csv
import json
import subprocess
import sys

import pytest
from typer.testing import CliRunner

from salemcount import __version__
from salemcount.cli import app

runner = CliRunner()


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def test_version():
    result = runner.invoke(app, ["version"])
    assert result.exit_code == 0
    assert f"salemcount v{__version__}" in result.output


def test_census_csv(tmp_path):
    out = tmp_path / "census.csv"
    result = runner.invoke(
        app,
        ["census", "--m", "1", "--bound", "3", "--jobs", "1", "--cache", str(tmp_path / "cache"), "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert rows
    assert list(rows[0]) == ["m", "coeffs", "trace_coeffs", "alpha_lo", "alpha_hi", "angles"]
    assert all(float(r["alpha_lo"]) <= float(r["alpha_hi"]) for r in rows)
    assert (tmp_path / "cache" / "census_m1_H3.jsonl").exists()


def test_census_jsonl(tmp_path):
    out = tmp_path / "census.jsonl"
    result = runner.invoke(
        app, ["census", "--m", "2", "--bound", "5/2", "--jobs", "1", "--format", "jsonl", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    lines = out.read_text().splitlines()
    header = json.loads(lines[0])
    assert header["m"] == 2 and header["H"] == "5/2"
    assert len(lines) == 1 + header["irreducible_count"]


def test_density_table(tmp_path):
    out = tmp_path / "rho.csv"
    result = runner.invoke(app, ["density", "--m", "2", "--k", "1", "--grid", "3", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 3
    assert float(rows[1]["rho"]) == pytest.approx(0.75)


def test_density_json_with_intervals(tmp_path):
    out = tmp_path / "rho.json"
    result = runner.invoke(
        app,
        ["density", "--m", "3", "--k", "2", "--intervals", "0:pi/2,pi/2:pi", "--grid", "2", "--format", "json",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert len(data) == 4
    assert set(data[0]) == {"theta_1", "theta_2", "rho"}


def test_compare_reducible(tmp_path):
    out = tmp_path / "red.csv"
    result = runner.invoke(
        app, ["compare-reducible", "--m", "1", "--bounds", "3,5", "--cache", str(tmp_path), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert [int(r["reducible"]) for r in read_csv(out)] == [5, 15]


def test_compare_counts_and_angles(tmp_path):
    counts = tmp_path / "counts.csv"
    angles = tmp_path / "angles.csv"
    assert runner.invoke(
        app, ["compare-counts", "--m", "2", "--bounds", "3,4", "--cache", str(tmp_path), "--out", str(counts)]
    ).exit_code == 0
    assert [r["H"] for r in read_csv(counts)] == ["3", "4"]
    result = runner.invoke(
        app,
        ["compare-angles", "--m", "2", "--bound", "4", "--bins", "5", "--cache", str(tmp_path), "--out", str(angles)],
    )
    assert result.exit_code == 0, result.output
    rows = read_csv(angles)
    assert len(rows) == 5
    assert sum(float(r["empirical_mass"]) for r in rows) == pytest.approx(1.0)


def test_compare_tuples(tmp_path):
    out = tmp_path / "tuples.csv"
    result = runner.invoke(
        app,
        ["compare-tuples", "--m", "2", "--k", "2", "--intervals", "0:1,2:pi", "--bounds", "3", "--cache", str(tmp_path),
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 1 and float(rows[0]["predicted"]) > 0


def test_selberg_csv(tmp_path):
    out = tmp_path / "s.csv"
    result = runner.invoke(
        app, ["selberg", "--n", "2", "--alpha", "1", "--beta", "1", "--gamma", "1/2", "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    (row,) = read_csv(out)
    assert row["exact"] == "1/3"
    assert float(row["closed"]) == pytest.approx(1 / 3)
    assert "mc_estimate" not in row


def test_selberg_json_with_monte_carlo(tmp_path):
    out = tmp_path / "s.json"
    result = runner.invoke(
        app,
        ["selberg", "--n", "1", "--alpha", "2", "--beta", "3", "--gamma", "0", "--samples", "1000", "--seed", "9",
         "--format", "json", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert data["exact"] == "1/12"
    assert data["monte_carlo"]["seed"] == 9


def test_volume_json(tmp_path):
    out = tmp_path / "v.json"
    result = runner.invoke(
        app,
        ["volume", "--m", "1", "--bound", "10", "--samples", "2000", "--seed", "1", "--format", "json",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    data = json.loads(out.read_text())
    assert data["H"] == "10"
    assert data["leading_term"] == pytest.approx(200.0)


def test_provenance_sidecar(tmp_path):
    prov = tmp_path / "prov"
    result = runner.invoke(
        app,
        ["--provenance-dir", str(prov), "density", "--m", "2", "--k", "1", "--grid", "2", "--out",
         str(tmp_path / "d.csv")],
    )
    assert result.exit_code == 0, result.output
    (sidecar,) = prov.glob("run_*.json")
    data = json.loads(sidecar.read_text())
    assert data["command"] == "density"
    assert data["success"] is True
    assert data["parameters"]["grid"] == 2


@pytest.mark.parametrize(
    "args",
    [
        ["census", "--m", "1", "--bound", "abc"],
        ["census", "--m", "1", "--bound", "3", "--format", "xml"],
        ["census", "--m", "1", "--bound", "1", "--jobs", "1"],
        ["density", "--m", "2", "--k", "3", "--grid", "4"],
        ["density", "--m", "2", "--k", "1", "--grid", "4", "--intervals", "1-2"],
        ["compare-tuples", "--m", "2", "--k", "2", "--intervals", "0:1", "--bounds", "3"],
        ["compare-counts", "--m", "1", "--bounds", "5,3"],
        ["volume", "--m", "1", "--bound", "3", "--samples", "10"],
    ],
)
def test_usage_errors_exit_2(tmp_path, args):
    result = runner.invoke(app, args + ["--out", str(tmp_path / "x")] if args[0] != "volume" else args)
    assert result.exit_code == 2


def test_computation_error_exits_1(tmp_path):
    result = runner.invoke(
        app, ["selberg", "--n", "2", "--alpha", "1", "--beta", "1", "--gamma=-0.6", "--out", str(tmp_path / "s")]
    )
    assert result.exit_code == 1
    assert not (tmp_path / "s").exists()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "salemcount", "--help"], capture_output=True, text=True, timeout=60)
    assert proc.returncode == 0
    assert "compare-counts" in proc.stdout


@pytest.mark.parametrize(
    "command,flags",
    [
        ("census", ["--m", "--bound", "--jobs", "--cache", "--format", "--out"]),
        ("density", ["--m", "--k", "--intervals", "--grid", "--out"]),
        ("compare-counts", ["--m", "--bounds", "--cache", "--out"]),
        ("compare-angles", ["--m", "--bound", "--bins", "--cache", "--out"]),
        ("compare-tuples", ["--m", "--k", "--intervals", "--bounds", "--out"]),
        ("compare-reducible", ["--m", "--bounds", "--cache", "--out"]),
        ("volume", ["--m", "--bound", "--samples", "--seed", "--out"]),
        ("selberg", ["--n", "--alpha", "--beta", "--gamma"]),
    ],
)
def test_subcommand_help_lists_flags(command, flags):
    result = runner.invoke(app, [command, "--help"], env={"COLUMNS": "200", "NO_COLOR": "1", "TERM": "dumb"})
    assert result.exit_code == 0
    for flag in flags:
        assert flag in result.output


def test_density_eight_midpoints(tmp_path):
    out = tmp_path / "rho8.csv"
    result = runner.invoke(app, ["density", "--m", "2", "--k", "1", "--grid", "8", "--out", str(out)])
    assert result.exit_code == 0, result.output
    rows = read_csv(out)
    assert len(rows) == 8
    assert float(rows[0]["theta"]) == pytest.approx(3.141592653589793 / 16)
    assert float(rows[3]["rho"]) == pytest.approx(float(rows[4]["rho"]))

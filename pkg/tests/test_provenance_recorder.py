import json

from salemcount import __version__
from salemcount.core.provenance import ProvenanceRecorder, compute_sha256_of_text


def test_sidecar_written_with_config_hash(tmp_path):
    cfg = tmp_path / "salem.yaml"
    cfg.write_text("census:\n  jobs: 1\n")
    prov = ProvenanceRecorder(output_dir=str(tmp_path / "prov"))

    prov.start_run("cid-1", "census", {"m": 2, "H": "10"}, config_path=str(cfg))
    prov.record_error("cache unreadable", category="STORAGE")
    sidecar = prov.complete_run(True, {"irreducible_count": 7})

    assert sidecar == tmp_path / "prov" / "run_cid-1.json"
    data = json.loads(sidecar.read_text())
    assert data["command"] == "census"
    assert data["parameters"] == {"m": 2, "H": "10"}
    assert data["config_hash"] == compute_sha256_of_text(cfg.read_text())
    assert data["tool_version"] == __version__
    assert data["success"] is True
    assert data["result_summary"] == {"irreducible_count": 7}
    assert data["error_events"][0]["category"] == "STORAGE"
    assert data["duration_ms"] >= 0


def test_no_output_dir_means_no_sidecar(tmp_path):
    prov = ProvenanceRecorder()
    prov.start_run("cid-2", "selberg", {"n": 2})
    assert prov.complete_run(False) is None
    assert prov.current.success is False


def test_complete_without_start_is_noop():
    prov = ProvenanceRecorder()
    prov.record_error("ignored")
    assert prov.complete_run(True) is None
    assert prov.current is None


def test_non_json_parameters_are_stringified(tmp_path):
    from fractions import Fraction

    prov = ProvenanceRecorder(output_dir=str(tmp_path))
    prov.start_run("cid-3", "compare-counts", {"bounds": [Fraction(5, 2), Fraction(10)]})
    data = json.loads(prov.complete_run(True).read_text())
    assert data["parameters"]["bounds"] == ["5/2", "10"]

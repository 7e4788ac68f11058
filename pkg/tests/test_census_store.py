import json
from fractions import Fraction

import pytest

from salemcount import __version__
from salemcount.core.census import enumerate_census
from salemcount.core.census_store import CensusStore, census_filename, dump_jsonl, get_census
from salemcount.core.config import CensusConfig
from salemcount.core.error_handling import CacheMismatch, ErrorCategory, SalemError


def test_filenames():
    assert census_filename(1, Fraction(10)) == "census_m1_H10.jsonl"
    assert census_filename(2, Fraction(5, 2)) == "census_m2_H5_2.jsonl"


def test_round_trip_is_exact(tmp_path):
    summary = enumerate_census(2, 3, CensusConfig(jobs=1))
    store = CensusStore(str(tmp_path))
    path = store.save(summary)
    assert path.name == "census_m2_H3.jsonl"
    assert store.load(2, Fraction(3)) == summary
    assert dump_jsonl(store.load(2, Fraction(3))) == path.read_text()


def test_header_and_record_lines(tmp_path):
    summary = enumerate_census(1, Fraction(5, 2), CensusConfig(jobs=1))
    path = CensusStore(str(tmp_path)).save(summary)
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    assert header == {
        "m": 1,
        "H": "5/2",
        "tool_version": __version__,
        "class_count": summary.class_count,
        "irreducible_count": summary.irreducible_count,
        "reducible_count": summary.reducible_count,
    }
    assert len(lines) == 1 + summary.irreducible_count
    assert set(json.loads(lines[1])) == {"m", "coeffs", "trace_coeffs", "alpha_lo", "alpha_hi", "angles"}


def test_missing_file_loads_none(tmp_path):
    assert CensusStore(str(tmp_path)).load(1, Fraction(7)) is None


def test_header_mismatch(tmp_path):
    store = CensusStore(str(tmp_path))
    store.save(enumerate_census(1, 3, CensusConfig(jobs=1)))
    (tmp_path / "census_m1_H3.jsonl").rename(tmp_path / "census_m1_H4.jsonl")
    with pytest.raises(CacheMismatch):
        store.load(1, Fraction(4))


def test_cache_from_other_release_is_rejected(tmp_path):
    store = CensusStore(str(tmp_path))
    path = store.save(enumerate_census(1, 3, CensusConfig(jobs=1)))
    lines = path.read_text().splitlines()
    header = json.loads(lines[0])
    header["tool_version"] = "0.0.0-old"
    path.write_text("\n".join([json.dumps(header)] + lines[1:]) + "\n")
    with pytest.raises(CacheMismatch) as info:
        store.load(1, Fraction(3))
    assert info.value.additional_context["reason"] == "tool_version"


def test_load_or_compute_refreshes_stale_cache(tmp_path, caplog):
    store = CensusStore(str(tmp_path))
    fresh = enumerate_census(1, 3, CensusConfig(jobs=1))
    path = store.save(fresh)
    path.write_text(path.read_text().replace(json.dumps(__version__), json.dumps("0.0.0-old"), 1))
    with caplog.at_level("WARNING", logger="salemcount.core.census_store"):
        assert store.load_or_compute(1, Fraction(3), CensusConfig(jobs=1)) == fresh
    assert json.loads(path.read_text().splitlines()[0])["tool_version"] == __version__
    assert any("Stale census cache" in r.getMessage() for r in caplog.records)


def test_corrupt_file_is_storage_error(tmp_path):
    (tmp_path / "census_m1_H3.jsonl").write_text("{not json\n")
    with pytest.raises(SalemError) as info:
        CensusStore(str(tmp_path)).load(1, Fraction(3))
    assert info.value.error_category is ErrorCategory.STORAGE


def test_load_or_compute_uses_cache(tmp_path, monkeypatch):
    store = CensusStore(str(tmp_path))
    first = store.load_or_compute(1, Fraction(3), CensusConfig(jobs=1))

    def boom(*args, **kwargs):
        raise AssertionError("enumeration should not run on a cache hit")

    monkeypatch.setattr("salemcount.core.census_store.enumerate_census", boom)
    assert store.load_or_compute(1, Fraction(3)) == first
    assert get_census(1, Fraction(3), str(tmp_path)) == first

import csv
import json

import pytest

from varlp.harness.results import (CSV_COLUMNS, check, emit_report,
                                   report_document)


def test_check_polarity_le():
    r = check("a.b", "ref", 0.5, 1.0, "<=")
    assert r.passed
    assert not check("a.b", "ref", 2.0, 1.0, "<=").passed


def test_check_polarity_ge():
    assert check("a.b", "ref", 2.0, 1.0, ">=").passed
    assert not check("a.b", "ref", 0.5, 1.0, ">=").passed


def test_check_nan_never_passes():
    assert not check("a.b", "ref", float("nan"), 1.0, "<=").passed
    assert not check("a.b", "ref", float("nan"), 1.0, ">=").passed


def test_check_rejects_unknown_polarity():
    with pytest.raises(ValueError):
        check("a.b", "ref", 1.0, 1.0, "==")


def test_check_explicit_pass_override():
    r = check("a.b", "ref", 2.0, 1.0, "<=", passed=True)
    assert r.passed


def _two_results():
    return [
        check("s.first", "r1", 0.5, 1.0, "<=", runtime_ms=12.34),
        check("s.second", "r2", 0.5, 1.0, ">=", runtime_ms=5.0),
    ]


def test_emit_report_files_and_exit_codes(tmp_path):
    results = _two_results()
    json_path, csv_path, code = emit_report(results, tmp_path, "demo",
                                            {"alpha": 1.0})
    assert code == 1  # second check fails
    doc = json.loads(open(json_path).read())
    assert doc["suite"] == "demo"
    assert doc["n_checks"] == 2 and doc["n_failed"] == 1
    assert doc["config"]["alpha"] == 1.0

    with open(csv_path, newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == CSV_COLUMNS
    assert rows[0] == ["check_id", "paper_ref", "statistic", "bound",
                       "polarity", "pass", "runtime_ms"]
    assert len(rows) == 3
    assert rows[1][0] == "s.first" and rows[1][5] == "true"
    assert rows[2][5] == "false"
    assert float(rows[1][6]) == pytest.approx(12.3, abs=0.05)

    ok = [check("s.only", "r", 0.5, 1.0, "<=")]
    _, _, code = emit_report(ok, tmp_path, "demo2")
    assert code == 0


def test_report_document_deterministic():
    results = _two_results()
    doc_a = report_document(results, "demo", {"alpha": 1.0}, timestamp="T")
    doc_b = report_document(results, "demo", {"alpha": 1.0}, timestamp="T")
    assert json.dumps(doc_a, sort_keys=True) == json.dumps(doc_b,
                                                           sort_keys=True)
    # timing data lives only in the timestamp block
    doc_a.pop("timestamp")
    assert "runtime_ms" not in json.dumps(doc_a)


def test_numpy_details_serialize(tmp_path):
    import numpy as np

    r = check("s.np", "r", np.float64(0.5), 1.0, "<=",
              detail={"vec": np.arange(3.0), "scalar": np.float64(2.0)})
    json_path, _, _ = emit_report([r], tmp_path, "np")
    doc = json.loads(open(json_path).read())
    assert doc["results"][0]["detail"]["vec"] == [0.0, 1.0, 2.0]
    assert doc["results"][0]["detail"]["scalar"] == 2.0

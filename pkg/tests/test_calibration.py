import json
import pathlib

import pytest

from varlp.harness import calibration
from varlp.harness.calibration import load_fixtures, run_calibration

REQUIRED_SECTIONS = ["meta", "density", "log_holder", "charnorm",
                     "lambda_fits", "doubling", "regularization",
                     "twin_ball", "maximal", "sufficiency", "weight_table",
                     "bad_weights", "necessity", "mhat", "equivalence"]


def test_packaged_fixtures_load():
    fx = load_fixtures()
    for section in REQUIRED_SECTIONS:
        assert section in fx, section
    assert fx["meta"]["seed_base"] == calibration.CAL_SEED
    eq = fx["equivalence"]
    assert eq["cap"] == calibration.BLOWUP_CAP
    assert eq["power"] >= 1.0


def test_missing_explicit_path_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_fixtures(tmp_path / "nope.json")


def test_missing_packaged_file_mentions_calibrate(monkeypatch, tmp_path):
    monkeypatch.setattr(calibration, "default_fixtures_path",
                        lambda: pathlib.Path(tmp_path / "absent.json"))
    with pytest.raises(FileNotFoundError, match="varlp calibrate"):
        load_fixtures()


def test_quick_calibration_round_trip(tmp_path):
    out = tmp_path / "fx.json"
    fx = run_calibration(out_path=out, quick=True)
    assert out.is_file()
    on_disk = json.loads(out.read_text())
    assert on_disk.keys() == fx.keys()
    for section in REQUIRED_SECTIONS:
        assert section in fx, section
    # quick mode trims to the flat-measure setting only
    assert fx["meta"]["alphas"] == [1.0]
    assert "alpha1" in fx["weight_table"]
    table = fx["weight_table"]["alpha1"]
    assert "const2" in table
    assert table["const2"]["const1"]["bekolle"] >= 1.0
    assert fx["mhat"]["iteration"] > 1.0
    reloaded = load_fixtures(out)
    assert reloaded == on_disk

import math

from spheroidal_eq import io


def test_json_round_trip_with_nonfinite(tmp_path):
    p = tmp_path / "x.json"
    io.write_json(p, "thing", {"a": 1}, {"v": float("nan"), "w": [1.0, float("inf")]})
    doc = io.read_json(p)
    assert doc["schema_version"] == io.SCHEMA_VERSION and doc["kind"] == "thing"
    assert math.isnan(doc["data"]["v"]) and doc["data"]["w"][1] == math.inf


def test_csv_round_trip(tmp_path):
    p = tmp_path / "sub" / "x.csv"
    rows = [{"a": 0.1, "b": "x"}, {"a": 1e-300, "b": "y"}]
    io.write_csv(p, "table", {"n": 3}, rows, summary={"ok": True})
    header, back = io.read_csv(p)
    assert header["version"] and header["config"] == {"n": 3} and header["summary"] == {"ok": True}
    assert back[0]["a"] == 0.1 and back[1]["a"] == 1e-300 and back[1]["b"] == "y"


def test_missing_schema(tmp_path):
    import json

    import pytest

    p = tmp_path / "bad.json"
    p.write_text(json.dumps({"data": 1}))
    with pytest.raises(ValueError):
        io.read_json(p)

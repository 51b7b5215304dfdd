import json
import math

from pathtransport.report import CSV_COLUMNS, LawReport, dumps, merge, to_csv


def make():
    rep = LawReport("demo")
    rep.add("composition", "line", 0.0, 1.0, 1e-14, 1e-8, via=(0.5,))
    rep.add("composition", "line", 0.0, 0.5, 3e-9, 1e-8)
    rep.add("inverse", "line", 0.0, 1.0, 2e-8, 1e-8)
    rep.add("swapped", "line", math.nan, math.nan, 1.0, 1e-8, informational=True)
    return rep


def test_summary_and_pass_logic():
    rep = make()
    assert not rep.passed
    assert rep.failing_laws() == ["inverse"]
    assert rep.passed_law("composition")
    assert rep.residual("composition") == 3e-9
    assert rep.witness("composition").t == 0.5
    summary = {s.law: s for s in rep.summary()}
    assert summary["swapped"].passed


def test_nan_residual_never_passes():
    rep = LawReport("x")
    rep.add("law", "p", 0, 1, math.nan, 1.0)
    assert not rep.passed


def test_dumps_is_deterministic_and_valid_json():
    a, b = dumps(make().to_dict()), dumps(make().to_dict())
    assert a == b
    doc = json.loads(a)
    assert doc["report"] == "demo"
    assert doc["rows"][0]["via"] == [0.5]
    assert doc["rows"][3]["s"] == "nan"


def test_dumps_round_trips_floats_exactly():
    x = 0.1 + 0.2
    assert json.loads(dumps({"x": x}))["x"] == x


def test_csv_columns():
    text = to_csv([make()])
    lines = text.splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) == "law,path,s,t,residual,pass"
    assert len(lines) == 5
    assert lines[3].endswith("false")


def test_merge():
    m = merge("both", [make(), make()])
    assert len(m.rows) == 8


def test_integral_floats_stay_floats():
    doc = json.loads(dumps({"a": [1.0, -2.0], "b": 3.0, "c": 1e20}))
    assert isinstance(doc["a"][0], float) and isinstance(doc["b"], float)
    assert doc["c"] == 1e20

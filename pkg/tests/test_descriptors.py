import json
from pathlib import Path

import jsonschema
import numpy as np
import pytest
from pydantic import ValidationError

from pathtransport.descriptors import (
    IntegratorDescriptor,
    RunConfig,
    build_connection,
    build_path,
    build_potential,
    schema_documents,
)
from pathtransport.linear import transport_matrix
from pathtransport.report import LawReport

SCHEMA_DIR = Path(__file__).resolve().parents[1] / "schemas"


def test_composite_path_descriptor():
    d = {"kind": "concat",
         "first": {"kind": "line", "start": [0, 0], "end": [1, 0]},
         "second": {"kind": "reverse", "path": {"kind": "line", "start": [1, 1], "end": [1, 0]}}}
    p = build_path(d)
    np.testing.assert_allclose(p(0.75), [1.0, 0.5])


def test_reparam_and_restrict_descriptors():
    d = {"kind": "reparam", "tau": {"kind": "cubic", "source": [0, 2]},
         "path": {"kind": "restrict", "domain": [1, 2], "path": {"kind": "circle"}}}
    p = build_path(d)
    assert (p.domain.a, p.domain.b) == (0.0, 2.0)
    np.testing.assert_allclose(p(2.0), [np.cos(2.0), np.sin(2.0)], atol=1e-12)


def test_catalog_path_descriptor():
    p = build_path({"kind": "catalog", "entry": "u1_uniform", "name": "square"})
    assert p.is_closed


def test_bad_descriptors_rejected():
    with pytest.raises(ValidationError):
        build_path({"kind": "spiral"})
    with pytest.raises(ValidationError):
        build_path({"kind": "line", "start": [0], "end": [1], "colour": "red"})
    with pytest.raises(ValidationError):
        build_connection({"kind": "constant", "G0": [[1, 2]]})
    with pytest.raises(ValidationError):
        build_potential({"group": "SU2", "kind": "u1_uniform", "B": 1.0})


def test_connection_descriptor_builds_working_connection():
    conn = build_connection({"kind": "constant", "G0": [[0.0, 1.0], [0.0, 0.0]]})
    H = transport_matrix(conn, build_path({"kind": "line", "start": [0], "end": [1]}), 0.0, 1.0)
    np.testing.assert_allclose(H, [[1.0, -1.0], [0.0, 1.0]], atol=1e-14)


def test_run_config_validation():
    cfg = RunConfig(command="laws")
    assert cfg.suites == ["groupoid", "locality"]
    assert cfg.integrator.build().steps == 2000
    with pytest.raises(ValidationError):
        RunConfig(command="laws", entry="torus")
    with pytest.raises(ValidationError):
        RunConfig(command="laws", schema_version=99)
    with pytest.raises(ValidationError):
        RunConfig(command="fly")
    with pytest.raises(ValidationError):
        IntegratorDescriptor(scheme="euler")


def test_committed_schemas_are_current():
    for name, doc in schema_documents().items():
        committed = json.loads((SCHEMA_DIR / f"{name}.schema.json").read_text())
        assert committed == json.loads(json.dumps(doc)), f"regenerate schemas/{name}.schema.json"
        jsonschema.Draft202012Validator.check_schema(committed)


def test_report_output_validates_against_schema():
    rep = LawReport("x")
    rep.add("law", "p", 0.0, float("nan"), 1e-3, 1e-2, via=(0.5,))
    doc = json.loads(json.dumps(rep.to_dict()).replace("NaN", '"nan"'))
    schema = json.loads((SCHEMA_DIR / "report.schema.json").read_text())
    jsonschema.validate(doc, schema)


def test_run_config_schema_accepts_example():
    schema = json.loads((SCHEMA_DIR / "run_config.schema.json").read_text())
    jsonschema.validate({"command": "wilson", "entry": "u1_uniform", "entry_params": {"B": 2.0},
                         "integrator": {"steps": 500}}, schema)
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate({"command": "wilson", "stepz": 3}, schema)

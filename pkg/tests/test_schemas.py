import json
import logging
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_array_equal

import whichslit
from whichslit.analysis.checker import check_problem, classify_correlation
from whichslit.analysis.families import dim2_infeasibility
from whichslit.analysis.solver import SolverOptions, search_solutions
from whichslit.exceptions import InputError, SchemaError, ZeroStateError
from whichslit.operators.layout import CavityDecomposition, assemble_state, h2_vector
from whichslit.schemas import (
    CheckReportModel,
    InfeasibilityModel,
    InstanceModel,
    SolverReportModel,
    dump_certificate,
    dump_check_report,
    dump_instance,
    dump_solver_report,
    read_artifact,
    validate_io,
    write_artifact,
)

FIXTURE_FILES = sorted((Path(whichslit.__file__).parent / "fixtures").glob("*.json"))


def _instance_json(instance):
    return json.loads(dump_instance(instance).model_dump_json(by_alias=True))


def test_instance_round_trip_is_exact(tmp_path, quarter_instance, esw):
    for instance in (quarter_instance, esw.erasure_instance):
        path = write_artifact(dump_instance(instance), tmp_path / f"{instance.family}.json")
        loaded = validate_io(path)
        assert_array_equal(loaded.psi.vector, instance.psi.vector)
        assert_array_equal(loaded.K, instance.K)
        assert loaded.family == instance.family
        assert loaded.params == instance.params
    assert_array_equal(loaded.detector, esw.erasure_instance.detector)


@pytest.mark.parametrize("path", FIXTURE_FILES, ids=lambda p: p.stem)
def test_shipped_fixtures_are_solutions(path):
    instance = validate_io(path, strict=True)
    assert check_problem(instance).verdict


def test_truncated_file(tmp_path, quarter_instance):
    text = dump_instance(quarter_instance).model_dump_json()
    path = tmp_path / "broken.json"
    path.write_text(text[: len(text) // 2])
    with pytest.raises(SchemaError) as excinfo:
        read_artifact(path)
    assert excinfo.value.field == "<root>"


def test_missing_file(tmp_path):
    with pytest.raises(InputError):
        read_artifact(tmp_path / "nothing.json")


def test_unknown_schema_version(tmp_path, quarter_instance):
    data = _instance_json(quarter_instance)
    data["schema_version"] = "9.9"
    path = tmp_path / "future.json"
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaError) as excinfo:
        read_artifact(path)
    assert "schema_version" in excinfo.value.field


def test_unknown_kind_and_extra_fields(tmp_path, quarter_instance):
    data = _instance_json(quarter_instance)
    data["kind"] = "potato"
    (tmp_path / "kind.json").write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        read_artifact(tmp_path / "kind.json")
    data = _instance_json(quarter_instance)
    data["surprise"] = 1
    (tmp_path / "extra.json").write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        read_artifact(tmp_path / "extra.json")


def test_inconsistent_state_shape(tmp_path, quarter_instance):
    data = _instance_json(quarter_instance)
    data["psi"]["x"] = data["psi"]["x"][:2]
    (tmp_path / "shape.json").write_text(json.dumps(data))
    with pytest.raises(SchemaError) as excinfo:
        read_artifact(tmp_path / "shape.json")
    assert "psi" in excinfo.value.field


def test_unnormalized_state(tmp_path, quarter_instance, caplog):
    data = _instance_json(quarter_instance)
    for side in ("x", "y"):
        data["psi"][side] = [[[2 * re, 2 * im] for re, im in row] for row in data["psi"][side]]
    path = tmp_path / "scaled.json"
    path.write_text(json.dumps(data))
    with caplog.at_level(logging.WARNING, logger="whichslit.schemas.codec"):
        loaded = validate_io(path)
    assert "not normalized" in caplog.text
    np.testing.assert_allclose(loaded.psi.vector, quarter_instance.psi.vector, atol=1e-15)
    with pytest.raises(SchemaError) as excinfo:
        validate_io(path, strict=True)
    assert excinfo.value.field == "psi"


def test_zero_state(tmp_path, quarter_instance):
    data = _instance_json(quarter_instance)
    for side in ("x", "y"):
        data["psi"][side] = [[[0.0, 0.0] for _ in row] for row in data["psi"][side]]
    (tmp_path / "zero.json").write_text(json.dumps(data))
    with pytest.raises(ZeroStateError):
        validate_io(tmp_path / "zero.json")


def test_non_hermitian_matrix_warns(tmp_path, quarter_instance, caplog):
    data = _instance_json(quarter_instance)
    data["K"]["entries"][1] = [0.5, 0.0]
    (tmp_path / "skew.json").write_text(json.dumps(data))
    with caplog.at_level(logging.WARNING, logger="whichslit.schemas.codec"):
        loaded = validate_io(tmp_path / "skew.json")
    assert "not Hermitian" in caplog.text
    assert not check_problem(loaded).verdict


def test_check_report_uses_pass_alias(tmp_path, quarter_instance):
    model = dump_check_report(check_problem(quarter_instance), "dim6", classify_correlation(quarter_instance))
    path = write_artifact(model, tmp_path / "report.json")
    raw = json.loads(path.read_text())
    assert raw["kind"] == "check_report"
    assert [raw[name]["pass"] for name in ("C1", "C2", "C3", "C4", "C5")] == [True] * 5
    assert raw["verdict"] is True
    assert "conditions" not in raw
    assert raw["correlation"]["kind"] == "Uncorrelated"
    assert isinstance(read_artifact(path), CheckReportModel)


def test_solver_report_without_restarts(tmp_path):
    d = CavityDecomposition(1, 1, 1, 1)
    psi = assemble_state([h2_vector(d, a=1.0), h2_vector(d, a=2.0)], [h2_vector(d, c=1.0), h2_vector(d, c=1.0)], d)
    model = dump_solver_report(search_solutions(psi, opts=SolverOptions(restarts=2)))
    assert model.best_residual is None
    assert model.found is False
    loaded = read_artifact(write_artifact(model, tmp_path / "solver.json"))
    assert isinstance(loaded, SolverReportModel)
    assert loaded.rejected_reason.startswith("DegenerateStateError")


def test_certificate_artifact(tmp_path):
    model = dump_certificate(dim2_infeasibility(2, seed=1))
    loaded = read_artifact(write_artifact(model, tmp_path / "cert.json"))
    assert isinstance(loaded, InfeasibilityModel)
    assert loaded.exact_infeasible
    assert loaded.solutions_found == 0


def test_example_in_json_schema():
    example = InstanceModel.model_json_schema()["example"]
    assert InstanceModel.model_validate(example).psi.layout.m == 1


HALF = [0.5, 0.0]
ZERO = [0.0, 0.0]
HAND_WRITTEN_INSTANCE = {
    "schema_version": "1.0",
    "kind": "instance",
    "family": "dim4-sym",
    "params": {"q": 0.25, "theta": 0.0},
    "psi": {
        "layout": {"m": 2},
        "decomp": {"rA": 1, "rB": 1, "rC": 1, "rD": 1},
        "x": [[HALF, ZERO, ZERO, ZERO], [HALF, ZERO, ZERO, ZERO]],
        "y": [[ZERO, ZERO, ZERO, HALF], [ZERO, ZERO, ZERO, HALF]],
    },
    "K": {
        "rows": 4,
        "cols": 4,
        "entries": [
            [0.75, 0], [0.25, 0], [-0.25, 0], [0.25, 0],
            [0.25, 0], [0.75, 0], [0.25, 0], [-0.25, 0],
            [-0.25, 0], [0.25, 0], [0.25, 0], [-0.25, 0],
            [0.25, 0], [-0.25, 0], [-0.25, 0], [0.25, 0],
        ],
    },
}


def test_hand_written_document_round_trip(tmp_path):
    path = tmp_path / "hand.json"
    path.write_text(json.dumps(HAND_WRITTEN_INSTANCE))
    instance = validate_io(path, strict=True)
    assert instance.K[0, 2] == -0.25
    assert instance.K[2, 0] == -0.25
    assert instance.psi.layout.m == 2
    assert check_problem(instance).verdict

    written = json.loads(write_artifact(dump_instance(instance), tmp_path / "again.json").read_text())
    assert written["psi"]["layout"] == {"m": 2}
    assert written["psi"]["decomp"] == {"rA": 1, "rB": 1, "rC": 1, "rD": 1}
    assert written["K"]["rows"] == written["K"]["cols"] == 4
    assert written["K"]["entries"] == [[float(re), float(im)] for re, im in HAND_WRITTEN_INSTANCE["K"]["entries"]]
    assert written["psi"]["x"] == HAND_WRITTEN_INSTANCE["psi"]["x"]
    assert written["psi"]["y"] == HAND_WRITTEN_INSTANCE["psi"]["y"]


def test_matrix_entry_count_must_match(tmp_path):
    data = json.loads(json.dumps(HAND_WRITTEN_INSTANCE))
    data["K"]["entries"] = data["K"]["entries"][:-1]
    (tmp_path / "short.json").write_text(json.dumps(data))
    with pytest.raises(SchemaError) as excinfo:
        read_artifact(tmp_path / "short.json")
    assert excinfo.value.field.startswith("instance.K")

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subordination.report import ReportEnvelope, RunConfig, read_csv, read_json, to_native, write_csv, write_json


def envelope(rows, summary=None):
    cfg = RunConfig("simulate", {"beta": 0.5, "kind": "inverse-subordinator", "t": [0.1, 1.0]}, 7, "-", "csv", "0.1.0")
    return ReportEnvelope(cfg, {"columns": ["index", "value"], "rows": rows, "summary": summary or {"n": len(rows)}}, 12)


def test_to_native_converts_numpy():
    out = to_native({"a": np.float64(1.5), "b": np.arange(3), "c": (np.int64(2), np.bool_(True)), "d": 1 + 2j})
    assert out == {"a": 1.5, "b": [0, 1, 2], "c": [2, True], "d": {"re": 1.0, "im": 2.0}}
    assert type(out["a"]) is float and type(out["c"][1]) is bool


def test_schema_names_command():
    assert RunConfig("verify").schema == "subordination.verify/1"


def test_csv_header_echoes_config():
    text = write_csv(envelope([[0, 0.25]]))
    head = [line for line in text.splitlines() if line.startswith("#")]
    keys = [line[2:].split(":")[0] for line in head]
    assert keys == ["schema", "command", "seed", "params", "version", "output_path", "format", "summary", "wall_time_ms"]
    assert "# seed: 7" in head


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(allow_nan=False), min_size=0, max_size=20))
def test_csv_round_trip_exact(values):
    env = envelope([[i, v] for i, v in enumerate(values)])
    back = read_csv(write_csv(env))
    assert back.as_dict() == env.as_dict()


@settings(max_examples=50, deadline=None)
@given(values=st.lists(st.floats(allow_nan=False), min_size=0, max_size=20))
def test_json_round_trip_exact(values):
    env = envelope([[i, v] for i, v in enumerate(values)], {"passed": True, "nested": {"x": [1.0, 2.5]}})
    assert read_json(write_json(env)).as_dict() == env.as_dict()


def test_mixed_cells_round_trip():
    env = envelope([["ks.distance", 0.0031, 0.006, True], ["name, with comma", -math.inf, 1e-300, False]])
    env.results["columns"] = ["metric", "value", "threshold", "passed"]
    assert read_csv(write_csv(env)).as_dict() == env.as_dict()


def test_write_to_stream(tmp_path):
    env = envelope([[0, 1.0]])
    path = tmp_path / "r.json"
    with open(path, "w") as fh:
        write_json(env, fh)
    assert read_json(path.read_text()).results["rows"] == [[0, 1.0]]

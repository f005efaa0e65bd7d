"""Run configuration, report envelope and their CSV / JSON serialisations.

A CSV report is a block of ``#`` comment lines followed by a table::

    # schema: subordination.simulate/1
    # command: simulate
    # seed: 7
    # params: {"beta": 0.5, ...}
    # version: 0.1.0
    # output_path: -
    # format: csv
    # summary: {...}
    # wall_time_ms: 12
    index,value
    0,0.3141...

Only ``wall_time_ms`` changes between identical runs, so the table body is
byte-identical. Floats are written with ``repr`` and round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

import numpy as np

SCHEMA_VERSION = 1

__all__ = [
    "SCHEMA_VERSION",
    "RunConfig",
    "ReportEnvelope",
    "to_native",
    "write_csv",
    "read_csv",
    "write_json",
    "read_json",
]


def to_native(obj):
    """Recursively convert numpy scalars / arrays and tuples to JSON-ready values."""
    if isinstance(obj, dict):
        return {str(k): to_native(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_native(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_native(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    return obj


@dataclass
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    seed: int = 0
    output_path: str = "-"
    format: str = "csv"
    version: str = ""

    def __post_init__(self):
        self.params = to_native(self.params)

    @property
    def schema(self) -> str:
        return f"subordination.{self.command}/{SCHEMA_VERSION}"

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "params": self.params,
            "seed": self.seed,
            "output_path": self.output_path,
            "format": self.format,
            "version": self.version,
        }


@dataclass
class ReportEnvelope:
    """``results`` holds ``columns`` and ``rows`` (the table) plus a ``summary`` mapping."""

    config_echo: RunConfig
    results: dict
    wall_time_ms: int = 0

    def __post_init__(self):
        res = to_native(self.results)
        res.setdefault("columns", [])
        res.setdefault("rows", [])
        res.setdefault("summary", {})
        self.results = res

    def as_dict(self) -> dict:
        return {
            "schema": self.config_echo.schema,
            "config_echo": self.config_echo.as_dict(),
            "results": self.results,
            "wall_time_ms": int(self.wall_time_ms),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReportEnvelope":
        return cls(RunConfig(**d["config_echo"]), d["results"], d["wall_time_ms"])


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else {math.inf: "inf", -math.inf: "-inf"}.get(v, "nan")
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    text = str(v)
    if any(c in text for c in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def _parse_cell(text: str):
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    if text.startswith("{"):
        return json.loads(text)
    return text


def write_csv(env: ReportEnvelope, stream=None) -> str:
    """Serialise ``env`` as CSV; returns the text and writes it to ``stream`` if given."""
    cfg = env.config_echo
    buf = io.StringIO()
    header = {
        "schema": cfg.schema,
        "command": cfg.command,
        "seed": str(cfg.seed),
        "params": json.dumps(cfg.params, sort_keys=True),
        "version": cfg.version,
        "output_path": cfg.output_path,
        "format": cfg.format,
        "summary": json.dumps(env.results["summary"], sort_keys=True),
        "wall_time_ms": str(int(env.wall_time_ms)),
    }
    for key, value in header.items():
        buf.write(f"# {key}: {value}\n")
    buf.write(",".join(env.results["columns"]) + "\n")
    for row in env.results["rows"]:
        buf.write(",".join(_cell(v) for v in row) + "\n")
    text = buf.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def _split_row(line: str) -> list:
    return next(csv.reader([line]))


def read_csv(text: str) -> ReportEnvelope:
    header = {}
    lines = text.splitlines()
    i = 0
    while i < len(lines) and lines[i].startswith("#"):
        key, _, value = lines[i][2:].partition(": ")
        header[key] = value
        i += 1
    columns = _split_row(lines[i]) if i < len(lines) and lines[i] else []
    rows = [[_parse_cell(c) for c in _split_row(line)] for line in lines[i + 1 :]]
    cfg = RunConfig(
        command=header["command"],
        params=json.loads(header["params"]),
        seed=int(header["seed"]),
        output_path=header["output_path"],
        format=header["format"],
        version=header["version"],
    )
    results = {"columns": columns, "rows": rows, "summary": json.loads(header["summary"])}
    return ReportEnvelope(cfg, results, int(header["wall_time_ms"]))


def write_json(env: ReportEnvelope, stream=None) -> str:
    text = json.dumps(env.as_dict(), indent=2, sort_keys=True) + "\n"
    if stream is not None:
        stream.write(text)
    return text


def read_json(text: str) -> ReportEnvelope:
    return ReportEnvelope.from_dict(json.loads(text))

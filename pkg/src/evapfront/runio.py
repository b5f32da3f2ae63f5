"""Run output on disk: state snapshots, plus the CSV/JSON run records."""

from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import jsonschema
import numpy as np

from .errors import SnapshotMismatch, ValidationError
from .simulate import SimState

SNAPSHOT_FORMAT = "evapfront-snapshot"
SNAPSHOT_VERSION = 1

CSV_COLUMNS = ("step", "t", "t_nondim", "eta_inf", "eta_l2", "margin_worst", "wellposed",
               "p_min", "p_max", "nu_min", "nu_max")

REPORT_SCHEMA = {
    "type": "object",
    "required": ["status", "steps", "t_final", "config_hash", "time_units", "conventions",
                 "eta_inf_final", "margin", "bounds_ok", "files"],
    "properties": {
        "status": {"enum": ["ok", "halted", "failed"]},
        "steps": {"type": "integer", "minimum": 0},
        "t_final": {"type": "number"},
        "config_hash": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "time_units": {"type": "object", "required": ["t", "t_nondim"]},
        "conventions": {"type": "object"},
        "eta_inf_final": {"type": "number"},
        "margin": {
            "type": "object",
            "required": ["worst_max", "satisfied_all", "omega0"],
            "properties": {"worst_max": {"type": "number"}, "satisfied_all": {"type": "boolean"},
                           "omega0": {"type": "number"}},
        },
        "bounds_ok": {"type": "boolean"},
        "error": {"type": ["string", "null"]},
        "files": {"type": "object"},
    },
}


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _pack(a: np.ndarray) -> dict:
    a = np.ascontiguousarray(a, dtype="<f8")
    return {"shape": list(a.shape), "dtype": "<f8", "hex": a.tobytes().hex()}


def _unpack(d: dict) -> np.ndarray:
    if d.get("dtype") != "<f8":
        raise ValidationError(f"unsupported array dtype {d.get('dtype')!r}")
    raw = bytes.fromhex(d["hex"])
    return np.frombuffer(raw, dtype="<f8").reshape(d["shape"]).copy()


def snapshot_dict(state: SimState, config_hash: str, pressure: np.ndarray | None = None) -> dict:
    doc = {
        "format": SNAPSHOT_FORMAT,
        "version": SNAPSHOT_VERSION,
        "config_hash": config_hash,
        "step": state.step,
        "time_hex": float(state.time).hex(),
        "time": state.time,
        "eta": _pack(state.eta),
        "humidity": _pack(state.humidity),
    }
    if pressure is not None:
        doc["pressure"] = _pack(pressure)
    return doc


def write_snapshot(path, state: SimState, config_hash: str, pressure: np.ndarray | None = None) -> None:
    atomic_write_text(path, json.dumps(snapshot_dict(state, config_hash, pressure)))


def read_snapshot(path, config_hash: str | None = None) -> tuple[SimState, np.ndarray | None]:
    """Load a snapshot; with ``config_hash`` given, refuse a mismatch."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read snapshot {path}: {exc}") from exc
    if doc.get("format") != SNAPSHOT_FORMAT or doc.get("version") != SNAPSHOT_VERSION:
        raise ValidationError(f"{path} is not a version-{SNAPSHOT_VERSION} snapshot")
    if config_hash is not None and doc["config_hash"] != config_hash:
        raise SnapshotMismatch(f"snapshot {path} was written under config {doc['config_hash'][:12]}, "
                               f"current config is {config_hash[:12]}")
    state = SimState(_unpack(doc["eta"]), _unpack(doc["humidity"]), float.fromhex(doc["time_hex"]),
                     int(doc["step"]))
    p = _unpack(doc["pressure"]) if "pressure" in doc else None
    return state, p


class SeriesWriter:
    """CSV time series with a fixed header; rows must advance in time."""

    def __init__(self, path, append: bool = False):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        fresh = not (append and self.path.exists())
        self._fh = open(self.path, "w" if fresh else "a", newline="")
        self._w = csv.writer(self._fh)
        self._last_t = -np.inf
        if fresh:
            self._w.writerow(CSV_COLUMNS)

    def write(self, row: dict) -> None:
        if not row["t"] > self._last_t:
            raise ValidationError("time series rows must be strictly increasing in t")
        self._last_t = row["t"]
        self._w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])

    def close(self) -> None:
        self._fh.flush()
        self._fh.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def read_series(path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if tuple(rows[0]) != CSV_COLUMNS:
        raise ValidationError(f"unexpected CSV header in {path}")
    data = np.array(rows[1:], dtype=float).reshape(-1, len(CSV_COLUMNS))
    return {c: data[:, i] for i, c in enumerate(CSV_COLUMNS)}


def validate_report(report: dict) -> None:
    try:
        jsonschema.validate(report, REPORT_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"report does not match its schema: {exc.message}") from exc


def write_json(path, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True, default=_json_default) + "\n")


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not JSON serializable: {type(o)}")

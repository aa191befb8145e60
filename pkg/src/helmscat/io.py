"""On-disk formats: HSF1 field binaries, measurement/history/bench CSVs,
and the flat key=value run configuration."""

from __future__ import annotations

import csv
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

_MAGIC = b"HSF1"

# key -> (type, required-by commands, default)
_SCHEMA = {
    "side_length_cm": (float, {"simulate", "reconstruct", "bench"}, None),
    "grid_points": (int, {"simulate", "reconstruct", "bench"}, None),
    "wavelength_cm": (float, {"simulate", "reconstruct", "bench"}, None),
    "eta_b": (float, set(), 1.0),
    "abl_points": (int, set(), 0),
    "beta": (float, set(), 0.0),
    "mg_levels": (int, set(), 2),
    "nu1": (int, set(), 1),
    "nu2": (int, set(), 1),
    "omega_s": (float, set(), 0.8),
    "cycle_type": (int, set(), 1),
    "solver_tol": (float, set(), 1e-6),
    "solver_max_iter": (int, set(), 500),
    "model": (str, set(), "mgh"),
    "num_views": (int, {"simulate", "reconstruct"}, None),
    "num_sensors": (int, {"simulate", "reconstruct"}, None),
    "sensor_radius_cm": (float, {"simulate", "reconstruct"}, None),
    "active_sensors": (int, set(), 0),
    "scene": (str, set(), "disk"),
    "disk_radius_cm": (float, set(), 0.0),
    "disk_eta": (float, set(), 1.0),
    "phantom_disks": (str, set(), ""),
    "scene_file": (str, set(), ""),
    "measurements_file": (str, {"reconstruct"}, None),
    "ground_truth_file": (str, set(), ""),
    "gamma": (float, {"reconstruct"}, None),
    "tau": (float, {"reconstruct"}, None),
    "iterations": (int, {"reconstruct"}, None),
    "subset_size": (int, set(), 0),
    "seed": (int, set(), 0),
    "inner_prox_iterations": (int, set(), 50),
    "contrast_list": (str, set(), ""),
    "radius_list_lambda": (str, set(), ""),
    "bench_models": (str, set(), "lis,mgh"),
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    values: dict

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name) from None


def parse_config(path: str | Path, command: str) -> RunConfig:
    """Parse a flat key=value document; unknown keys are rejected and the
    required keys for ``command`` must all be present."""
    values = {}
    text = Path(path).read_text()
    for ln, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _SCHEMA:
            raise ConfigError(f"line {ln}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {ln}: duplicate key {key!r}")
        caster = _SCHEMA[key][0]
        try:
            values[key] = caster(val)
        except ValueError:
            raise ConfigError(
                f"line {ln}: cannot parse {val!r} as {caster.__name__}"
            ) from None
    for key, (_, required_by, default) in _SCHEMA.items():
        if key in values:
            continue
        if command in required_by:
            raise ConfigError(f"missing required key {key!r}")
        values[key] = default
    return RunConfig(values)


def parse_float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def write_field(path: str | Path, arr: np.ndarray):
    """HSF1 binary: magic, little-endian u32 rows, u32 cols, u8 kind
    (0 = real float64, 1 = complex interleaved float64), row-major payload."""
    arr = np.ascontiguousarray(arr)
    if arr.ndim != 2:
        raise ValueError("field must be 2-D")
    if np.iscomplexobj(arr):
        kind = 1
        payload = arr.astype(np.complex128)
        raw = np.empty(arr.shape + (2,), dtype="<f8")
        raw[..., 0] = payload.real
        raw[..., 1] = payload.imag
        body = raw.tobytes()
    else:
        kind = 0
        body = arr.astype("<f8").tobytes()
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<IIB", arr.shape[0], arr.shape[1], kind))
        fh.write(body)


def read_field(path: str | Path) -> np.ndarray:
    with open(path, "rb") as fh:
        if fh.read(4) != _MAGIC:
            raise ValueError(f"{path}: not an HSF1 field file")
        rows, cols, kind = struct.unpack("<IIB", fh.read(9))
        body = fh.read()
    if kind == 0:
        return np.frombuffer(body, dtype="<f8").reshape(rows, cols).copy()
    if kind == 1:
        raw = np.frombuffer(body, dtype="<f8").reshape(rows, cols, 2)
        return (raw[..., 0] + 1j * raw[..., 1]).copy()
    raise ValueError(f"{path}: unknown field kind {kind}")


def _fmt(x) -> str:
    # repr of a Python float is the shortest round-trip representation
    return repr(float(x))


def write_measurements_csv(path: str | Path, geometry, views: list[np.ndarray]):
    """One row per active sensor per view, header view,sensor,re,im."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["view", "sensor", "re", "im"])
        for q, y in enumerate(views):
            sensor_ids = np.flatnonzero(geometry.active[q])
            for sid, val in zip(sensor_ids, y):
                w.writerow([q, sid, _fmt(val.real), _fmt(val.imag)])


def read_measurements_csv(path: str | Path, geometry):
    from .forward import MeasurementSet
    per_view = {q: {} for q in range(geometry.num_views)}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            q = int(row["view"])
            per_view[q][int(row["sensor"])] = (
                float(row["re"]) + 1j * float(row["im"]))
    views = []
    for q in range(geometry.num_views):
        sensor_ids = np.flatnonzero(geometry.active[q])
        missing = [s for s in sensor_ids if s not in per_view[q]]
        if missing:
            raise ValueError(f"view {q}: missing sensors {missing[:5]}")
        views.append(np.array([per_view[q][s] for s in sensor_ids]))
    return MeasurementSet(views)


def write_rows_csv(path: str | Path, header: list[str], rows: list[list]):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, float) else v for v in row])

"""Scan files (CSV matrix + JSON sidecar), config documents and JSON reports."""
from __future__ import annotations

import csv
import hashlib
import io as _io
import json
import math
import os
from pathlib import Path
import tempfile

import numpy as np

from .core import (
    CHANNELS, DERIVED_CHANNELS, FRAMES, Bscan, ConfigurationError, ScanFormatError,
    SurveyGrid, TargetModel, ValidationError,
)

FORMAT_VERSION = 1
META_KEYS = {"format_version", "dt_ns", "dx_m", "n_samples", "n_traces", "epsilon_r",
             "channel", "frame"}


def stem_of(path) -> Path:
    p = Path(path)
    return p.with_suffix("") if p.suffix in (".csv", ".json") else p


def atomic_write(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_matrix(data: np.ndarray, na: str = "nan") -> str:
    # repr() of a Python float is the shortest string that round-trips binary64
    lines = []
    for row in np.asarray(data, dtype=np.float64).tolist():
        lines.append(",".join(na if math.isnan(v) else repr(v) for v in row))
    return "\n".join(lines) + "\n"


def dumps_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def write_scan(b: Bscan, path_stem):
    """Write ``<stem>.csv`` and ``<stem>.json``; returns the two paths."""
    stem = stem_of(path_stem)
    meta = {"format_version": FORMAT_VERSION, "dt_ns": b.grid.dt, "dx_m": b.grid.dx,
            "n_samples": b.grid.n_samples, "n_traces": b.grid.n_traces,
            "epsilon_r": b.grid.epsilon_r, "channel": b.channel, "frame": b.frame}
    data_path = stem.with_suffix(".csv")
    meta_path = stem.with_suffix(".json")
    atomic_write(data_path, format_matrix(b.data))
    atomic_write(meta_path, dumps_json(meta))
    return data_path, meta_path


def _parse_value(text: str, row: int, col: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ScanFormatError(f"row {row}, column {col}: cannot parse {text!r} as a number") from None
    if not math.isfinite(v):
        raise ScanFormatError(f"row {row}, column {col}: value {text!r} is not finite (overflow or NaN)")
    return v


def read_meta(meta_path) -> dict:
    try:
        meta = json.loads(Path(meta_path).read_text())
    except json.JSONDecodeError as exc:
        raise ScanFormatError(f"{meta_path}: invalid JSON ({exc})") from None
    if not isinstance(meta, dict) or set(meta) != META_KEYS:
        got = sorted(meta) if isinstance(meta, dict) else type(meta).__name__
        raise ScanFormatError(f"{meta_path}: metadata keys must be exactly {sorted(META_KEYS)}, got {got}")
    if meta["format_version"] != FORMAT_VERSION:
        raise ScanFormatError(f"{meta_path}: unsupported format_version {meta['format_version']!r}")
    if meta["channel"] not in CHANNELS + DERIVED_CHANNELS:
        raise ScanFormatError(f"{meta_path}: unknown channel {meta['channel']!r}")
    if meta["frame"] not in FRAMES:
        raise ScanFormatError(f"{meta_path}: unknown frame {meta['frame']!r}")
    return meta


def read_scan(path_stem) -> Bscan:
    stem = stem_of(path_stem)
    data_path, meta_path = stem.with_suffix(".csv"), stem.with_suffix(".json")
    meta = read_meta(meta_path)
    try:
        grid = SurveyGrid(dt=meta["dt_ns"], dx=meta["dx_m"], n_samples=meta["n_samples"],
                          n_traces=meta["n_traces"], epsilon_r=meta["epsilon_r"])
    except ValidationError as exc:
        raise ScanFormatError(f"{meta_path}: {exc}") from None
    rows = []
    with open(data_path, newline="") as fh:
        for i, rec in enumerate(csv.reader(fh), start=1):
            if len(rec) != grid.n_traces:
                raise ScanFormatError(
                    f"{data_path}: row {i} has {len(rec)} columns, metadata says n_traces = {grid.n_traces}")
            rows.append([_parse_value(v, i, j) for j, v in enumerate(rec, start=1)])
    if len(rows) != grid.n_samples:
        raise ScanFormatError(
            f"{data_path}: {len(rows)} rows, metadata says n_samples = {grid.n_samples}")
    return Bscan(grid, meta["channel"], meta["frame"], np.array(rows, dtype=np.float64))


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def scan_digests(path_stem) -> dict:
    stem = stem_of(path_stem)
    return {str(p): file_digest(p) for p in (stem.with_suffix(".csv"), stem.with_suffix(".json"))}


# ---- config documents ------------------------------------------------------

def _build(cls, block, where):
    if block is None:
        return cls()
    if not isinstance(block, dict):
        raise ConfigurationError(f"{where} must be an object")
    allowed = set(cls.__dataclass_fields__)
    unknown = set(block) - allowed
    if unknown:
        raise ConfigurationError(f"unknown keys in {where}: {sorted(unknown)}")
    try:
        return cls(**block)
    except TypeError as exc:
        raise ConfigurationError(f"{where}: {exc}") from None


def _check_keys(doc, allowed, where):
    if not isinstance(doc, dict):
        raise ConfigurationError(f"{where} must be a JSON object")
    unknown = set(doc) - set(allowed)
    if unknown:
        raise ConfigurationError(f"unknown keys in {where}: {sorted(unknown)}")


def load_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None


def scene_from_dict(doc: dict):
    from .evaluation import Scene
    from .simulator import ClutterSpec, WaveletSpec

    _check_keys(doc, {"target", "grid", "wavelet", "clutter", "attenuation", "theta_jitter"}, "scene")
    return Scene(
        target=_build(TargetModel, doc.get("target"), "target"),
        grid=_build(SurveyGrid, doc.get("grid"), "grid"),
        wavelet=_build(WaveletSpec, doc.get("wavelet"), "wavelet"),
        clutter=_build(ClutterSpec, doc.get("clutter"), "clutter"),
        attenuation=doc.get("attenuation", 0.0),
        theta_jitter=doc.get("theta_jitter", 0.0),
    )


def scene_to_dict(scene) -> dict:
    from dataclasses import asdict
    return {"target": asdict(scene.target), "grid": asdict(scene.grid),
            "wavelet": asdict(scene.wavelet), "clutter": asdict(scene.clutter),
            "attenuation": scene.attenuation, "theta_jitter": scene.theta_jitter}


def plan_from_dict(doc: dict):
    from .evaluation import ExperimentPlan
    from .simulator import ClutterSpec, WaveletSpec

    fields = set(ExperimentPlan.__dataclass_fields__)
    _check_keys(doc, fields, "plan")
    kw = dict(doc)
    for key, cls in (("clutter", ClutterSpec), ("grid", SurveyGrid), ("wavelet", WaveletSpec)):
        if key in kw:
            kw[key] = _build(cls, kw[key], key)
    try:
        return ExperimentPlan(**kw)
    except TypeError as exc:
        raise ConfigurationError(f"plan: {exc}") from None


def rows_to_csv(rows: list, columns: list | None = None) -> str:
    if not rows:
        return ""
    columns = columns or list(rows[0])
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow(["" if r.get(c) is None else (repr(r[c]) if isinstance(r[c], float) else r[c])
                    for c in columns])
    return buf.getvalue()


def heatmap_csv(data: np.ndarray, times, positions) -> str:
    """Dense grid with a header row of trace positions and a leading time column."""
    header = "t_ns," + ",".join(repr(float(x)) for x in positions)
    body = format_matrix(np.column_stack([np.asarray(times, float), data]))
    return header + "\n" + body

"""CSV / JSON readers and writers for datasets, models and vector files."""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InvalidParameterError
from .oracle import Dataset
from .poly import PolyModel

DATASET_COLUMNS = ("fx", "fy", "fz", "vx", "vy", "vz")
FORMAT_VERSION = 1


def _fmt(v) -> str:
    return repr(float(v))


def write_rows(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def read_columns(path, columns) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in columns if c not in (reader.fieldnames or [])]
        if missing:
            raise InvalidParameterError(f"{path}: missing columns {missing}")
        rows = [[float(r[c]) for c in columns] for r in reader]
    return np.array(rows, dtype=float).reshape(-1, len(columns))


def sidecar(path) -> Path:
    return Path(path).with_suffix(".json")


def write_dataset(ds: Dataset, path):
    path = Path(path)
    write_rows(path, DATASET_COLUMNS, np.hstack([ds.F, ds.V]).tolist())
    meta = {"format_version": FORMAT_VERSION, **ds.metadata}
    sidecar(path).write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def read_dataset(path) -> Dataset:
    data = read_columns(path, DATASET_COLUMNS)
    meta_path = sidecar(path)
    meta = json.loads(meta_path.read_text()) if meta_path.exists() else {}
    return Dataset(data[:, :3], data[:, 3:], meta)


def write_model(model: PolyModel, path):
    Path(path).write_text(model.dumps() + "\n")


def read_model(path) -> PolyModel:
    return PolyModel.from_json(json.loads(Path(path).read_text()))

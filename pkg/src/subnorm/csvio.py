"""CSV and JSON readers/writers.

CSV files are comma separated with ``.`` as decimal mark and an optional
header row. Floats are written with 17 significant digits so values
round-trip exactly. Writers go through a temporary file and a rename, so a
crash never leaves a half-written output behind.
"""
from __future__ import annotations

import csv
import json
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = [
    "read_matrix",
    "read_vector",
    "write_matrix",
    "write_vector",
    "write_rows",
    "write_json",
    "atomic_write_text",
]


def _is_number(tok):
    try:
        float(tok)
    except ValueError:
        return False
    return True


def _read_rows(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if rows and not all(_is_number(c) for c in rows[0]):
        rows = rows[1:]
    return rows


def read_matrix(path):
    rows = _read_rows(path)
    if not rows:
        raise ValueError(f"{path}: no numeric rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ValueError(f"{path}: ragged rows")
    return np.array([[float(c) for c in r] for r in rows], dtype=float)


def read_vector(path):
    """Read a vector stored either as one row or as one column."""
    M = read_matrix(path)
    if M.shape[0] == 1 or M.shape[1] == 1:
        return M.ravel()
    raise ValueError(f"{path}: expected a single row or column, got shape {M.shape}")


def atomic_write_text(path, text):
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


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return format(float(x), ".17g")
    return str(x)


def write_rows(path, rows, header=None):
    lines = []
    if header is not None:
        lines.append(",".join(header))
    for r in rows:
        lines.append(",".join(_fmt(x) for x in r))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_matrix(path, M, header=None):
    M = np.atleast_2d(np.asarray(M, dtype=float))
    write_rows(path, M.tolist(), header)


def write_vector(path, v, header=None):
    """Write a vector as a single column."""
    v = np.asarray(v, dtype=float).ravel()
    write_rows(path, [[x] for x in v.tolist()], header)


class _Encoder(json.JSONEncoder):
    def default(self, o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, (set, frozenset)):
            return sorted(o)
        return super().default(o)


def to_json(obj):
    return json.dumps(obj, cls=_Encoder, indent=2, sort_keys=True)


def write_json(path, obj):
    atomic_write_text(path, to_json(obj) + "\n")

"""CSV and JSON helpers.

CSV files are UTF-8, comma separated, with one header row.  Numbers are
written with 17 significant digits so that a write/read cycle reproduces
the floating point matrix bit for bit.
"""

from __future__ import annotations

import csv
import json
from importlib import resources

import numpy as np

from .errors import InvalidData

__all__ = ["read_csv", "write_csv", "format_csv", "select_columns", "load_schema", "dump_json"]


def read_csv(path):
    """Return ``(header, matrix)`` for a headed numeric CSV file."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise InvalidData(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = [r for r in rows[1:] if r and any(c.strip() for c in r)]
    if not body:
        raise InvalidData(f"{path}: no data rows")
    try:
        X = np.array([[float(c) for c in r] for r in body], dtype=float)
    except ValueError as exc:
        raise InvalidData(f"{path}: non-numeric entry ({exc})") from None
    if X.ndim != 2 or X.shape[1] != len(header):
        raise InvalidData(f"{path}: ragged rows or header/column mismatch")
    return header, X


def format_csv(header, X) -> str:
    X = np.atleast_2d(np.asarray(X, dtype=float))
    lines = [",".join(header)]
    lines += [",".join(f"{v:.17g}" for v in row) for row in X]
    return "\n".join(lines) + "\n"


def write_csv(path, header, X):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(format_csv(header, X))


def select_columns(header, X, spec):
    """Pick columns by comma-separated names or 0-based indices (``None`` = all)."""
    if spec is None:
        return list(header), X
    keys = [k.strip() for k in (spec.split(",") if isinstance(spec, str) else spec)]
    idx = []
    for k in keys:
        if k in header:
            idx.append(header.index(k))
        elif k.lstrip("-").isdigit() and -len(header) <= int(k) < len(header):
            idx.append(int(k) % len(header))
        else:
            raise InvalidData(f"unknown column {k!r}; header is {header}")
    return [header[i] for i in idx], X[:, idx]


def load_schema(name: str) -> dict:
    """Load one of the shipped JSON schemas (``region``, ``regression``, ``risk_report``)."""
    text = resources.files("mdepth").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False)

"""JSON wire formats.

Matrices travel as ``{"dim": n, "entries": [[[re, im], ...], ...]}`` in row-major
order. Complex scalars inside other documents are ``[re, im]`` pairs.
"""
from __future__ import annotations

import json
from typing import Any

import numpy as np

from .errors import DimensionMismatch, QdmError


class FormatError(QdmError):
    """Malformed JSON document."""


def complex_to_json(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(pair) -> complex:
    if isinstance(pair, (int, float)):
        return complex(pair)
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise FormatError(f"expected [re, im], got {pair!r}")
    re, im = pair
    if not all(isinstance(x, (int, float)) for x in (re, im)):
        raise FormatError(f"non-numeric complex entry {pair!r}")
    return complex(re, im)


def matrix_to_json(m) -> dict[str, Any]:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"not a square matrix: {m.shape}")
    return {
        "dim": int(m.shape[0]),
        "entries": [[complex_to_json(z) for z in row] for row in m],
    }


def matrix_from_json(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "entries" not in doc:
        raise FormatError("matrix document needs an 'entries' field")
    rows = doc["entries"]
    if not isinstance(rows, list) or not rows:
        raise FormatError("'entries' must be a non-empty list of rows")
    dim = doc.get("dim", len(rows))
    if not isinstance(dim, int) or dim != len(rows):
        raise FormatError(f"'dim' = {dim!r} does not match {len(rows)} rows")
    out = np.empty((dim, dim), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != dim:
            raise FormatError(f"row {i} is ragged (expected {dim} entries)")
        for j, z in enumerate(row):
            out[i, j] = complex_from_json(z)
    return out


def dumps(doc) -> str:
    """Deterministic JSON text: sorted keys, fixed separators."""
    return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=None)


def load_json_file(path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from exc

"""JSON wire helpers.

Complex numbers travel as ``[re, im]`` pairs and matrices as row lists of
such pairs.  ``canonical_json`` is a deterministic serializer: object keys
are sorted, floats are emitted with 17 significant digits (exact round
trip), and infinities become the string sentinels ``"inf"`` / ``"-inf"``
(JSON has no infinity literal).
"""

from __future__ import annotations

import hashlib
import json
import math

import numpy as np


def complex_to_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def matrix_to_json(m: np.ndarray) -> list[list[list[float]]]:
    m = np.asarray(m, dtype=complex)
    return [[complex_to_pair(z) for z in row] for row in m]


def vector_to_json(v: np.ndarray) -> list[list[float]]:
    return [complex_to_pair(z) for z in np.asarray(v, dtype=complex)]


def _pair_to_complex(entry, what: str) -> complex:
    if (
        not isinstance(entry, (list, tuple))
        or len(entry) != 2
        or not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in entry)
    ):
        raise ValueError(f"{what}: each entry must be a [re, im] pair of numbers")
    z = complex(float(entry[0]), float(entry[1]))
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what}: entries must be finite")
    return z


def json_to_matrix(rows, what: str = "matrix") -> np.ndarray:
    if not isinstance(rows, list) or not rows:
        raise ValueError(f"{what}: expected a nonempty list of rows")
    parsed = []
    width = None
    for row in rows:
        if not isinstance(row, list) or not row:
            raise ValueError(f"{what}: each row must be a nonempty list")
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ValueError(f"{what}: rows have inconsistent lengths")
        parsed.append([_pair_to_complex(e, what) for e in row])
    return np.array(parsed, dtype=complex)


def json_to_vector(entries, what: str = "vector") -> np.ndarray:
    if not isinstance(entries, list) or not entries:
        raise ValueError(f"{what}: expected a nonempty list of [re, im] pairs")
    return np.array([_pair_to_complex(e, what) for e in entries], dtype=complex)


def _format_float(x: float) -> str:
    if math.isnan(x):
        raise ValueError("NaN is not representable in report JSON")
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    text = format(x, ".17g")
    return text


def _write(obj, out: list[str]) -> None:
    if obj is None:
        out.append("null")
    elif obj is True:
        out.append("true")
    elif obj is False:
        out.append("false")
    elif isinstance(obj, str):
        out.append(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(_format_float(float(obj)))
    elif isinstance(obj, dict):
        out.append("{")
        first = True
        for key in sorted(obj):
            if not isinstance(key, str):
                raise TypeError(f"object keys must be strings, got {type(key).__name__}")
            if not first:
                out.append(",")
            first = False
            out.append(json.dumps(key, ensure_ascii=False))
            out.append(":")
            _write(obj[key], out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, item in enumerate(obj):
            if i:
                out.append(",")
            _write(item, out)
        out.append("]")
    else:
        raise TypeError(f"cannot serialize {type(obj).__name__}; encode it first")


def canonical_json(obj) -> str:
    """Deterministic JSON text for `obj` (sorted keys, 17-digit floats)."""
    out: list[str] = []
    _write(obj, out)
    return "".join(out)


def input_digest(doc) -> str:
    """SHA-256 hex digest of the canonicalized document."""
    return hashlib.sha256(canonical_json(doc).encode("utf-8")).hexdigest()

"""Matrix and state file I/O.

Schema: {"dim": n, "re": [[...]], "im": [[...]]}; density states may add
{"trace_tol": ...}.  Serialization is deterministic (sorted keys) so equal
inputs produce byte-identical files.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import MaxFDivError
from .linalg import DensityState, density_state, TOL_TRACE


class SchemaError(MaxFDivError):
    """Input file does not match the matrix schema; message names the field."""


def matrix_to_dict(a: np.ndarray) -> dict:
    a = np.asarray(a, dtype=complex)
    return {
        "dim": int(a.shape[0]),
        "re": a.real.tolist(),
        "im": a.imag.tolist(),
    }


def matrix_from_dict(d: dict) -> np.ndarray:
    for field in ("dim", "re", "im"):
        if field not in d:
            raise SchemaError(f"missing field '{field}'")
    n = d["dim"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError(f"field 'dim' must be a positive integer, got {n!r}")
    re = np.asarray(d["re"], dtype=float)
    im = np.asarray(d["im"], dtype=float)
    if re.shape != (n, n):
        raise SchemaError(f"field 're' has shape {re.shape}, expected ({n}, {n})")
    if im.shape != (n, n):
        raise SchemaError(f"field 'im' has shape {im.shape}, expected ({n}, {n})")
    return re + 1j * im


def density_to_dict(state: DensityState, trace_tol: float = TOL_TRACE) -> dict:
    d = matrix_to_dict(state.matrix)
    d["trace_tol"] = trace_tol
    return d


def density_from_dict(d: dict) -> DensityState:
    m = matrix_from_dict(d)
    tol = d.get("trace_tol", TOL_TRACE)
    if not isinstance(tol, (int, float)) or tol <= 0:
        raise SchemaError(f"field 'trace_tol' must be a positive number, got {tol!r}")
    return density_state(m, tol_trace=float(tol))


def json_dumps(obj) -> str:
    """Deterministic JSON encoding (sorted keys, fixed separators)."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def save_density(state: DensityState, path: str | Path) -> None:
    Path(path).write_text(json_dumps(density_to_dict(state)) + "\n")


def load_density(path: str | Path) -> DensityState:
    text = Path(path).read_text()
    try:
        d = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"malformed JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(d, dict):
        raise SchemaError("top-level JSON value must be an object")
    return density_from_dict(d)

"""JSON matrix format: ``{"n": int, "entries": [[[re, im], ...], ...]}``, row-major."""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import MatrixFormatError


def matrix_to_obj(M) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {
        "n": int(M.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in M],
    }


def complex_list(values) -> list:
    return [[float(z.real), float(z.imag)] for z in np.asarray(values, dtype=np.complex128)]


def _number(x, where):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise MatrixFormatError(f"{where}: expected a number, got {x!r}")
    if not math.isfinite(x):
        raise MatrixFormatError(f"{where}: non-finite value {x!r}")
    return float(x)


def matrix_from_obj(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise MatrixFormatError('matrix object needs keys "n" and "entries"')
    n = obj["n"]
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise MatrixFormatError(f'"n" must be a positive integer, got {n!r}')
    rows = obj["entries"]
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixFormatError(f"expected {n} rows")
    M = np.empty((n, n), dtype=np.complex128)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise MatrixFormatError(f"row {i} must have {n} entries (matrix must be square)")
        for j, pair in enumerate(row):
            if not isinstance(pair, list) or len(pair) != 2:
                raise MatrixFormatError(f"entry ({i},{j}) must be a [re, im] pair")
            M[i, j] = complex(_number(pair[0], f"entry ({i},{j})"), _number(pair[1], f"entry ({i},{j})"))
    return M


def loads_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MatrixFormatError(f"malformed JSON: {exc}") from None
    return matrix_from_obj(obj)


def load_matrix(path) -> np.ndarray:
    """Read a matrix file; raises ``OSError`` or :class:`MatrixFormatError`."""
    return loads_matrix(Path(path).read_text(encoding="utf-8"))


def save_matrix(M, path) -> Path:
    path = Path(path)
    path.write_text(json.dumps(matrix_to_obj(M)) + "\n", encoding="utf-8")
    return path

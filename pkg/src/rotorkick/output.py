"""Bit-stable result emission: CSV/JSON writers with atomic file replacement."""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np


def fmt(value) -> str:
    """Render a number with 15 significant digits and a '.' decimal separator."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.15g}"


def atomic_write_text(path: str, text: str) -> None:
    """Write via a temporary file in the same directory, then rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_csv(path: str, header: list[str], rows, config_hash: str | None = None) -> None:
    """Comma-separated table with a header row and a provenance comment line."""
    lines = []
    if config_hash is not None:
        lines.append(f"# config-hash: {config_hash}")
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(fmt(v) if not isinstance(v, str) else v for v in row))
    atomic_write_text(path, "\n".join(lines) + "\n")


def write_json(path: str, payload, config_hash: str | None = None) -> None:
    """UTF-8 JSON with sorted keys; the config hash rides inside the payload."""
    if config_hash is not None and isinstance(payload, dict):
        payload = {**payload, "config_hash": config_hash}
    atomic_write_text(path, json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n")


def matrix_rows(matrix: np.ndarray):
    """Row-major rows of alternating re/im pairs for a dense complex matrix."""
    mat = np.asarray(matrix, dtype=complex)
    for row in mat:
        out = []
        for entry in row:
            out.append(entry.real)
            out.append(entry.imag)
        yield out


def write_matrix_csv(path: str, matrix: np.ndarray, config_hash: str | None = None) -> None:
    n = np.asarray(matrix).shape[1]
    header = []
    for k in range(n):
        header.extend([f"re_{k}", f"im_{k}"])
    write_csv(path, header, matrix_rows(matrix), config_hash)


def matrix_to_jsonable(matrix: np.ndarray) -> dict:
    mat = np.asarray(matrix, dtype=complex)
    return {
        "shape": list(mat.shape),
        "entries": [[entry.real, entry.imag] for entry in mat.ravel()],
    }

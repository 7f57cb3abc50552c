"""
Artifact I/O: atomic JSON and CSV writers plus strict readers.

Design constraints
------------------
- Writes are atomic (temp file + replace), so a crashed sweep never leaves a
  truncated artifact behind.
- Serialization is deterministic: sorted JSON keys, LF newlines, UTF-8, and
  floats in CSV rendered with 17 significant digits.
- CSV files hold data only; provenance goes into JSON sidecars.
"""

from __future__ import annotations

import csv
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError

CSV_FLOAT_FORMAT = ".17g"


@dataclass(frozen=True, slots=True)
class JsonWriteOptions:
    """Options controlling JSON serialization."""

    indent: int = 2
    sort_keys: bool = True
    ensure_ascii: bool = False


def json_default(value: object) -> Any:
    """Encode NumPy scalars and arrays as plain JSON values."""
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Path):
        return str(value)
    raise TypeError(f"{type(value).__name__} is not JSON serializable")


def _replace_atomically(target: Path, temp_path: Path) -> None:
    try:
        os.replace(temp_path, target)
    except OSError:
        temp_path.unlink(missing_ok=True)
        raise


def write_json_atomic(
    json_path: Path,
    payload: Mapping[str, Any],
    *,
    options: JsonWriteOptions | None = None,
) -> None:
    """
    Write JSON atomically to disk.

    Parameters
    ----------
    json_path:
        Target JSON file path.
    payload:
        JSON-serializable mapping to persist.
    options:
        Serialization options.

    Notes
    -----
    Non-finite floats are rejected (``allow_nan=False``) so every artifact is
    strict JSON.
    """
    opts = options or JsonWriteOptions()
    json_path = json_path.expanduser()
    json_path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = json_path.with_suffix(json_path.suffix + ".tmp")
    with temp_path.open("w", encoding="utf-8", newline="\n") as handle:
        json.dump(
            payload,
            handle,
            indent=opts.indent,
            sort_keys=opts.sort_keys,
            ensure_ascii=opts.ensure_ascii,
            allow_nan=False,
            default=json_default,
        )
        handle.write("\n")
    _replace_atomically(json_path, temp_path)


def read_json(json_path: Path) -> dict[str, Any]:
    """
    Read a JSON object from disk.

    Raises
    ------
    ConfigError
        If the file cannot be read, is not valid JSON, or is not an object.
    """
    try:
        payload = json.loads(json_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"Cannot read {json_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"Invalid JSON in {json_path}: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError(f"{json_path} must contain a JSON object")
    return payload


def format_cell(value: object) -> str:
    """Render one CSV cell; floats use 17 significant digits."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return format(value, CSV_FLOAT_FORMAT)
    if isinstance(value, np.generic):
        return format_cell(value.item())
    return str(value)


def write_csv_atomic(
    csv_path: Path,
    header: Sequence[str],
    rows: Iterable[Sequence[object]],
) -> int:
    """
    Write a CSV table atomically.

    Returns
    -------
    int
        Number of data rows written.
    """
    csv_path = csv_path.expanduser()
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    temp_path = csv_path.with_suffix(csv_path.suffix + ".tmp")
    count = 0
    with temp_path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            if len(row) != len(header):
                raise ValueError(f"row {count} has {len(row)} cells, header has {len(header)}")
            writer.writerow([format_cell(cell) for cell in row])
            count += 1
    _replace_atomically(csv_path, temp_path)
    return count


def read_csv_columns(csv_path: Path) -> dict[str, list[float]]:
    """
    Read a numeric CSV written by :func:`write_csv_atomic` into columns.

    Raises
    ------
    ConfigError
        If the file is missing, empty, or has non-numeric cells.
    """
    try:
        with csv_path.open("r", encoding="utf-8", newline="") as handle:
            rows = list(csv.reader(handle))
    except OSError as exc:
        raise ConfigError(f"Cannot read {csv_path}: {exc}") from exc
    if not rows:
        raise ConfigError(f"{csv_path} is empty")
    header = rows[0]
    columns: dict[str, list[float]] = {name: [] for name in header}
    try:
        for row in rows[1:]:
            for name, cell in zip(header, row, strict=True):
                columns[name].append(float(cell))
    except ValueError as exc:
        raise ConfigError(f"{csv_path}: non-numeric or ragged row ({exc})") from exc
    return columns

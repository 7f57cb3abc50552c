"""
Path CSV schema.

Columns are ``s`` followed by the positions and velocities (``x, v`` for a
one-parameter path, ``x1..xM, v1..vM`` otherwise), then ``speed`` and the
cumulative ``epsilon`` under the model's metric. A knot where the gap closes has
``speed = inf``. Solver diagnostics go into a JSON sidecar with the same stem,
so the CSV stays plain data. :func:`read_path` needs only ``s``, positions and
velocities.
"""

from __future__ import annotations

from pathlib import Path
from typing import Any, Mapping

import numpy as np

from ..artifacts import read_csv_columns, write_csv_atomic, write_json_atomic
from ..errors import ConfigError
from ..metric.field import MetricField
from ..metric.path_error import knot_profile
from ..schedule import ControlPath
from ..tolerances import DEFAULT_TOLERANCES, Tolerances

PROFILE_COLUMNS = ("speed", "epsilon")


def path_columns(param_dim: int) -> tuple[list[str], list[str]]:
    """Position and velocity column names for a path of the given dimension."""
    if param_dim == 1:
        return ["x"], ["v"]
    return [f"x{i + 1}" for i in range(param_dim)], [f"v{i + 1}" for i in range(param_dim)]


def sidecar_path(csv_path: Path) -> Path:
    return csv_path.with_suffix(".json")


def write_path(
    csv_path: Path,
    path: ControlPath,
    field: MetricField,
    sidecar: Mapping[str, Any] | None = None,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> Path:
    """
    Write ``path`` as CSV plus a JSON sidecar (path metadata merged with ``sidecar``).

    Parameters
    ----------
    csv_path:
        Target CSV; the sidecar takes the same stem with ``.json``.
    path:
        Schedule to export.
    field:
        Metric that defines the ``speed`` and ``epsilon`` columns.
    sidecar:
        Extra JSON entries.
    tolerances:
        ``path_rel_tol`` controls the knot-to-knot eps quadrature.

    Returns
    -------
    pathlib.Path
        The sidecar path.
    """
    positions, velocities = path_columns(path.param_dim)
    speeds, epsilon = knot_profile(field, path, tolerances=tolerances)
    rows = (
        [
            float(path.s[k]),
            *path.x[k].tolist(),
            *path.velocity[k].tolist(),
            float(speeds[k]),
            float(epsilon[k]),
        ]
        for k in range(path.knots)
    )
    write_csv_atomic(csv_path, ["s", *positions, *velocities, *PROFILE_COLUMNS], rows)
    document = {
        "label": path.label,
        "knots": path.knots,
        "param_dim": path.param_dim,
        "epsilon": float(epsilon[-1]),
        "singular_knots": int(np.count_nonzero(np.isinf(speeds))),
        "metadata": dict(path.metadata),
        **dict(sidecar or {}),
    }
    target = sidecar_path(csv_path)
    write_json_atomic(target, document)
    return target


def read_path(csv_path: Path) -> ControlPath:
    """
    Read a path CSV.

    Raises
    ------
    ConfigError
        If the file does not follow the path schema.
    """
    columns = read_csv_columns(csv_path)
    if "s" not in columns:
        raise ConfigError(f"{csv_path} has no s column")
    if "x" in columns:
        param_dim = 1
    else:
        param_dim = sum(1 for name in columns if name.startswith("x") and name[1:].isdigit())
    if param_dim == 0:
        raise ConfigError(f"{csv_path} has no position columns")
    positions, velocities = path_columns(param_dim)
    missing = [name for name in (*positions, *velocities) if name not in columns]
    if missing:
        raise ConfigError(f"{csv_path} is missing columns: {', '.join(missing)}")
    try:
        return ControlPath(
            s=np.asarray(columns["s"]),
            x=np.column_stack([columns[name] for name in positions]),
            velocity=np.column_stack([columns[name] for name in velocities]),
            label=csv_path.stem,
        )
    except ValueError as exc:
        raise ConfigError(f"{csv_path}: {exc}") from exc

"""
``adiageo metric``: sample the metric field of a model over a grid.

One CSV row per converged grid point, in grid order. Points where the gap
closes (or an analytic metric diverges) are journaled as failures and left
out of the table.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray

from ..artifacts import write_csv_atomic, write_json_atomic
from ..clock import Clock
from ..errors import ConfigError
from ..hamiltonian.spectral import diagonalize
from ..metric.tensor import MetricSample, brachistochrone_metric
from ..run_config import GridSpec, RunConfig
from .context import RunContext, RunReport
from .registry import BuiltModel

_LOGGER = logging.getLogger(__name__)

EXCLUDE_TOL = 1e-12

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class MetricRow:
    """Metric data for one grid point."""

    sample: MetricSample
    gap: float | None
    g_tilde: FloatArray | None


def grid_points(grid: GridSpec, built: BuiltModel) -> list[tuple[float, ...]]:
    """
    Expand a grid specification into control points.

    Missing bounds default to the componentwise min/max of the model's endpoints.
    """
    dim = built.param_dim
    lower = grid.lower if grid.lower is not None else tuple(np.minimum(built.start, built.end))
    upper = grid.upper if grid.upper is not None else tuple(np.maximum(built.start, built.end))
    if len(lower) != dim or len(upper) != dim:
        raise ConfigError(f"grid bounds need {dim} coordinates for {built.name}")
    axes = [
        [float(low)] if low == high else np.linspace(low, high, grid.points).tolist()
        for low, high in zip(lower, upper, strict=True)
    ]
    points = []
    for point in itertools.product(*axes):
        if any(abs(value - skip) <= EXCLUDE_TOL for value in point for skip in grid.exclude):
            continue
        points.append(tuple(float(value) for value in point))
    return points


def _columns(dim: int, with_tilde: bool) -> tuple[list[str], list[tuple[int, int]]]:
    pairs = [(i, j) for i in range(dim) for j in range(i, dim)]
    if dim == 1:
        coordinates = ["x"]
        metric = ["g"]
        traces = ["tr_dp2"]
        tilde = ["g_tilde"]
    else:
        coordinates = [f"x{i + 1}" for i in range(dim)]
        metric = [f"g{i + 1}{j + 1}" for i, j in pairs]
        traces = [f"tr_dp2_{i + 1}" for i in range(dim)]
        tilde = [f"g_tilde{i + 1}{j + 1}" for i, j in pairs]
    header = [*coordinates, *metric, *traces, "g0", "gap"]
    if with_tilde:
        header.extend(tilde)
    return header, pairs


def _evaluate(built: BuiltModel, point: tuple[float, ...], config: RunConfig) -> MetricRow:
    sample = built.field.sample(point)
    gap = sample.gap
    g_tilde = None
    if built.model is not None:
        spectral = diagonalize(built.model, point, tolerances=config.tolerances)
        gap = spectral.gap
        g_tilde = brachistochrone_metric(
            built.model, point, spectral=spectral, tolerances=config.tolerances
        )
    return MetricRow(sample=sample, gap=gap, g_tilde=g_tilde)


def cmd_metric(config: RunConfig, *, clock: Clock | None = None) -> RunReport:
    """
    Sample g (and g~ when a Hamiltonian exists) over ``config.grid``.

    Writes ``metric.csv`` (columns ``x..``, ``g..``, ``tr_dp2..`` = 2 g0 g_ii,
    ``g0``, ``gap`` and ``g_tilde..``) with a ``metric.json`` sidecar.
    """
    context = RunContext(config, clock=clock)
    built = context.build_model()
    points = grid_points(config.grid, built)
    outcomes = context.sweep(
        lambda point: _evaluate(built, point, config),
        points,
        label=lambda point: f"x={list(point)}",
    )

    with_tilde = built.model is not None
    header, pairs = _columns(built.param_dim, with_tilde)
    rows: list[list[Any]] = []
    for outcome in outcomes:
        if outcome.value is None:
            continue
        row = outcome.value
        metric = row.sample.g
        cells: list[Any] = [*outcome.item]
        cells.extend(float(metric[i, j]) for i, j in pairs)
        cells.extend(2.0 * row.sample.g0 * float(metric[i, i]) for i in range(built.param_dim))
        cells.extend([row.sample.g0, float("nan") if row.gap is None else float(row.gap)])
        if with_tilde and row.g_tilde is not None:
            cells.extend(float(row.g_tilde[i, j]) for i, j in pairs)
        rows.append(cells)

    csv_path = context.artifact("metric.csv")
    write_csv_atomic(csv_path, header, rows)
    write_json_atomic(
        context.artifact("metric.json"),
        {
            "model": built.to_dict(),
            "grid": config.grid.to_dict(),
            "points": len(points),
            "rows": len(rows),
        },
    )
    _LOGGER.info("metric: %d of %d grid points written to %s", len(rows), len(points), csv_path)
    return context.finish({"model": built.name, "points": len(points), "rows": len(rows)})

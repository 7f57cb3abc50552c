"""
``adiageo geodesic``: solve for an optimal schedule and write it as a path CSV.

With ``--sweep-m`` the Ising size is swept: one path per m plus the
closed-form thermodynamic-limit series, and the sup-distance of each finite-m
geodesic to that limit in the summary.
"""

from __future__ import annotations

import logging
from typing import Any

from ..clock import Clock
from ..errors import ConfigError
from ..run_config import RunConfig
from ..schedule import ControlPath
from .context import RunContext, RunReport
from .path_io import write_path
from .registry import BuiltModel, resolve_model
from .schedules import build_schedule, closed_form_distance

_LOGGER = logging.getLogger(__name__)


def _solve(context: RunContext, built: BuiltModel) -> tuple[BuiltModel, ControlPath]:
    path = build_schedule(built, context.config.path, tolerances=context.config.tolerances)
    return built, path


def _write(context: RunContext, name: str, built: BuiltModel, path: ControlPath) -> dict[str, Any]:
    distance = closed_form_distance(built, path)
    write_path(
        context.artifact(f"{name}.csv"),
        path,
        built.field,
        {"model": built.to_dict(), "path_spec": context.config.path.to_dict(), **distance},
        tolerances=context.config.tolerances,
    )
    context.artifact(f"{name}.json")
    return {"name": name, "model": built.name, "knots": path.knots, **distance}


def _write_limit(context: RunContext, built: BuiltModel) -> str | None:
    if built.closed_form is None:
        return None
    limit = ControlPath.from_function(
        built.closed_form, knots=context.config.path.knots, label="closed-form limit"
    )
    # speed and eps of the limit path are measured in the limit metric
    realization = context.build_model(m=built.parameters.get("m", 1), limit=True)
    write_path(
        context.artifact("limit.csv"),
        limit,
        realization.field,
        {"model": realization.to_dict(), "closed_form": True},
        tolerances=context.config.tolerances,
    )
    context.artifact("limit.json")
    return "limit"


def cmd_geodesic(config: RunConfig, *, clock: Clock | None = None) -> RunReport:
    """
    Solve the geodesic (or the requested schedule kind) and write path CSVs.

    Raises
    ------
    ConfigError
        If ``sweep_m`` is requested for a model without a size parameter.
    """
    context = RunContext(config, clock=clock)
    sweep = config.path.sweep_m
    if not sweep:
        built = context.build_model()
        outcomes = context.sweep(
            lambda item: _solve(context, built),
            [built.name],
            details=lambda result: dict(result[1].metadata),
        )
        records = [
            _write(context, "path", *outcome.value)
            for outcome in outcomes
            if outcome.value is not None
        ]
        return context.finish({"paths": records})

    if resolve_model(config.model.name).name != "ising":
        raise ConfigError("--sweep-m applies to the ising model only")
    sizes = sorted(set(sweep))
    models = [context.build_model(m=m) for m in sizes]
    outcomes = context.sweep(
        lambda built: _solve(context, built),
        models,
        label=lambda built: built.name,
        details=lambda result: closed_form_distance(*result),
    )
    records = []
    for m, outcome in zip(sizes, outcomes, strict=True):
        if outcome.value is not None:
            records.append({"m": m, **_write(context, f"path_m{m}", *outcome.value)})
    limit = _write_limit(context, models[0])
    distances = [record.get("sup_distance_closed_form") for record in records]
    monotone = None
    if len(records) == len(sizes) and all(value is not None for value in distances):
        monotone = all(later <= earlier for earlier, later in zip(distances, distances[1:]))
    _LOGGER.info("geodesic sweep over m=%s: sup distances %s", sizes, distances)
    return context.finish({"paths": records, "limit": limit, "monotone_in_m": monotone})

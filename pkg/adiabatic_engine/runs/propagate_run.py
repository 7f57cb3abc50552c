"""
``adiageo propagate``: run the actual and adiabatic propagators over a list of T.

Per T the service writes ``propagate_T<T>.csv`` (s, f(s), delta(s), eps(s),
eps~(s), intertwining residual and the fidelity-bound flag) and a
``run_T<T>.json`` record. The summary carries the log-log slope of delta
against T over the converged runs.
"""

from __future__ import annotations

import logging
from typing import Any

from ..artifacts import write_csv_atomic, write_json_atomic
from ..clock import Clock
from ..dynamics.analysis import PropagationResult, fidelity_bound_check, run_propagation
from ..dynamics.dyson import DysonLadder, dyson_ladder
from ..dynamics.propagator import PropagationOptions
from ..errors import InsufficientSamples, NonPositiveData
from ..run_config import RunConfig
from ..scaling import fit_power_law
from ..schedule import ControlPath
from .context import RunContext, RunReport
from .path_io import write_path
from .registry import BuiltModel
from .schedules import build_schedule

_LOGGER = logging.getLogger(__name__)

DELTA_FLOOR = 1e-12

SERIES_COLUMNS = ("s", "fidelity", "delta", "epsilon", "epsilon_tilde", "intertwining")


def _run_one(
    built: BuiltModel, path: ControlPath, T: float, config: RunConfig
) -> tuple[PropagationResult, DysonLadder | None]:
    spec = config.propagation
    model = built.require_model()
    options = PropagationOptions(record_knots=spec.record_knots, steps=spec.steps)
    result = run_propagation(
        model,
        path,
        T,
        options=options,
        holonomy=spec.holonomy,
        holonomy_mesh=spec.holonomy_mesh,
        tolerances=config.tolerances,
    )
    ladder = None
    if spec.dyson_depth > 0:
        ladder = dyson_ladder(
            model,
            path,
            T,
            spec.dyson_depth,
            knots=spec.dyson_knots,
            tolerances=config.tolerances,
        )
    return result, ladder


def _write_run(
    context: RunContext, result: PropagationResult, ladder: DysonLadder | None
) -> dict[str, Any]:
    stem = f"T{result.T:g}"
    bound = fidelity_bound_check(result)
    rows = [
        [*(row[name] for name in SERIES_COLUMNS), bool(flag)]
        for row, flag in zip(result.rows(), bound, strict=True)
    ]
    write_csv_atomic(context.artifact(f"propagate_{stem}.csv"), [*SERIES_COLUMNS, "fidelity_bound"], rows)
    record = result.summary()
    if ladder is not None:
        record["dyson"] = ladder.summary()
    write_json_atomic(context.artifact(f"run_{stem}.json"), record)
    return {
        "T": result.T,
        "delta": result.delta,
        "fidelity_final": float(result.fidelity[-1]),
        "epsilon": result.epsilon_total,
        "epsilon_tilde": result.epsilon_tilde_total,
        "fidelity_bound_holds": bool(bound.all()),
        "holonomy": record["holonomy"],
        "holonomy_deviation_actual": result.holonomy_deviation_actual,
    }


def delta_slope(records: list[dict[str, Any]]) -> dict[str, Any] | None:
    """
    Log-log fit of delta against T, or ``None`` when it is undefined.

    A vanishing delta (a constant Hamiltonian, delta below ``DELTA_FLOOR`` on
    every run) or fewer than two converged runs leave the slope undefined.
    """
    if records and max(record["delta"] for record in records) <= DELTA_FLOOR:
        _LOGGER.info("delta(T) slope undefined: delta vanishes on every run")
        return None
    try:
        fit = fit_power_law(
            [record["T"] for record in records],
            [record["delta"] for record in records],
            window=None,
            min_samples=2,
        )
    except (InsufficientSamples, NonPositiveData) as exc:
        _LOGGER.info("delta(T) slope undefined: %s", exc)
        return None
    return fit.report()


def cmd_propagate(config: RunConfig, *, clock: Clock | None = None) -> RunReport:
    """
    Propagate the configured schedule at every T in ``config.propagation.T``.

    A failed T is journaled and skipped; the remaining runs are still written.
    """
    context = RunContext(config, clock=clock)
    built = context.build_model()
    built.require_model()
    path = build_schedule(built, config.path, tolerances=config.tolerances)
    write_path(
        context.artifact("path.csv"),
        path,
        built.field,
        {"model": built.to_dict()},
        tolerances=config.tolerances,
    )
    context.artifact("path.json")

    outcomes = context.sweep(
        lambda T: _run_one(built, path, T, config),
        list(config.propagation.T),
        label=lambda T: f"T={T:g}",
        details=lambda value: {"delta": value[0].delta, "fidelity_final": float(value[0].fidelity[-1])},
    )
    records = [_write_run(context, *outcome.value) for outcome in outcomes if outcome.value is not None]
    slope = delta_slope(records)
    _LOGGER.info(
        "propagate: %d of %d runs, delta(T) exponent %s",
        len(records),
        len(outcomes),
        None if slope is None else f"{slope['exponent']:.4f}",
    )
    return context.finish({"model": built.name, "runs": records, "delta_slope": slope})

"""Turn a :class:`PathSpec` into a concrete schedule for a built model."""

from __future__ import annotations

from pathlib import Path
from typing import Any

from ..errors import ConfigError
from ..geodesic.quadrature import quadrature_geodesic_1d, solve_geodesic_through_critical
from ..geodesic.solver import GeodesicOptions, solve_geodesic
from ..run_config import PathKind, PathSpec
from ..schedule import ControlPath
from ..tolerances import Tolerances
from .path_io import read_path
from .registry import BuiltModel


def endpoints(built: BuiltModel, spec: PathSpec) -> tuple[tuple[float, ...], tuple[float, ...]]:
    """Endpoint overrides from ``spec``, the model defaults otherwise."""
    start = spec.start if spec.start is not None else built.start
    end = spec.end if spec.end is not None else built.end
    if len(start) != built.param_dim or len(end) != built.param_dim:
        raise ConfigError(f"{built.name} needs {built.param_dim}-dimensional endpoints")
    return start, end


def _require_1d(built: BuiltModel, kind: PathKind) -> None:
    if built.param_dim != 1:
        raise ConfigError(
            f"path kind {kind.value} needs a one-parameter model, {built.name} has {built.param_dim}"
        )


def _critical_inside(built: BuiltModel, start: float, end: float) -> float | None:
    value = built.critical_point
    if value is not None and min(start, end) < value < max(start, end):
        return value
    return None


def build_schedule(built: BuiltModel, spec: PathSpec, *, tolerances: Tolerances) -> ControlPath:
    """
    Produce the schedule requested by ``spec``.

    Raises
    ------
    ConfigError
        If the kind does not apply to the model (e.g. splice without a critical point).
    GeodesicError, QuadratureError
        From the solvers.
    """
    start, end = endpoints(built, spec)
    kind = spec.kind
    if kind is PathKind.GEODESIC:
        options = GeodesicOptions(mesh=spec.mesh, method=spec.method)
        return solve_geodesic(built.field, start, end, options, tolerances=tolerances)
    if kind is PathKind.QUADRATURE:
        _require_1d(built, kind)
        critical = _critical_inside(built, start[0], end[0])
        return quadrature_geodesic_1d(
            built.field,
            start[0],
            end[0],
            knots=spec.knots,
            singular_points=() if critical is None else (critical,),
            tolerances=tolerances,
        )
    if kind is PathKind.SPLICE:
        _require_1d(built, kind)
        critical = _critical_inside(built, start[0], end[0])
        if critical is None:
            raise ConfigError(f"{built.name} has no critical point between the endpoints")
        splice = solve_geodesic_through_critical(
            built.field,
            start[0],
            end[0],
            critical,
            eta=spec.eta,
            knots=spec.knots,
            options=GeodesicOptions(mesh=spec.mesh, method=spec.method),
            tolerances=tolerances,
        )
        return splice.path
    if kind is PathKind.LINEAR:
        return ControlPath.linear(start, end, knots=spec.knots)
    if kind is PathKind.CLOSED_FORM:
        if built.closed_form is None:
            raise ConfigError(f"{built.name} has no closed-form geodesic")
        return ControlPath.from_function(built.closed_form, knots=spec.knots, label="closed-form")
    if kind is PathKind.CONSTANT:
        return ControlPath.constant(start, knots=spec.knots)
    if kind is PathKind.FILE:
        path = read_path(Path(str(spec.file)))
        if path.param_dim != built.param_dim:
            raise ConfigError(
                f"{spec.file} has {path.param_dim} coordinates, {built.name} needs {built.param_dim}"
            )
        return path
    raise AssertionError(f"Unhandled path kind: {kind!r}")


def closed_form_distance(built: BuiltModel, path: ControlPath) -> dict[str, Any]:
    """sup_s |x(s) - x_closed(s)| on the path knots, when a closed form exists."""
    if built.closed_form is None or path.param_dim != 1:
        return {}
    return {"sup_distance_closed_form": path.sup_distance(built.closed_form)}

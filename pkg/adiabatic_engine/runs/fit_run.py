"""
``adiageo fit``: power-law fits of critical and finite-size series.

Every kind writes the fitted series to ``fit_series.csv`` (columns ``t, y``)
and the report to ``fit.json``. Ising selections without a case restriction
default to case (i); the metric-divergence fit reads the thermodynamic-limit
shape, since the finite-m metric stays bounded at the critical point.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Callable

import numpy as np
from numpy.typing import NDArray
from scipy.optimize import brentq

from ..artifacts import read_csv_columns, write_csv_atomic, write_json_atomic
from ..clock import Clock
from ..errors import AdiabaticEngineError, ConfigError
from ..models.ising import IsingSpec, ising_p
from ..run_config import FitKind, FitSpec, RunConfig
from ..scaling import (
    DEFAULT_WINDOW,
    ISING_EXPONENTS,
    PowerLawFit,
    chi,
    fit_finite_size,
    fit_power_law,
    kappa,
)
from .context import RunContext, RunReport
from .path_io import read_path
from .registry import BuiltModel, resolve_model
from .schedules import build_schedule

_LOGGER = logging.getLogger(__name__)

METRIC_DIVERGENCE_WINDOW = (1e-5, 1e-2)

FloatArray = NDArray[np.float64]


def _is_ising(config: RunConfig) -> bool:
    return resolve_model(config.model.name).name == "ising"


def _critical_model(context: RunContext, *, limit: bool) -> BuiltModel:
    overrides: dict[str, Any] = {}
    if _is_ising(context.config):
        params = context.config.model.params
        if params.get("case") is None:
            overrides["case"] = "i"
        if limit and "limit" not in params:
            overrides["limit"] = True
    built = context.build_model(**overrides)
    if built.param_dim != 1 or built.critical_point is None:
        raise ConfigError(f"{built.name} has no critical point on a one-parameter line")
    return built


def _offsets(spec: FitSpec, default: tuple[float, float]) -> FloatArray:
    lower, upper = spec.window or default
    return np.geomspace(lower, upper, spec.samples)


def _geodesic_curve(context: RunContext, built: BuiltModel) -> Callable[[float], float]:
    spec = context.config.fit
    if spec.input:
        path = read_path(Path(spec.input))
        return lambda s: float(path.position(s)[0])
    closed_form = built.closed_form
    if closed_form is not None:
        return lambda s: float(np.asarray(closed_form(s)).ravel()[0])
    path = build_schedule(built, context.config.path, tolerances=context.config.tolerances)
    return lambda s: float(path.position(s)[0])


def crossing_time(curve: Callable[[float], float], x_c: float) -> float:
    """
    The schedule time s_c with x(s_c) = x_c.

    Raises
    ------
    ConfigError
        If the schedule never reaches ``x_c``.
    """
    start, end = curve(0.0) - x_c, curve(1.0) - x_c
    if start * end > 0.0:
        raise ConfigError(f"the schedule does not cross the critical point x_c={x_c}")
    return float(brentq(lambda s: curve(s) - x_c, 0.0, 1.0, xtol=1e-14))


def geodesic_exponent_series(context: RunContext) -> tuple[FloatArray, FloatArray, float | None]:
    """|x(s) - x_c| against |s - s_c| on the configured side of the passage."""
    spec = context.config.fit
    built = _critical_model(context, limit=False)
    x_c = float(built.critical_point or 0.0)
    curve = _geodesic_curve(context, built)
    s_c = crossing_time(curve, x_c)
    direction = -1.0 if spec.side == "below" else 1.0
    offsets = _offsets(spec, DEFAULT_WINDOW)
    times = s_c + direction * offsets
    inside = (times >= 0.0) & (times <= 1.0)
    t = offsets[inside]
    y = np.array([abs(curve(float(s)) - x_c) for s in times[inside]])
    theoretical = spec.theoretical
    if theoretical is None and _is_ising(context.config):
        theoretical = chi(ISING_EXPONENTS.nu, kappa(ISING_EXPONENTS))
    _LOGGER.info("geodesic passage of %s at s_c=%.12g", built.name, s_c)
    return t, y, theoretical


def metric_divergence_series(context: RunContext) -> tuple[FloatArray, FloatArray, float | None]:
    """g(x_c -/+ t) against t = |x - x_c|."""
    spec = context.config.fit
    built = _critical_model(context, limit=True)
    x_c = float(built.critical_point or 0.0)
    direction = -1.0 if spec.side == "below" else 1.0
    t = _offsets(spec, METRIC_DIVERGENCE_WINDOW)
    y = np.array([float(built.field.sample((x_c + direction * value,)).g[0, 0]) for value in t])
    theoretical = spec.theoretical
    if theoretical is None and _is_ising(context.config):
        theoretical = ISING_EXPONENTS.nu * kappa(ISING_EXPONENTS)
    return t, y, theoretical


def finite_size_series(sizes: tuple[int, ...]) -> tuple[FloatArray, FloatArray]:
    """p_m(1/2) / L against the ring length L = 2m + 1."""
    specs = [IsingSpec(m=m) for m in sorted(set(sizes))]
    lengths = np.array([float(spec.sites) for spec in specs])
    values = np.array([ising_p(spec, 0.5) / spec.sites for spec in specs])
    return lengths, values


def series_from_csv(spec: FitSpec) -> tuple[FloatArray, FloatArray]:
    """
    Read the ``t`` and ``y`` columns of ``spec.input``.

    Raises
    ------
    ConfigError
        If a column is missing.
    """
    columns = read_csv_columns(Path(str(spec.input)))
    missing = [name for name in (spec.t_column, spec.y_column) if name not in columns]
    if missing:
        raise ConfigError(f"{spec.input} is missing columns: {', '.join(missing)}")
    return np.asarray(columns[spec.t_column]), np.asarray(columns[spec.y_column])


def synthetic_series(spec: FitSpec, seed: int) -> tuple[FloatArray, FloatArray]:
    """y = prefactor t^exponent (1 + noise N(0, 1)) on log-spaced t."""
    rng = np.random.default_rng(seed)
    t = _offsets(spec, DEFAULT_WINDOW)
    clean = spec.planted_prefactor * t**spec.planted_exponent
    return t, clean * (1.0 + spec.noise * rng.standard_normal(t.size))


def _fit(context: RunContext) -> tuple[FloatArray, FloatArray, dict[str, Any]]:
    spec = context.config.fit
    kind = spec.kind
    if kind is FitKind.FINITE_SIZE:
        if not _is_ising(context.config):
            raise ConfigError("finite-size fits apply to the ising model only")
        t, y = finite_size_series(spec.sizes)
        fits = fit_finite_size(t, y)
        expected = spec.theoretical
        if expected is None:
            expected = 2.0 / ISING_EXPONENTS.nu - ISING_EXPONENTS.d
        return t, y, {**fits.report(), "theoretical_large_sizes": expected}

    fit: PowerLawFit
    theoretical: float | None
    if kind is FitKind.GEODESIC_EXPONENT:
        t, y, theoretical = geodesic_exponent_series(context)
        fit = fit_power_law(t, y, window=None)
    elif kind is FitKind.METRIC_DIVERGENCE:
        t, y, theoretical = metric_divergence_series(context)
        fit = fit_power_law(t, y, window=None)
    elif kind is FitKind.SERIES:
        t, y = series_from_csv(spec)
        theoretical = spec.theoretical
        fit = fit_power_law(t, y, window=spec.window)
    elif kind is FitKind.SYNTHETIC:
        t, y = synthetic_series(spec, context.config.seed)
        theoretical = spec.theoretical if spec.theoretical is not None else spec.planted_exponent
        fit = fit_power_law(t, y, window=None)
    else:
        raise AssertionError(f"Unhandled fit kind: {kind!r}")
    return t, y, fit.report(theoretical)


def cmd_fit(config: RunConfig, *, clock: Clock | None = None) -> RunReport:
    """
    Build the configured series and fit its power law.

    Raises
    ------
    InsufficientSamples, NonPositiveData
        If the series cannot be fitted; the failure is journaled first.
    """
    context = RunContext(config, clock=clock)
    kind = config.fit.kind.value
    try:
        t, y, report = _fit(context)
    except AdiabaticEngineError as exc:
        context.record_failure(kind, exc)
        raise
    write_csv_atomic(context.artifact("fit_series.csv"), ["t", "y"], zip(t.tolist(), y.tolist()))
    document = {"kind": kind, "fit": config.fit.to_dict(), "report": report}
    write_json_atomic(context.artifact("fit.json"), document)
    context.record_success(kind, report)
    _LOGGER.info("fit %s: %s", kind, report.get("exponent", report.get("overall")))
    return context.finish({"kind": kind, "report": report})

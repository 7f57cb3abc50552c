"""
Registry of built-in model families for the command-line services.

Each entry turns a flat parameter mapping (from ``--param key=value`` flags or
the ``model.params`` block of a run config) into a :class:`BuiltModel`: the
Hamiltonian (when one exists), the metric field used by geodesic and metric
commands, default endpoints and the closed-form geodesic used as reference.

Design constraints
------------------
- Parameter parsing is strict: unknown keys raise ``ConfigError``.
- A built model never holds mutable state, so sweep workers can share it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping

import numpy as np
from numpy.typing import NDArray

from ..errors import ConfigError
from ..hamiltonian.custom import load_custom_model
from ..hamiltonian.model import HamiltonianModel, restrict_line
from ..metric.field import IsingAnalyticField, MetricField, ModelMetricField, ScalarMetricField
from ..models.deutsch_jozsa import DeutschJozsaModel, DeutschJozsaSpec, dj_geodesic, oracle_from_selector
from ..models.ising import (
    IsingCase,
    IsingChainModel,
    IsingMode,
    IsingSpec,
    ising_case_metric,
    ising_critical_point,
    ising_geodesic_closed_form,
    ising_p_limit,
    ising_q_limit,
)
from ..models.projective import (
    ProjectiveModel,
    ProjectiveSpec,
    projective_geodesic,
    projective_metric_1d,
)
from ..tolerances import DEFAULT_TOLERANCES, Tolerances

FloatArray = NDArray[np.float64]
ClosedForm = Callable[[FloatArray], FloatArray]


@dataclass(frozen=True, slots=True)
class BuiltModel:
    """
    A model family instantiated for one run.

    Attributes
    ----------
    name:
        Registry name plus structural parameters, e.g. ``ising[m=30,case=i]``.
    model:
        Hamiltonian, or ``None`` for metric-only realizations (analytic Ising,
        thermodynamic limits).
    field:
        Metric field used by metric and geodesic commands.
    start, end:
        Default endpoints.
    closed_form:
        Reference geodesic s -> x(s) for one-parameter families, if known.
    critical_point:
        Coordinate where the gap closes on the default segment, if any.
    parameters:
        Resolved parameters (JSON-serializable).
    """

    name: str
    model: HamiltonianModel | None
    field: MetricField
    start: tuple[float, ...]
    end: tuple[float, ...]
    closed_form: ClosedForm | None = None
    critical_point: float | None = None
    parameters: Mapping[str, Any] = field(default_factory=dict)

    @property
    def param_dim(self) -> int:
        return self.field.param_dim

    def require_model(self) -> HamiltonianModel:
        """Return the Hamiltonian or raise ``ConfigError`` for metric-only models."""
        if self.model is None:
            raise ConfigError(f"{self.name} has no Hamiltonian realization; choose a full-matrix mode")
        return self.model

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "param_dim": self.param_dim,
            "start": list(self.start),
            "end": list(self.end),
            "has_hamiltonian": self.model is not None,
            "has_closed_form": self.closed_form is not None,
            "critical_point": self.critical_point,
            "parameters": dict(self.parameters),
        }


Builder = Callable[[Mapping[str, Any], Tolerances], BuiltModel]


@dataclass(frozen=True, slots=True)
class ModelEntry:
    """Registry entry: builder plus documented parameters and defaults."""

    name: str
    description: str
    parameters: Mapping[str, str]
    builder: Builder
    aliases: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "aliases": list(self.aliases),
            "description": self.description,
            "parameters": dict(self.parameters),
        }


def _check_keys(params: Mapping[str, Any], allowed: Mapping[str, str], *, model: str) -> None:
    unknown = sorted(set(params).difference(allowed))
    if unknown:
        raise ConfigError(f"Unknown parameters for model {model}: {', '.join(unknown)}")


def _int_param(params: Mapping[str, Any], key: str, default: int) -> int:
    raw = params.get(key, default)
    try:
        return int(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"parameter {key} must be an integer, got {raw!r}") from exc


def _float_param(params: Mapping[str, Any], key: str, default: float | None) -> float | None:
    raw = params.get(key, default)
    if raw is None:
        return None
    try:
        return float(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"parameter {key} must be a number, got {raw!r}") from exc


def _bool_param(params: Mapping[str, Any], key: str, default: bool) -> bool:
    raw = params.get(key, default)
    if isinstance(raw, bool):
        return raw
    text = str(raw).strip().lower()
    if text in ("1", "true", "yes", "on"):
        return True
    if text in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"parameter {key} must be a boolean, got {raw!r}")


def _build_spec(factory: Callable[[], Any]) -> Any:
    try:
        return factory()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


_DJ_PARAMETERS = {
    "n": "number of qubits (default 2)",
    "oracle": "constant:0 | constant:1 | balanced | balanced:<seed> (default balanced)",
    "h0": "energy scale of H0 (default 1.0)",
}


def _build_deutsch_jozsa(params: Mapping[str, Any], tolerances: Tolerances) -> BuiltModel:
    _check_keys(params, _DJ_PARAMETERS, model="deutsch_jozsa")
    n = _int_param(params, "n", 2)
    selector = str(params.get("oracle", "balanced"))
    h0 = _float_param(params, "h0", 1.0)
    spec = _build_spec(lambda: DeutschJozsaSpec(n=n, oracle=oracle_from_selector(n, selector), h0=h0))
    model = DeutschJozsaModel(spec)
    return BuiltModel(
        name=f"deutsch_jozsa[n={n},{spec.kind}]",
        model=model,
        field=ModelMetricField(model=model, tolerances=tolerances),
        start=(0.0,),
        end=(1.0,),
        closed_form=dj_geodesic,
        parameters={**spec.to_dict(), "oracle_selector": selector},
    )


_PROJECTIVE_PARAMETERS = {
    "dim": "Hilbert-space dimension N (default 4)",
    "overlap": "|<a|b>| in (0, 1) (default 1/sqrt(N))",
    "phase": "phase of the second amplitude of |b> (default 0)",
    "line": "restrict to the line (1 - x, x) (default true)",
    "analytic": "use the closed-form 1-D metric instead of diagonalization (default false)",
}


def _build_projective(params: Mapping[str, Any], tolerances: Tolerances) -> BuiltModel:
    _check_keys(params, _PROJECTIVE_PARAMETERS, model="projective")
    dim = _int_param(params, "dim", 4)
    overlap = _float_param(params, "overlap", None)
    if overlap is None:
        overlap = 1.0 / math.sqrt(dim) if dim >= 2 else 0.5
    phase = _float_param(params, "phase", 0.0) or 0.0
    spec = _build_spec(lambda: ProjectiveSpec(dim=dim, overlap=overlap, phase=phase))
    base = ProjectiveModel(spec)
    parameters = {**spec.to_dict()}
    if not _bool_param(params, "line", True):
        return BuiltModel(
            name=f"projective[N={dim},overlap={overlap:.6g}]",
            model=base,
            field=ModelMetricField(model=base, tolerances=tolerances),
            start=(1.0, 0.0),
            end=(0.0, 1.0),
            parameters={**parameters, "line": False},
        )
    line = restrict_line(base, (1.0, 0.0), (0.0, 1.0), label="1-x,x")
    metric_field: MetricField
    if _bool_param(params, "analytic", False):
        metric_field = ScalarMetricField(
            label=line.name,
            metric=lambda x: projective_metric_1d(spec, x),
            metadata=parameters,
        )
    else:
        metric_field = ModelMetricField(model=line, tolerances=tolerances)
    return BuiltModel(
        name=f"projective[N={dim},overlap={overlap:.6g}]",
        model=line,
        field=metric_field,
        start=(0.0,),
        end=(1.0,),
        closed_form=lambda s: projective_geodesic(spec, s),
        parameters={**parameters, "line": True},
    )


_ISING_PARAMETERS = {
    "m": "ring of 2m + 1 sites (default 1)",
    "mode": "analytic | full (default analytic; full needs m <= 5)",
    "case": "i | ii | iii for a one-parameter restriction (default: two-parameter)",
    "limit": "use the thermodynamic-limit metric shape of the case (default false)",
}


def _parse_case(raw: Any) -> IsingCase | None:
    if raw is None or str(raw).lower() in ("", "none"):
        return None
    try:
        return IsingCase(str(raw).lower())
    except ValueError as exc:
        raise ConfigError(f"Ising case must be i, ii or iii, got {raw!r}") from exc


def _build_ising(params: Mapping[str, Any], tolerances: Tolerances) -> BuiltModel:
    _check_keys(params, _ISING_PARAMETERS, model="ising")
    m = _int_param(params, "m", 1)
    case = _parse_case(params.get("case"))
    try:
        mode = IsingMode(str(params.get("mode", IsingMode.ANALYTIC.value)).lower())
    except ValueError as exc:
        raise ConfigError(f"Ising mode must be analytic or full, got {params.get('mode')!r}") from exc
    spec = _build_spec(lambda: IsingSpec(m=m, mode=mode, case=case))
    limit = _bool_param(params, "limit", False)

    if case is None:
        if limit:
            raise ConfigError("the thermodynamic limit is only available for a case restriction")
        chain = IsingChainModel(spec) if mode is IsingMode.FULL else None
        metric_field: MetricField = (
            ModelMetricField(model=chain, tolerances=tolerances)
            if chain is not None
            else IsingAnalyticField(spec)
        )
        return BuiltModel(
            name=f"ising[m={m}]",
            model=chain,
            field=metric_field,
            start=(1.0, 0.0),
            end=(1.0, 0.5),
            parameters=spec.to_dict(),
        )

    critical = ising_critical_point(case)
    reference: ClosedForm = lambda s: ising_geodesic_closed_form(case, s)  # noqa: E731
    if limit:
        shape = ising_p_limit if case is IsingCase.I else ising_q_limit
        return BuiltModel(
            name=f"ising[limit,case={case.value}]",
            model=None,
            field=ScalarMetricField(
                label=f"ising-limit-{case.value}",
                metric=shape,
                singular_points=(critical,),
                metadata={"case": case.value},
            ),
            start=(0.0,),
            end=(1.0,),
            closed_form=reference,
            critical_point=critical,
            parameters={"case": case.value, "limit": True},
        )

    origin, direction = case.origin_and_direction()
    target = tuple(o + d for o, d in zip(origin, direction, strict=True))
    restricted = (
        restrict_line(IsingChainModel(spec), origin, target, label=f"case-{case.value}")
        if mode is IsingMode.FULL
        else None
    )
    metric_field = (
        ModelMetricField(model=restricted, tolerances=tolerances)
        if restricted is not None
        else ScalarMetricField(
            label=f"ising-m{m}-{case.value}",
            metric=lambda x: ising_case_metric(spec, case, x),
            metadata=spec.to_dict(),
        )
    )
    return BuiltModel(
        name=f"ising[m={m},case={case.value}]",
        model=restricted,
        field=metric_field,
        start=(0.0,),
        end=(1.0,),
        closed_form=reference,
        critical_point=critical,
        parameters={**spec.to_dict(), "limit": False},
    )


_CUSTOM_PARAMETERS = {
    "path": "JSON model document (dim, params, terms)",
    "start": "comma-separated default start point (default all zeros)",
    "end": "comma-separated default end point (default all ones)",
}


def _point_param(params: Mapping[str, Any], key: str, size: int, default: float) -> tuple[float, ...]:
    raw = params.get(key)
    if raw is None:
        return (default,) * size
    values = raw if isinstance(raw, (list, tuple)) else str(raw).split(",")
    try:
        point = tuple(float(value) for value in values)
    except ValueError as exc:
        raise ConfigError(f"parameter {key} must be a list of numbers, got {raw!r}") from exc
    if len(point) != size:
        raise ConfigError(f"parameter {key} needs {size} coordinates, got {len(point)}")
    return point


def _build_custom(params: Mapping[str, Any], tolerances: Tolerances) -> BuiltModel:
    _check_keys(params, _CUSTOM_PARAMETERS, model="custom")
    if "path" not in params:
        raise ConfigError("custom model needs path=<model.json>")
    model = load_custom_model(Path(str(params["path"])))
    return BuiltModel(
        name=model.name,
        model=model,
        field=ModelMetricField(model=model, tolerances=tolerances),
        start=_point_param(params, "start", model.param_dim, 0.0),
        end=_point_param(params, "end", model.param_dim, 1.0),
        parameters={"path": str(params["path"]), **dict(model.metadata)},
    )


MODEL_REGISTRY: Mapping[str, ModelEntry] = {
    entry.name: entry
    for entry in (
        ModelEntry(
            name="deutsch_jozsa",
            description="unitary interpolation for the Deutsch-Jozsa oracle (flat metric)",
            parameters=_DJ_PARAMETERS,
            builder=_build_deutsch_jozsa,
            aliases=("dj",),
        ),
        ModelEntry(
            name="projective",
            description="two-projector Grover-type Hamiltonian x1 (I - |a><a|) + x2 (I - |b><b|)",
            parameters=_PROJECTIVE_PARAMETERS,
            builder=_build_projective,
            aliases=("grover",),
        ),
        ModelEntry(
            name="ising",
            description="transverse-field Ising ring of 2m + 1 sites",
            parameters=_ISING_PARAMETERS,
            builder=_build_ising,
        ),
        ModelEntry(
            name="custom",
            description="affine Hamiltonian sum_k c_k(x) H_k loaded from JSON",
            parameters=_CUSTOM_PARAMETERS,
            builder=_build_custom,
        ),
    )
}


def resolve_model(name: str) -> ModelEntry:
    """Look up a registry entry by name or alias."""
    key = name.strip().lower()
    if key in MODEL_REGISTRY:
        return MODEL_REGISTRY[key]
    for entry in MODEL_REGISTRY.values():
        if key in entry.aliases:
            return entry
    known = ", ".join(sorted(MODEL_REGISTRY))
    raise ConfigError(f"Unknown model {name!r}; known models: {known}")


def build_model(
    name: str, params: Mapping[str, Any] | None = None, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> BuiltModel:
    """Instantiate a registered model family."""
    return resolve_model(name).builder(dict(params or {}), tolerances)


def list_models() -> list[dict[str, Any]]:
    """Registry contents for ``adiageo models``, sorted by name."""
    return [MODEL_REGISTRY[name].to_dict() for name in sorted(MODEL_REGISTRY)]

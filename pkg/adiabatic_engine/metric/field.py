"""
Metric fields: anything that yields a metric sample at a control point.

Geodesic solvers and path functionals work against :class:`MetricField`, so
they run unchanged on a Hamiltonian model (generic diagonalization pipeline),
on the analytic Ising angles (any chain length) or on a closed-form 1-D metric.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Protocol, Sequence

import numpy as np
from numpy.typing import ArrayLike

from ..errors import DegenerateMode, GapCollapse
from ..hamiltonian.model import HamiltonianModel, control_point
from ..models.ising import IsingSpec, ising_metric
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .tensor import MetricSample, metric_sample


class MetricField(Protocol):
    """Source of metric samples on an M-dimensional control manifold."""

    @property
    def name(self) -> str: ...

    @property
    def param_dim(self) -> int: ...

    @property
    def singular_points(self) -> Sequence[float]:
        """1-D coordinates where the metric may diverge (integrable)."""
        ...

    def sample(self, x: ArrayLike) -> MetricSample: ...


@dataclass(frozen=True, slots=True)
class ModelMetricField:
    """Metric of a Hamiltonian model via exact diagonalization."""

    model: HamiltonianModel
    tolerances: Tolerances = DEFAULT_TOLERANCES
    singular_points: Sequence[float] = ()

    @property
    def name(self) -> str:
        return self.model.name

    @property
    def param_dim(self) -> int:
        return self.model.param_dim

    def sample(self, x: ArrayLike) -> MetricSample:
        return metric_sample(self.model, x, tolerances=self.tolerances)


@dataclass(frozen=True, slots=True)
class IsingAnalyticField:
    """Two-parameter Ising metric from the Bogoliubov angles."""

    spec: IsingSpec
    singular_points: Sequence[float] = ()

    @property
    def name(self) -> str:
        return f"ising[m={self.spec.m}]"

    @property
    def param_dim(self) -> int:
        return 2

    def sample(self, x: ArrayLike) -> MetricSample:
        point = control_point(x, 2)
        try:
            metric = ising_metric(self.spec, point)
        except DegenerateMode as exc:
            raise GapCollapse(str(exc)) from exc
        return MetricSample(x=point, g=metric, g0=1)


@dataclass(frozen=True, slots=True)
class ScalarMetricField:
    """
    One-parameter metric given by a function g(x).

    Attributes
    ----------
    label:
        Display name.
    metric:
        ``x -> g(x)``; may return ``inf`` at singular points.
    singular_points:
        Coordinates where ``metric`` diverges.
    metadata:
        Provenance for artifacts.
    """

    label: str
    metric: Callable[[float], float]
    singular_points: Sequence[float] = ()
    metadata: Mapping[str, Any] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.label

    @property
    def param_dim(self) -> int:
        return 1

    def sample(self, x: ArrayLike) -> MetricSample:
        point = control_point(x, 1)
        try:
            value = float(self.metric(float(point[0])))
        except DegenerateMode as exc:
            raise GapCollapse(str(exc)) from exc
        if not np.isfinite(value):
            raise GapCollapse(f"{self.label}: metric diverges at x={float(point[0])}")
        return MetricSample(x=point, g=np.array([[value]]), g0=1)

    def density(self, x: float) -> float:
        """sqrt(g(x)); ``inf`` where the metric diverges."""
        value = float(self.metric(x))
        return float(np.sqrt(value)) if value >= 0.0 else float("nan")


def as_metric_field(
    source: HamiltonianModel | MetricField, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> MetricField:
    """Wrap a Hamiltonian model; pass metric fields through unchanged."""
    if hasattr(source, "sample"):
        return source  # type: ignore[return-value]
    return ModelMetricField(model=source, tolerances=tolerances)  # type: ignore[arg-type]


def field_model(field_or_model: HamiltonianModel | MetricField) -> HamiltonianModel | None:
    """Return the Hamiltonian behind a field, if there is one."""
    if isinstance(field_or_model, ModelMetricField):
        return field_or_model.model
    if hasattr(field_or_model, "evaluate"):
        return field_or_model  # type: ignore[return-value]
    return None

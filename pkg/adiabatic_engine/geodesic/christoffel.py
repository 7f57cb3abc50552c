"""
Levi-Civita connection of a metric field.

Gamma^i_jk = 1/2 g^il (d_k g_lj + d_j g_lk - d_l g_jk), with metric derivatives
by central differences of the field.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import SingularMetric
from ..hamiltonian.model import HamiltonianModel, RealVector, control_point
from ..metric.field import MetricField, as_metric_field
from ..tolerances import DEFAULT_TOLERANCES, Tolerances


@dataclass(frozen=True, slots=True)
class ChristoffelField:
    """
    Connection coefficients at one point.

    Attributes
    ----------
    x:
        Control point.
    gamma:
        Array of shape (M, M, M) with gamma[i, j, k] = Gamma^i_jk.
    metric:
        g at ``x``.
    """

    x: RealVector
    gamma: NDArray[np.float64]
    metric: NDArray[np.float64]

    def acceleration(self, velocity: ArrayLike) -> NDArray[np.float64]:
        """-Gamma^i_jk v^j v^k, the geodesic acceleration for velocity v."""
        v = np.atleast_1d(np.asarray(velocity, dtype=np.float64))
        return -np.einsum("ijk,j,k->i", self.gamma, v, v)

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.gamma - np.swapaxes(self.gamma, 1, 2))))


def check_condition(metric: NDArray[np.float64], *, tolerances: Tolerances, where: ArrayLike) -> None:
    """
    Raise ``SingularMetric`` when g cannot be inverted reliably.

    Notes
    -----
    A trace direction in the parametrization makes g exactly singular; such
    models need a reduced parametrization before geodesic solves.
    """
    condition = float(np.linalg.cond(metric)) if metric.size else np.inf
    if not np.isfinite(condition) or condition > tolerances.singular_condition:
        raise SingularMetric(
            f"metric condition number {condition:.3e} exceeds "
            f"{tolerances.singular_condition:.1e} at x={np.asarray(where).tolist()}"
        )


def christoffel(
    source: HamiltonianModel | MetricField,
    x: ArrayLike,
    fd_step: float | None = None,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ChristoffelField:
    """
    Compute the Christoffel symbols of the metric at ``x``.

    Parameters
    ----------
    source:
        Hamiltonian model or metric field.
    x:
        Control point.
    fd_step:
        Absolute central-difference step. Defaults to
        ``tolerances.fd_step(x_k)`` per coordinate.
    tolerances:
        Numerical tolerances.

    Raises
    ------
    SingularMetric
        If the condition number of g exceeds ``tolerances.singular_condition``.
    GapCollapse
        If the metric cannot be evaluated at or next to ``x``.
    """
    field = as_metric_field(source, tolerances=tolerances)
    point = control_point(x, field.param_dim)
    metric = field.sample(point).g
    check_condition(metric, tolerances=tolerances, where=point)
    size = point.size

    # derivative[k, l, j] = d_k g_lj
    derivative = np.empty((size, size, size))
    for k in range(size):
        step = fd_step if fd_step is not None else tolerances.fd_step(float(point[k]))
        shift = np.zeros(size)
        shift[k] = step
        forward = field.sample(point + shift).g
        backward = field.sample(point - shift).g
        derivative[k] = (forward - backward) / (2.0 * step)

    # lowered[l, j, k] = d_k g_lj + d_j g_lk - d_l g_jk
    lowered = (
        np.transpose(derivative, (1, 2, 0))
        + np.transpose(derivative, (1, 0, 2))
        - derivative
    )
    lowered = 0.5 * (lowered + np.swapaxes(lowered, 1, 2))
    gamma = 0.5 * np.einsum("il,ljk->ijk", np.linalg.inv(metric), lowered)
    return ChristoffelField(x=point, gamma=gamma, metric=metric)

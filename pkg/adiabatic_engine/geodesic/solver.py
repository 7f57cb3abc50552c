"""
Boundary-value solver for x'' + Gamma(x)[x', x'] = 0 with fixed endpoints.

Strategy
--------
1. Single shooting on x'(0): ``scipy.integrate.solve_ivp`` for the initial-value
   problem and ``scipy.optimize.root`` (damped hybrid Newton) on the endpoint
   residual, starting from the straight line.
2. If shooting fails, collocation with ``scipy.integrate.solve_bvp`` on a
   uniform mesh seeded with the straight line.

A converged path is accepted only if the residual |y' - f(y)| / (1 + |f(y)|) of the
first-order system, measured on the solver's own dense output at the output
knots, is below ``GeodesicOptions.residual_tol``, and if its length does not
exceed the straight line's by more than the quadrature tolerance. A rejected
solution hands over to the next solver; ``NoConvergence`` follows once every
solver has failed.
"""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Any, Callable

import numpy as np
import scipy.integrate
import scipy.optimize
from numpy.typing import ArrayLike, NDArray

from ..errors import (
    CriticalPointOnPath,
    GapCollapse,
    NoConvergence,
    QuadratureNotConverged,
    SingularMetric,
)
from ..hamiltonian.model import HamiltonianModel, control_point
from ..metric.field import MetricField, as_metric_field
from ..metric.path_error import path_error_functional
from ..schedule import ControlPath, uniform_knots
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .christoffel import christoffel

_LOGGER = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]

# end segments of the dense output extrapolate past [0, 1]
_STENCIL_STEP = 1e-3


@dataclass(frozen=True, slots=True)
class GeodesicOptions:
    """
    Solver options.

    Attributes
    ----------
    mesh:
        Output knots (and collocation mesh size).
    max_iter:
        Cap on shooting function evaluations and collocation nodes scale.
    shooting_tol:
        Endpoint residual target; defaults to ``tolerances.shooting_tol``.
    method:
        ``"auto"`` (shooting, then collocation), ``"shooting"`` or ``"collocation"``.
    residual_tol:
        Accepted max over the output knots of |y' - f(y)| / (1 + |f(y)|) for
        y = (x, x'), y' = (x', -Gamma x' x'), evaluated on the solver's dense
        output. The collocation spline is cubic, so between its nodes the
        residual sits a few times above the ``solve_bvp`` tolerance.
    length_slack:
        Absolute allowance added to the relative ``tolerances.path_rel_tol``
        when the geodesic length is compared with the straight line; both
        lengths carry that relative quadrature error.
    """

    mesh: int = 129
    max_iter: int = 60
    shooting_tol: float | None = None
    method: str = "auto"
    residual_tol: float = 1e-6
    length_slack: float = 1e-9

    def __post_init__(self) -> None:
        if self.mesh < 3:
            raise ValueError("geodesic mesh needs at least three knots")
        if self.max_iter < 1:
            raise ValueError("max_iter must be positive")
        if self.method not in ("auto", "shooting", "collocation"):
            raise ValueError(f"unknown geodesic method {self.method!r}")
        if not self.residual_tol > 0.0 or self.length_slack < 0.0:
            raise ValueError("residual_tol must be positive and length_slack nonnegative")

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _endpoints(field: MetricField, x0: ArrayLike, x1: ArrayLike) -> tuple[FloatArray, FloatArray]:
    start = control_point(x0, field.param_dim)
    end = control_point(x1, field.param_dim)
    return start, end


class _GeodesicSystem:
    """First-order system y = (x, v), y' = (v, -Gamma v v) with failure tracking."""

    def __init__(self, field: MetricField, tolerances: Tolerances) -> None:
        self._field = field
        self._tolerances = tolerances
        self.size = field.param_dim
        self.evaluations = 0

    def acceleration(self, x: FloatArray, v: FloatArray) -> FloatArray:
        self.evaluations += 1
        try:
            connection = christoffel(self._field, x, tolerances=self._tolerances)
        except GapCollapse as exc:
            raise CriticalPointOnPath(f"gap collapses along iterate near x={x.tolist()}") from exc
        return connection.acceleration(v)

    def rhs(self, _s: float, y: FloatArray) -> FloatArray:
        x, v = y[: self.size], y[self.size :]
        return np.concatenate((v, self.acceleration(x, v)))

    def rhs_vectorized(self, _s: FloatArray, y: FloatArray) -> FloatArray:
        out = np.empty_like(y)
        for column in range(y.shape[1]):
            out[:, column] = self.rhs(0.0, y[:, column])
        return out

    def dense_residual(self, knots: FloatArray, values: FloatArray, slopes: FloatArray) -> float:
        """max |y' - f(y)| / (1 + |f(y)|) over components and knots; arrays are (2M, K)."""
        expected = self.rhs_vectorized(knots, values)
        return float(np.max(np.abs(slopes - expected) / (1.0 + np.abs(expected))))


def _stencil_slopes(dense: Callable[[FloatArray], FloatArray], knots: FloatArray) -> FloatArray:
    """Fourth-order central differences of a dense ODE solution."""
    h = _STENCIL_STEP
    near = dense(knots + h) - dense(knots - h)
    far = dense(knots + 2 * h) - dense(knots - 2 * h)
    return np.asarray((8.0 * near - far) / (12.0 * h), dtype=np.float64)


def _shoot(
    system: _GeodesicSystem,
    start: FloatArray,
    end: FloatArray,
    knots: FloatArray,
    options: GeodesicOptions,
    tolerance: float,
) -> tuple[FloatArray, FloatArray, dict[str, Any]]:
    size = start.size

    def integrate(v0: FloatArray, dense: bool = False) -> Any:
        return scipy.integrate.solve_ivp(
            system.rhs,
            (0.0, 1.0),
            np.concatenate((start, v0)),
            method="DOP853",
            rtol=1e-11,
            atol=1e-12,
            t_eval=knots if dense else None,
            dense_output=dense,
        )

    def residual(v0: FloatArray) -> FloatArray:
        solution = integrate(v0)
        if not solution.success:
            return np.full(size, 1e6)
        return solution.y[:size, -1] - end

    result = scipy.optimize.root(
        residual,
        end - start,
        method="hybr",
        options={"xtol": 1e-13, "maxfev": options.max_iter * (size + 1)},
    )
    miss = float(np.max(np.abs(residual(result.x))))
    _LOGGER.debug("shooting: %s, endpoint miss %.3e after %d evals", result.message, miss, result.nfev)
    if miss > tolerance:
        raise NoConvergence(f"shooting missed the endpoint by {miss:.3e}: {result.message}")
    solution = integrate(result.x, dense=True)
    residual_max = system.dense_residual(knots, solution.y, _stencil_slopes(solution.sol, knots))
    positions = solution.y[:size].T
    velocities = solution.y[size:].T
    # pin the far endpoint exactly; the miss is below tolerance
    positions[-1] = end
    return positions, velocities, {
        "method": "shooting",
        "endpoint_miss": miss,
        "nfev": int(result.nfev),
        "residual": residual_max,
    }


def _collocate(
    system: _GeodesicSystem,
    start: FloatArray,
    end: FloatArray,
    knots: FloatArray,
    options: GeodesicOptions,
    tolerance: float,
) -> tuple[FloatArray, FloatArray, dict[str, Any]]:
    size = start.size
    mesh = uniform_knots(max(options.mesh // 4, 9))
    guess = np.vstack(
        (
            start[:, None] + np.outer(end - start, mesh),
            np.repeat((end - start)[:, None], mesh.size, axis=1),
        )
    )

    def boundary(ya: FloatArray, yb: FloatArray) -> FloatArray:
        return np.concatenate((ya[:size] - start, yb[:size] - end))

    solution = scipy.integrate.solve_bvp(
        system.rhs_vectorized,
        boundary,
        mesh,
        guess,
        tol=max(tolerance, 1e-10),
        max_nodes=options.max_iter * 1000,
    )
    _LOGGER.debug("collocation: status=%d, %s", solution.status, solution.message)
    if not solution.success:
        raise NoConvergence(f"collocation failed: {solution.message}")
    values = solution.sol(knots)
    residual_max = system.dense_residual(knots, values, solution.sol(knots, 1))
    positions = values[:size].T.copy()
    velocities = values[size:].T.copy()
    positions[0], positions[-1] = start, end
    return positions, velocities, {
        "method": "collocation",
        "residual": residual_max,
        "max_rms_residual": float(np.max(solution.rms_residuals)),
        "nodes": int(solution.x.size),
    }


def euler_lagrange_residual(
    source: HamiltonianModel | MetricField,
    path: ControlPath,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """
    max_i |x''^i + Gamma^i_jk x'^j x'^k| at every knot.

    x'' is the second-order finite difference of the stored velocities, so this
    diagnoses any stored path (a file, a quadrature schedule); the solver itself
    measures its residual on the dense output.
    """
    field = as_metric_field(source, tolerances=tolerances)
    accelerations = path.accelerations()
    residuals = np.empty(path.knots)
    for index, (point, velocity, acceleration) in enumerate(
        zip(path.x, path.velocity, accelerations, strict=True)
    ):
        connection = christoffel(field, point, tolerances=tolerances)
        residuals[index] = float(np.max(np.abs(acceleration - connection.acceleration(velocity))))
    return residuals


def solve_geodesic(
    source: HamiltonianModel | MetricField,
    x0: ArrayLike,
    x1: ArrayLike,
    options: GeodesicOptions | None = None,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ControlPath:
    """
    Solve the geodesic boundary-value problem between ``x0`` and ``x1``.

    Parameters
    ----------
    source:
        Hamiltonian model or metric field (must be nondegenerate near the
        straight line between the endpoints).
    x0, x1:
        Endpoints.
    options:
        Solver options.
    tolerances:
        Numerical tolerances; ``shooting_tol`` is the endpoint target.

    Returns
    -------
    ControlPath
        Geodesic on ``options.mesh`` uniform knots, with diagnostics in
        ``metadata`` (method, residual, lengths).

    Raises
    ------
    NoConvergence
        If every solver fails: no convergence, a residual above
        ``options.residual_tol``, or a result longer than the straight line.
    CriticalPointOnPath
        If the gap collapses along an iterate or the accepted path.
    SingularMetric
        If the metric cannot be inverted along an iterate.
    """
    opts = options or GeodesicOptions()
    tolerance = opts.shooting_tol if opts.shooting_tol is not None else tolerances.shooting_tol
    field = as_metric_field(source, tolerances=tolerances)
    start, end = _endpoints(field, x0, x1)
    knots = uniform_knots(opts.mesh)
    straight = ControlPath.linear(start, end, knots=opts.mesh)
    if np.allclose(start, end, rtol=0.0, atol=1e-15):
        return ControlPath.constant(start, knots=opts.mesh, label="geodesic").with_metadata(
            method="trivial", residual=0.0
        )

    solvers: list[Callable[..., tuple[FloatArray, FloatArray, dict[str, Any]]]] = []
    if opts.method in ("auto", "shooting"):
        solvers.append(_shoot)
    if opts.method in ("auto", "collocation"):
        solvers.append(_collocate)

    failures: list[str] = []
    singular = 0
    for solver in solvers:
        system = _GeodesicSystem(field, tolerances)
        try:
            positions, velocities, diagnostics = solver(system, start, end, knots, opts, tolerance)
        except (NoConvergence, SingularMetric) as exc:
            singular += isinstance(exc, SingularMetric)
            failures.append(f"{solver.__name__.strip('_')}: {exc}")
            _LOGGER.debug("geodesic solver %s failed: %s", solver.__name__, exc)
            continue
        method = diagnostics["method"]
        residual = float(diagnostics["residual"])
        diagnostics.update(evaluations=system.evaluations)
        if residual > opts.residual_tol:
            failures.append(
                f"{method}: Euler-Lagrange residual {residual:.3e} exceeds {opts.residual_tol:.1e}"
            )
            _LOGGER.debug("geodesic solver %s rejected: residual %.3e", method, residual)
            continue
        path = ControlPath(s=knots, x=positions, velocity=velocities, label="geodesic")
        try:
            lengths = _compare_lengths(field, path, straight, tolerances)
        except QuadratureNotConverged as exc:
            failures.append(f"{method}: length quadrature failed: {exc}")
            continue
        diagnostics.update(lengths)
        if "straight_length" in lengths and lengths["length"] > lengths["straight_length"] * (
            1.0 + tolerances.path_rel_tol
        ) + opts.length_slack:
            failures.append(
                f"{method}: longer than the straight line "
                f"({lengths['length']:.12g} > {lengths['straight_length']:.12g})"
            )
            continue
        return path.with_metadata(**diagnostics, options=opts.to_dict())
    if singular and singular == len(failures):
        raise SingularMetric("; ".join(failures))
    raise NoConvergence("; ".join(failures) or "no geodesic solver ran")


def _compare_lengths(
    field: MetricField, path: ControlPath, straight: ControlPath, tolerances: Tolerances
) -> dict[str, float]:
    """
    Lengths of the solution and the straight line.

    Only a straight line that touches a singularity skips the comparison.

    Raises
    ------
    CriticalPointOnPath
        If the solution itself passes a point where the gap closes.
    """
    try:
        length = path_error_functional(field, path, frobenius=False, tolerances=tolerances)
    except GapCollapse as exc:
        raise CriticalPointOnPath(f"geodesic passes a collapsed gap: {exc}") from exc
    try:
        reference = path_error_functional(field, straight, frobenius=False, tolerances=tolerances)
    except GapCollapse as exc:
        _LOGGER.debug("straight line touches a singularity, length comparison skipped: %s", exc)
        return {"length": length.total_length}
    return {"length": length.total_length, "straight_length": reference.total_length}

"""
One-parameter geodesics by quadrature, path lengths and critical-point splices.

In one dimension the geodesic equation integrates once: a geodesic runs at
constant speed, so s is the normalized arc length

    s(x) = int_{x0}^{x} sqrt(g(u)) du / int_{x0}^{x1} sqrt(g(u)) du,

and x(s) follows by inverting this map. Integrable singularities of g (the
gap closing at a critical point) are handled by placing a breakpoint on them.

Design notes
------------
- The arc-length map is tabulated once with ``scipy.integrate.quad`` on a grid
  that contains every singular point; each knot is then inverted with
  ``scipy.optimize.brentq`` inside its table segment.
- ``quad`` never samples segment endpoints, so a density that is infinite at a
  breakpoint is still integrated.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Callable, Sequence

import numpy as np
import scipy.integrate
import scipy.optimize
from numpy.typing import NDArray

from ..errors import DegenerateMode, GapCollapse, NonIntegrableSingularity
from ..hamiltonian.model import HamiltonianModel
from ..metric.field import MetricField, ScalarMetricField, as_metric_field
from ..metric.path_error import path_error_functional
from ..schedule import ControlPath, uniform_knots
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .solver import GeodesicOptions, solve_geodesic

_LOGGER = logging.getLogger(__name__)

FloatArray = NDArray[np.float64]
ScalarMetric = Callable[[float], float]

TABLE_SEGMENTS = 256
_QUAD_LIMIT = 200
_INVERSION_XTOL = 1e-12


def _as_source(
    source: ScalarMetric | MetricField | HamiltonianModel, tolerances: Tolerances
) -> ScalarMetric | MetricField:
    if hasattr(source, "evaluate"):
        return as_metric_field(source, tolerances=tolerances)  # type: ignore[arg-type]
    return source  # type: ignore[return-value]


def _scalar_metric(source: ScalarMetric | MetricField) -> ScalarMetric:
    """Return x -> g(x), with ``inf`` where the gap collapses."""
    if isinstance(source, ScalarMetricField):
        return source.metric
    if hasattr(source, "sample"):
        field: MetricField = source  # type: ignore[assignment]
        if field.param_dim != 1:
            raise ValueError(f"quadrature geodesics need a 1-D metric, got M={field.param_dim}")

        def metric(x: float) -> float:
            try:
                return float(field.sample([x]).g[0, 0])
            except GapCollapse:
                return float("inf")

        return metric
    return source  # type: ignore[return-value]


def _declared_singularities(source: ScalarMetric | MetricField) -> tuple[float, ...]:
    points = getattr(source, "singular_points", ())
    return tuple(float(point) for point in points)


class _ArcLengthTable:
    """Cumulative int sqrt(g) on a breakpoint grid, with local inversion."""

    def __init__(
        self,
        metric: ScalarMetric,
        x0: float,
        x1: float,
        *,
        singular_points: Sequence[float],
        segments: int,
        tolerances: Tolerances,
    ) -> None:
        self._metric = metric
        self._tolerances = tolerances
        self.x0 = x0
        self.x1 = x1
        self.direction = 1.0 if x1 >= x0 else -1.0
        low, high = min(x0, x1), max(x0, x1)
        interior = [point for point in singular_points if low < point < high]
        grid = np.unique(np.concatenate((np.linspace(low, high, segments + 1), interior)))
        # oriented from x0 to x1
        self.breakpoints = grid if self.direction > 0 else grid[::-1]
        self.singular_points = tuple(sorted(interior))
        pieces = [self._integrate(a, b) for a, b in zip(self.breakpoints[:-1], self.breakpoints[1:])]
        self.cumulative = np.concatenate(([0.0], np.cumsum(pieces)))
        self.total = float(self.cumulative[-1])
        if not np.isfinite(self.total):
            raise NonIntegrableSingularity(f"arc length from {x0} to {x1} is not finite")

    def density(self, x: float) -> float:
        try:
            value = float(self._metric(x))
        except (DegenerateMode, GapCollapse):
            return float("inf")
        if value < 0.0:
            raise ValueError(f"metric is negative at x={x}: {value}")
        return float(np.sqrt(value))

    def _integrate(self, a: float, b: float) -> float:
        """Unsigned int_a^b sqrt(g) along the path orientation."""
        if a == b:
            return 0.0
        low, high = (a, b) if a < b else (b, a)
        result = scipy.integrate.quad(
            self.density,
            low,
            high,
            epsabs=0.01 * self._tolerances.quadrature_abs,
            epsrel=1e-10,
            limit=_QUAD_LIMIT,
            full_output=1,
        )
        value, error = float(result[0]), float(result[1])
        if not np.isfinite(value) or (len(result) > 3 and error > self._tolerances.quadrature_abs):
            message = result[3] if len(result) > 3 else "non-finite integral"
            raise NonIntegrableSingularity(
                f"quadrature of sqrt(g) on [{low}, {high}] did not converge "
                f"(estimate {value:.6g} +/- {error:.1e}): {message}"
            )
        return value

    def fraction(self, x: float) -> float:
        """Normalized arc length s(x) for x between x0 and x1."""
        offset = self.direction * (x - self.x0)
        positions = self.direction * (self.breakpoints - self.x0)
        index = int(np.clip(np.searchsorted(positions, offset, side="right") - 1, 0, positions.size - 2))
        start = float(self.breakpoints[index])
        return (self.cumulative[index] + self._integrate(start, x)) / self.total

    def invert(self, s: float) -> float:
        """x with fraction(x) = s, to ``_INVERSION_XTOL`` in x."""
        if s <= 0.0:
            return self.x0
        if s >= 1.0:
            return self.x1
        target = s * self.total
        index = int(
            np.clip(np.searchsorted(self.cumulative, target, side="right") - 1, 0, self.cumulative.size - 2)
        )
        a = float(self.breakpoints[index])
        b = float(self.breakpoints[index + 1])
        below = float(self.cumulative[index]) - target
        above = float(self.cumulative[index + 1]) - target
        if below == 0.0:
            return a
        if above == 0.0:
            return b

        def miss(x: float) -> float:
            if x == a:
                return below
            if x == b:
                return above
            return below + self._integrate(a, x)

        low, high = min(a, b), max(a, b)
        return float(
            scipy.optimize.brentq(miss, low, high, xtol=_INVERSION_XTOL, rtol=4 * np.finfo(float).eps)
        )

    def rate(self, x: float) -> float:
        """dx/ds = direction * total / sqrt(g); zero where g diverges."""
        density = self.density(x)
        if np.isinf(density):
            return 0.0
        if density == 0.0:
            raise ValueError(f"metric vanishes at x={x}; the arc-length map cannot be inverted")
        return self.direction * self.total / density


def _sample_table(table: _ArcLengthTable, s: FloatArray) -> tuple[FloatArray, FloatArray]:
    positions = np.array([table.invert(float(value)) for value in s])
    if table.direction > 0:
        positions = np.maximum.accumulate(positions)
    else:
        positions = np.minimum.accumulate(positions)
    rates = np.array([table.rate(float(x)) for x in positions])
    return positions, rates


def _path_from_table(table: _ArcLengthTable, s: FloatArray, *, label: str) -> ControlPath:
    positions, rates = _sample_table(table, s)
    return ControlPath(s=s, x=positions, velocity=rates, label=label)


def quadrature_geodesic_1d(
    metric_fn: ScalarMetric | MetricField | HamiltonianModel,
    x0: float,
    x1: float,
    *,
    knots: int = 201,
    singular_points: Sequence[float] = (),
    table_segments: int = TABLE_SEGMENTS,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ControlPath:
    """
    Geodesic of a one-parameter metric by inverting the normalized arc length.

    Parameters
    ----------
    metric_fn:
        ``x -> g(x)``, a :class:`ScalarMetricField` or any 1-D metric field.
        May be infinite at integrable singularities.
    x0, x1:
        Endpoints.
    knots:
        Number of uniform output knots.
    singular_points:
        Extra coordinates where ``g`` diverges; a field's own
        ``singular_points`` are always included.
    table_segments:
        Uniform segments of the arc-length table.
    tolerances:
        ``quadrature_abs`` bounds each segment's quadrature error.

    Returns
    -------
    ControlPath
        Monotone x(s) with velocities sqrt-normalized so g x'^2 is constant.
        ``metadata`` records the total int sqrt(g) and the singular points used.

    Raises
    ------
    NonIntegrableSingularity
        If adaptive quadrature of sqrt(g) does not converge.
    """
    source = _as_source(metric_fn, tolerances)
    metric = _scalar_metric(source)
    start, end = float(x0), float(x1)
    s = uniform_knots(knots)
    if start == end:
        return ControlPath.constant([start], knots=knots, label="geodesic").with_metadata(
            method="quadrature", length=0.0
        )
    table = _ArcLengthTable(
        metric,
        start,
        end,
        singular_points=(*_declared_singularities(source), *singular_points),
        segments=table_segments,
        tolerances=tolerances,
    )
    _LOGGER.debug(
        "arc-length table on %d breakpoints: total %.12g", table.breakpoints.size, table.total
    )
    path = _path_from_table(table, s, label="geodesic")
    return path.with_metadata(
        method="quadrature", length=table.total, singular_points=list(table.singular_points)
    )


def path_length(
    source: HamiltonianModel | MetricField,
    path: ControlPath,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Riemannian length int sqrt(g_ij x'^i x'^j) ds of ``path``.

    Equals eps(1) / sqrt(2 g0) for a constant ground degeneracy.

    Raises
    ------
    GapCollapse
        If the path touches a point where the gap closes.
    """
    accumulator = path_error_functional(source, path, frobenius=False, tolerances=tolerances)
    return accumulator.total_length


@dataclass(frozen=True, slots=True)
class CriticalSplice:
    """
    Geodesic across a critical point, spliced from two BVP halves.

    Attributes
    ----------
    path:
        Spliced schedule: BVP on [0, s_c - eta] and [s_c + eta, 1], quadrature
        in between.
    quadrature:
        The quadrature geodesic on the same endpoints (authoritative).
    s_c:
        Normalized arc length at the critical coordinate.
    eta:
        Half-width of the excluded window around ``s_c``.
    sup_distance:
        max |x_splice - x_quadrature| over the BVP knots.
    velocity_jumps:
        |x'_bvp - x'_quadrature| at s_c - eta and s_c + eta.
    residuals:
        Euler-Lagrange residuals reported by the two BVP halves.
    """

    path: ControlPath
    quadrature: ControlPath
    s_c: float
    eta: float
    sup_distance: float
    velocity_jumps: tuple[float, float]
    residuals: tuple[float, float]

    def to_dict(self) -> dict[str, Any]:
        return {
            "s_c": self.s_c,
            "eta": self.eta,
            "sup_distance": self.sup_distance,
            "velocity_jumps": list(self.velocity_jumps),
            "residuals": list(self.residuals),
        }


def _rescaled(piece: ControlPath, lower: float, upper: float) -> tuple[FloatArray, FloatArray, FloatArray]:
    """Map a [0, 1] solution onto [lower, upper]; velocities scale by 1 / width."""
    width = upper - lower
    return lower + width * piece.s, piece.x[:, 0], piece.velocity[:, 0] / width


def solve_geodesic_through_critical(
    source: ScalarMetric | MetricField | HamiltonianModel,
    x0: float,
    x1: float,
    x_c: float,
    *,
    eta: float = 0.05,
    knots: int = 201,
    options: GeodesicOptions | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> CriticalSplice:
    """
    Solve a 1-D geodesic whose straight path crosses a critical point.

    The BVP solver runs on the two halves that stay ``eta`` (in s) away from
    the critical arc length s_c; their far endpoints come from the quadrature
    geodesic, which also fills the excluded window. The splice is not forced
    to be C^1; the velocity jumps are reported instead.

    Raises
    ------
    ValueError
        If ``x_c`` does not lie strictly between the endpoints or the window
        does not fit inside (0, 1).
    NonIntegrableSingularity, NoConvergence, CriticalPointOnPath
        From the quadrature or either BVP half.
    """
    start, end, critical = float(x0), float(x1), float(x_c)
    if not min(start, end) < critical < max(start, end):
        raise ValueError(f"critical point {critical} is not strictly between {start} and {end}")
    source = _as_source(source, tolerances)
    metric = _scalar_metric(source)
    if hasattr(source, "sample"):
        field: MetricField = source  # type: ignore[assignment]
    else:
        field = ScalarMetricField(label="metric", metric=metric, singular_points=(critical,))
    table = _ArcLengthTable(
        metric,
        start,
        end,
        singular_points=(*_declared_singularities(source), critical),
        segments=TABLE_SEGMENTS,
        tolerances=tolerances,
    )
    quadrature = _path_from_table(table, uniform_knots(knots), label="geodesic").with_metadata(
        method="quadrature", length=table.total
    )
    s_c = table.fraction(critical)
    left_end, right_start = s_c - eta, s_c + eta
    if not (0.0 < left_end and right_start < 1.0):
        raise ValueError(f"window [{left_end:.4g}, {right_start:.4g}] around s_c does not fit in (0, 1)")

    x_left, x_right = table.invert(left_end), table.invert(right_start)
    opts = options or GeodesicOptions()
    left = solve_geodesic(field, [start], [x_left], opts, tolerances=tolerances)
    right = solve_geodesic(field, [x_right], [end], opts, tolerances=tolerances)

    s_left, x_l, v_l = _rescaled(left, 0.0, left_end)
    s_right, x_r, v_r = _rescaled(right, right_start, 1.0)
    middle_s = np.linspace(left_end, right_start, max(knots // 4, 5))
    x_m, v_m = _sample_table(table, middle_s)

    # joins use the BVP values; interior window knots come from quadrature
    spliced_s = np.concatenate((s_left, middle_s[1:-1], s_right))
    spliced_x = np.concatenate((x_l, x_m[1:-1], x_r))
    spliced_v = np.concatenate((v_l, v_m[1:-1], v_r))
    path = ControlPath(s=spliced_s, x=spliced_x, velocity=spliced_v, label="geodesic-splice")

    reference_left, _ = _sample_table(table, s_left)
    reference_right, _ = _sample_table(table, s_right)
    sup_distance = float(
        max(np.max(np.abs(x_l - reference_left)), np.max(np.abs(x_r - reference_right)))
    )
    jumps = (float(abs(v_l[-1] - v_m[0])), float(abs(v_r[0] - v_m[-1])))
    residuals = (float(left.metadata.get("residual", 0.0)), float(right.metadata.get("residual", 0.0)))
    _LOGGER.info(
        "critical splice at s_c=%.6f: sup distance %.3e, velocity jumps %.3e / %.3e",
        s_c,
        sup_distance,
        *jumps,
    )
    report = {
        "s_c": float(s_c),
        "eta": float(eta),
        "sup_distance": sup_distance,
        "velocity_jumps": list(jumps),
        "residuals": list(residuals),
    }
    return CriticalSplice(
        path=path.with_metadata(method="splice", **report),
        quadrature=quadrature,
        s_c=float(s_c),
        eta=float(eta),
        sup_distance=sup_distance,
        velocity_jumps=jumps,
        residuals=residuals,
    )

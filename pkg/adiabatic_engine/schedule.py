"""
Control schedules s -> x(s) on [0, 1].

A :class:`ControlPath` stores knots (s_k, x(s_k), dx/ds(s_k)) and interpolates
them with a cubic Hermite spline, so position and velocity are available at any
s. Geodesic solvers, path functionals and propagators all consume this type.

Design constraints
------------------
- s starts at 0, ends at 1 and is strictly increasing.
- Positions and velocities are stored as (K, M) arrays even for M = 1.
- A path is immutable; resampling returns a new path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.interpolate import CubicHermiteSpline

from .hamiltonian.model import control_point

_BOUNDARY_TOL = 1e-12


def _as_points(values: ArrayLike, knots: int) -> NDArray[np.float64]:
    array = np.asarray(values, dtype=np.float64)
    if array.ndim == 1:
        array = array[:, None]
    if array.ndim != 2 or array.shape[0] != knots:
        raise ValueError(f"expected {knots} rows of control points, got shape {array.shape}")
    return array


def uniform_knots(count: int) -> NDArray[np.float64]:
    """Return ``count`` equally spaced knots on [0, 1] (count >= 2)."""
    if count < 2:
        raise ValueError("a path needs at least two knots")
    return np.linspace(0.0, 1.0, count)


@dataclass(frozen=True, slots=True)
class ControlPath:
    """
    Discretized schedule on [0, 1].

    Attributes
    ----------
    s:
        Strictly increasing knots with s[0] = 0 and s[-1] = 1.
    x:
        Control points at the knots, shape (K, M).
    velocity:
        dx/ds at the knots, shape (K, M).
    label:
        Short description used in artifacts and logs.
    metadata:
        Solver diagnostics and provenance (JSON-serializable).
    """

    s: NDArray[np.float64]
    x: NDArray[np.float64]
    velocity: NDArray[np.float64]
    label: str = "path"
    metadata: Mapping[str, Any] = field(default_factory=dict)
    _spline: CubicHermiteSpline = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=np.float64)
        if s.ndim != 1 or s.size < 2:
            raise ValueError("path knots must be a 1-D array with at least two entries")
        if abs(s[0]) > _BOUNDARY_TOL or abs(s[-1] - 1.0) > _BOUNDARY_TOL:
            raise ValueError(f"path knots must run from 0 to 1, got [{s[0]}, {s[-1]}]")
        if np.any(np.diff(s) <= 0.0):
            raise ValueError("path knots must be strictly increasing")
        x = _as_points(self.x, s.size)
        velocity = _as_points(self.velocity, s.size)
        if velocity.shape != x.shape:
            raise ValueError("positions and velocities must have matching shapes")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(velocity))):
            raise ValueError("path has non-finite positions or velocities")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "velocity", velocity)
        object.__setattr__(self, "_spline", CubicHermiteSpline(s, x, velocity, axis=0))

    @property
    def knots(self) -> int:
        return int(self.s.size)

    @property
    def param_dim(self) -> int:
        return int(self.x.shape[1])

    @property
    def start(self) -> NDArray[np.float64]:
        return self.x[0].copy()

    @property
    def end(self) -> NDArray[np.float64]:
        return self.x[-1].copy()

    def position(self, s: float) -> NDArray[np.float64]:
        """Interpolated x(s) as an M-vector."""
        return np.asarray(self._spline(np.clip(s, 0.0, 1.0)), dtype=np.float64)

    def velocity_at(self, s: float) -> NDArray[np.float64]:
        """Interpolated dx/ds as an M-vector."""
        return np.asarray(self._spline(np.clip(s, 0.0, 1.0), 1), dtype=np.float64)

    def positions(self, s: ArrayLike) -> NDArray[np.float64]:
        """Interpolated x at many knots, shape (len(s), M)."""
        return np.asarray(self._spline(np.clip(np.asarray(s, dtype=np.float64), 0.0, 1.0)))

    def velocities(self, s: ArrayLike) -> NDArray[np.float64]:
        return np.asarray(self._spline(np.clip(np.asarray(s, dtype=np.float64), 0.0, 1.0), 1))

    def accelerations(self) -> NDArray[np.float64]:
        """d^2x/ds^2 at the knots from second-order differences of the velocities."""
        return np.asarray(np.gradient(self.velocity, self.s, axis=0, edge_order=2))

    def resample(self, s: ArrayLike) -> ControlPath:
        """Return the same curve on new knots (interpolated)."""
        knots = np.asarray(s, dtype=np.float64)
        return ControlPath(
            s=knots,
            x=self.positions(knots),
            velocity=self.velocities(knots),
            label=self.label,
            metadata=self.metadata,
        )

    def with_metadata(self, **entries: Any) -> ControlPath:
        return ControlPath(
            s=self.s,
            x=self.x,
            velocity=self.velocity,
            label=self.label,
            metadata={**dict(self.metadata), **entries},
        )

    def sup_distance(self, other: Callable[[NDArray[np.float64]], ArrayLike]) -> float:
        """max_k |x(s_k) - other(s_k)| over knots and components."""
        reference = np.asarray(other(self.s), dtype=np.float64)
        if reference.ndim == 1:
            reference = reference[:, None]
        return float(np.max(np.abs(self.x - reference)))

    @classmethod
    def from_function(
        cls,
        position: Callable[[NDArray[np.float64]], ArrayLike],
        velocity: Callable[[NDArray[np.float64]], ArrayLike] | None = None,
        *,
        knots: int | Sequence[float] = 201,
        label: str = "path",
    ) -> ControlPath:
        """
        Sample a vectorized position function (and optional derivative).

        Without ``velocity`` the derivative is taken by second-order finite
        differences of the sampled positions (``numpy.gradient``).
        """
        s = uniform_knots(knots) if isinstance(knots, int) else np.asarray(knots, dtype=np.float64)
        points = _as_points(position(s), s.size)
        if velocity is None:
            rates = np.gradient(points, s, axis=0, edge_order=2)
        else:
            rates = _as_points(velocity(s), s.size)
        return cls(s=s, x=points, velocity=rates, label=label)

    @classmethod
    def linear(
        cls, start: ArrayLike, end: ArrayLike, *, knots: int = 201, label: str = "linear"
    ) -> ControlPath:
        """Straight line x(s) = start + s (end - start)."""
        origin = control_point(start)
        target = control_point(end, origin.size)
        s = uniform_knots(knots)
        direction = target - origin
        points = origin[None, :] + s[:, None] * direction[None, :]
        return cls(s=s, x=points, velocity=np.tile(direction, (s.size, 1)), label=label)

    @classmethod
    def constant(cls, point: ArrayLike, *, knots: int = 2, label: str = "constant") -> ControlPath:
        """Path that stays at one control point."""
        origin = control_point(point)
        s = uniform_knots(knots)
        return cls(
            s=s,
            x=np.tile(origin, (s.size, 1)),
            velocity=np.zeros((s.size, origin.size)),
            label=label,
        )


def sine_perturbation(
    base: ControlPath,
    amplitudes: ArrayLike,
    *,
    label: str = "perturbed",
) -> ControlPath:
    """
    Add sum_k a_k sin(k pi s) to every component of ``base``.

    ``amplitudes`` has shape (K,) or (K, M). The endpoints are preserved and the
    result is C^1 with analytic velocities.
    """
    coefficients = np.asarray(amplitudes, dtype=np.float64)
    if coefficients.ndim == 1:
        coefficients = np.repeat(coefficients[:, None], base.param_dim, axis=1)
    modes = np.arange(1, coefficients.shape[0] + 1, dtype=np.float64)
    phases = np.pi * np.outer(base.s, modes)
    shift = np.sin(phases) @ coefficients
    rate = (np.cos(phases) * (np.pi * modes)[None, :]) @ coefficients
    return ControlPath(
        s=base.s,
        x=base.x + shift,
        velocity=base.velocity + rate,
        label=label,
        metadata=base.metadata,
    )

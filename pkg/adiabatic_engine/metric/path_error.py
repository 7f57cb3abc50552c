"""
Path error functional eps(s) = int_0^s sqrt(2 g0 g_ij x'^i x'^j) ds'.

The same quantity is the Frobenius action int ||[P0', P0]||_2 ds; with a
Hamiltonian model available both forms are integrated on the same knots. The
sup-norm action eps~ = int ||[P0', P0]|| ds is reported alongside. The commutator
has paired singular values, so sqrt(2) eps~ <= eps <= sqrt(2 g0) eps~ holds
pointwise in the integrands.

Notes
-----
Quadrature is composite Simpson (``scipy.integrate.cumulative_simpson``) on
uniform knots, doubled until the total changes by less than
``tolerances.path_rel_tol`` relative. Doubling reuses every previous sample;
reaching the knot cap first raises ``QuadratureNotConverged``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import cumulative_simpson, quad

from ..errors import GapCollapse, QuadratureNotConverged
from ..hamiltonian.model import HamiltonianModel
from ..hamiltonian.spectral import diagonalize, operator_norm, projector_velocity
from ..schedule import ControlPath
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .field import MetricField, as_metric_field, field_model

_LOGGER = logging.getLogger(__name__)

INITIAL_KNOTS = 65
MAX_KNOTS = 16385

FloatArray = NDArray[np.float64]


@dataclass(frozen=True, slots=True)
class PathErrorAccumulator:
    """
    Sampled error functional along a path.

    Attributes
    ----------
    s, x, velocity:
        Quadrature knots and the path evaluated on them.
    g0:
        Ground degeneracy at each knot.
    speed:
        sqrt(g_ij x'^i x'^j).
    integrand:
        sqrt(2 g0) * speed.
    epsilon:
        Running eps(s); epsilon[0] = 0 and nondecreasing.
    length:
        Running int speed ds.
    frobenius_integrand, epsilon_frobenius:
        ||[P0', P0]||_2 and its running integral (model-backed fields only).
    sup_integrand, epsilon_tilde:
        ||[P0', P0]|| and its running integral (model-backed fields only).
    converged:
        Whether refinement met the relative tolerance; always true once returned.
    """

    s: FloatArray
    x: FloatArray
    velocity: FloatArray
    g0: NDArray[np.int64]
    speed: FloatArray
    integrand: FloatArray
    epsilon: FloatArray
    length: FloatArray
    frobenius_integrand: FloatArray | None = None
    epsilon_frobenius: FloatArray | None = None
    sup_integrand: FloatArray | None = None
    epsilon_tilde: FloatArray | None = None
    converged: bool = True

    @property
    def total(self) -> float:
        return float(self.epsilon[-1])

    @property
    def total_length(self) -> float:
        return float(self.length[-1])

    @property
    def total_tilde(self) -> float | None:
        return None if self.epsilon_tilde is None else float(self.epsilon_tilde[-1])

    def epsilon_at(self, s: float | FloatArray) -> FloatArray:
        """Running eps interpolated at arbitrary s."""
        return np.asarray(np.interp(s, self.s, self.epsilon), dtype=np.float64)

    def epsilon_tilde_at(self, s: float | FloatArray) -> FloatArray:
        if self.epsilon_tilde is None:
            raise ValueError("sup-norm action is only available for model-backed paths")
        return np.asarray(np.interp(s, self.s, self.epsilon_tilde), dtype=np.float64)

    def summary(self) -> dict[str, Any]:
        return {
            "epsilon": self.total,
            "length": self.total_length,
            "epsilon_tilde": self.total_tilde,
            "epsilon_frobenius": (
                None if self.epsilon_frobenius is None else float(self.epsilon_frobenius[-1])
            ),
            "knots": int(self.s.size),
            "converged": self.converged,
        }


def _running(values: FloatArray, s: FloatArray, tolerance: float) -> FloatArray:
    running = cumulative_simpson(values, x=s, initial=0.0)
    envelope = np.maximum.accumulate(np.maximum(running, 0.0))
    dip = float(np.max(envelope - running))
    # the integrands are nonnegative, so any dip is quadrature error
    if dip > tolerance * max(float(envelope[-1]), np.finfo(float).tiny):
        raise QuadratureNotConverged(
            f"running integral dips by {dip:.3e} on {s.size} knots (relative tolerance {tolerance:.1e})"
        )
    return envelope


def _speed_and_degeneracy(
    field: MetricField, path: ControlPath, s: FloatArray
) -> tuple[FloatArray, NDArray[np.int64]]:
    speeds = np.empty(s.size)
    degeneracies = np.empty(s.size, dtype=np.int64)
    for index, value in enumerate(s):
        sample = field.sample(path.position(value))
        squared = sample.norm_squared(path.velocity_at(value))
        speeds[index] = np.sqrt(max(squared, 0.0))
        degeneracies[index] = sample.g0
    return speeds, degeneracies


def _commutator_norms(
    model: HamiltonianModel, path: ControlPath, s: FloatArray, tolerances: Tolerances
) -> tuple[FloatArray, FloatArray]:
    frobenius = np.empty(s.size)
    sup = np.empty(s.size)
    for index, value in enumerate(s):
        point = path.position(value)
        spectral = diagonalize(model, point, tolerances=tolerances)
        p_dot = projector_velocity(
            model, point, path.velocity_at(value), spectral=spectral, tolerances=tolerances
        )
        projector = spectral.P0
        commutator = p_dot @ projector - projector @ p_dot
        frobenius[index] = float(np.linalg.norm(commutator, "fro"))
        sup[index] = operator_norm(commutator)
    return frobenius, sup


def path_error_functional(
    source: HamiltonianModel | MetricField,
    path: ControlPath,
    *,
    frobenius: bool = True,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    initial_knots: int = INITIAL_KNOTS,
    max_knots: int = MAX_KNOTS,
) -> PathErrorAccumulator:
    """
    Integrate eps(s) along ``path``.

    Parameters
    ----------
    source:
        Hamiltonian model or metric field.
    path:
        Schedule to evaluate.
    frobenius:
        Also integrate ||[P0', P0]||_2 and ||[P0', P0]|| (model-backed only).
    tolerances:
        ``path_rel_tol`` controls refinement.
    initial_knots, max_knots:
        Uniform knot counts of the first and the largest refinement level
        (2^k + 1 keeps Simpson panels even).

    Returns
    -------
    PathErrorAccumulator
        Metric-quadrature eps plus the optional Frobenius and sup-norm actions.

    Raises
    ------
    GapCollapse
        If the path touches a point where the gap closes.
    QuadratureNotConverged
        If doubling reaches ``max_knots`` before the total settles, or a running
        integral dips by more than the relative tolerance.
    """
    if max_knots <= initial_knots:
        raise ValueError("max_knots must exceed initial_knots")
    field = as_metric_field(source, tolerances=tolerances)
    s = np.linspace(0.0, 1.0, initial_knots)
    speeds, degeneracies = _speed_and_degeneracy(field, path, s)
    total = float(cumulative_simpson(np.sqrt(2.0 * degeneracies) * speeds, x=s)[-1])
    converged = False
    change = float("inf")
    while s.size < max_knots:
        midpoints = 0.5 * (s[:-1] + s[1:])
        mid_speeds, mid_degeneracies = _speed_and_degeneracy(field, path, midpoints)
        refined = np.empty(2 * s.size - 1)
        refined[::2], refined[1::2] = s, midpoints
        refined_speeds = np.empty(refined.size)
        refined_speeds[::2], refined_speeds[1::2] = speeds, mid_speeds
        refined_g0 = np.empty(refined.size, dtype=np.int64)
        refined_g0[::2], refined_g0[1::2] = degeneracies, mid_degeneracies
        s, speeds, degeneracies = refined, refined_speeds, refined_g0
        updated = float(cumulative_simpson(np.sqrt(2.0 * degeneracies) * speeds, x=s)[-1])
        change = abs(updated - total)
        total = updated
        _LOGGER.debug("path quadrature on %d knots: eps=%.12g change=%.3e", s.size, total, change)
        if change <= tolerances.path_rel_tol * max(abs(total), np.finfo(float).tiny):
            converged = True
            break
    if not converged:
        raise QuadratureNotConverged(
            f"path quadrature still changes by {change:.3e} at {s.size} knots "
            f"(relative tolerance {tolerances.path_rel_tol:.1e}, eps={total:.12g})"
        )

    integrand = np.sqrt(2.0 * degeneracies) * speeds
    accumulator: dict[str, Any] = {}
    model = field_model(source)
    if frobenius and model is not None:
        frobenius_values, sup_values = _commutator_norms(model, path, s, tolerances)
        accumulator = {
            "frobenius_integrand": frobenius_values,
            "epsilon_frobenius": _running(frobenius_values, s, tolerances.path_rel_tol),
            "sup_integrand": sup_values,
            "epsilon_tilde": _running(sup_values, s, tolerances.path_rel_tol),
        }
    return PathErrorAccumulator(
        s=s,
        x=path.positions(s),
        velocity=path.velocities(s),
        g0=degeneracies,
        speed=speeds,
        integrand=integrand,
        epsilon=_running(integrand, s, tolerances.path_rel_tol),
        length=_running(speeds, s, tolerances.path_rel_tol),
        converged=converged,
        **accumulator,
    )


def knot_profile(
    source: HamiltonianModel | MetricField,
    path: ControlPath,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[FloatArray, FloatArray]:
    """
    Speed and running eps on the knots of ``path`` itself.

    Unlike :func:`path_error_functional` this accepts paths that touch a point
    where the gap closes (thermodynamic-limit schedules end or cross there):
    the speed at such a knot is ``inf``, and eps is integrated knot to knot
    with ``scipy.integrate.quad``, whose nodes never include an interval end.

    Returns
    -------
    tuple of numpy.ndarray
        ``(speed, epsilon)``, each with one entry per knot; ``epsilon[0] = 0``.
    """
    field = as_metric_field(source, tolerances=tolerances)

    def integrand(value: float) -> float:
        try:
            sample = field.sample(path.position(value))
        except GapCollapse:
            # isolated singular points carry no weight
            return 0.0
        squared = sample.norm_squared(path.velocity_at(value))
        return float(np.sqrt(2.0 * sample.g0 * max(squared, 0.0)))

    speeds = np.empty(path.knots)
    for index, (point, velocity) in enumerate(zip(path.x, path.velocity, strict=True)):
        try:
            sample = field.sample(point)
        except GapCollapse:
            speeds[index] = np.inf
            continue
        speeds[index] = np.sqrt(max(sample.norm_squared(velocity), 0.0))

    epsilon = np.zeros(path.knots)
    for index in range(path.knots - 1):
        piece, _ = quad(
            integrand,
            float(path.s[index]),
            float(path.s[index + 1]),
            epsabs=0.0,
            epsrel=tolerances.path_rel_tol,
            limit=200,
        )
        epsilon[index + 1] = epsilon[index] + max(piece, 0.0)
    _LOGGER.debug(
        "knot profile of %s: eps=%.12g, %d singular knots",
        path.label,
        epsilon[-1],
        int(np.count_nonzero(np.isinf(speeds))),
    )
    return speeds, epsilon

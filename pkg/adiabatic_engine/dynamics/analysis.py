"""
Comparison of the actual and adiabatic propagators.

A :class:`PropagationResult` bundles both propagators on shared record knots
together with the derived quantities a run reports: the adiabatic error
delta(T) = max_s ||V - V_ad||, the operator fidelity f(s) = |Tr Omega| / N,
the path error eps(s) from the metric, and the ground blocks of V(1) and
V_ad(1) with the dynamical phase removed.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray
from scipy.integrate import quad

from ..hamiltonian.model import ComplexMatrix, HamiltonianModel
from ..hamiltonian.spectral import diagonalize
from ..metric.path_error import path_error_functional
from ..schedule import ControlPath
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .holonomy import wilczek_zee_holonomy
from .propagator import (
    PropagationOptions,
    PropagatorSamples,
    propagate,
    propagate_adiabatic,
)

_LOGGER = logging.getLogger(__name__)

FIDELITY_SLACK = 1e-9

FloatArray = NDArray[np.float64]


def _sup_norms(stack: NDArray[np.complex128]) -> FloatArray:
    return np.asarray([scipy.linalg.svdvals(matrix)[0] for matrix in stack], dtype=np.float64)


def ground_block(unitary: ComplexMatrix, start_frame: ComplexMatrix, end_frame: ComplexMatrix) -> ComplexMatrix:
    """Return F1^dagger U F0, the g0 x g0 block of ``unitary`` between ground frames."""
    return np.asarray(end_frame.conj().T @ unitary @ start_frame, dtype=np.complex128)


def dynamical_phase(
    model: HamiltonianModel, path: ControlPath, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> float:
    """Return int_0^1 E0(x(s)) ds."""

    def ground_energy(s: float) -> float:
        return diagonalize(model, path.position(s), tolerances=tolerances).E0

    value, _ = quad(ground_energy, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12, limit=200)
    return float(value)


@dataclass(frozen=True, slots=True)
class PropagationResult:
    """
    Actual and adiabatic propagation of one schedule at one total time.

    Attributes
    ----------
    T:
        Total evolution time (hbar = 1).
    s:
        Record knots.
    V, V_ad:
        Actual and adiabatic propagators, shape (K, N, N).
    epsilon, epsilon_tilde:
        Running path error eps(s) and sup-norm action eps~(s) on the knots.
    epsilon_total, epsilon_tilde_total:
        eps(1) and eps~(1).
    dynamical_phase:
        int E0 ds; ground blocks below are multiplied by exp(i T phase).
    ground_block_actual, ground_block_adiabatic:
        F1^dagger V(1) F0 and F1^dagger V_ad(1) F0 without dynamical phase.
    holonomy:
        Wilczek-Zee holonomy in the same endpoint gauge, when requested.
    diagnostics:
        Integrator summaries of both runs.
    """

    T: float
    s: FloatArray
    V: NDArray[np.complex128]
    V_ad: NDArray[np.complex128]
    epsilon: FloatArray
    epsilon_tilde: FloatArray
    epsilon_total: float
    epsilon_tilde_total: float
    dynamical_phase: float
    ground_block_actual: ComplexMatrix
    ground_block_adiabatic: ComplexMatrix
    intertwining: FloatArray
    holonomy: ComplexMatrix | None = None
    diagnostics: dict[str, Any] = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return int(self.V.shape[-1])

    @property
    def Omega(self) -> NDArray[np.complex128]:
        """Wave operator V_ad^dagger V on every knot."""
        return np.asarray(np.conj(np.swapaxes(self.V_ad, 1, 2)) @ self.V, dtype=np.complex128)

    @property
    def delta_s(self) -> FloatArray:
        """||V(s) - V_ad(s)|| (largest singular value) on every knot."""
        return _sup_norms(self.V - self.V_ad)

    @property
    def delta(self) -> float:
        return float(np.max(self.delta_s))

    @property
    def delta_frobenius(self) -> float:
        return float(np.max(np.linalg.norm(self.V - self.V_ad, axis=(1, 2))))

    @property
    def fidelity(self) -> FloatArray:
        return operator_fidelity(self)

    @property
    def holonomy_deviation_actual(self) -> float | None:
        if self.holonomy is None:
            return None
        return float(np.linalg.norm(self.ground_block_actual - self.holonomy, 2))

    @property
    def holonomy_deviation_adiabatic(self) -> float | None:
        if self.holonomy is None:
            return None
        return float(np.linalg.norm(self.ground_block_adiabatic - self.holonomy, 2))

    def rows(self) -> list[dict[str, float]]:
        """Time series for CSV output."""
        fidelity = self.fidelity
        delta = self.delta_s
        return [
            {
                "s": float(self.s[k]),
                "fidelity": float(fidelity[k]),
                "delta": float(delta[k]),
                "epsilon": float(self.epsilon[k]),
                "epsilon_tilde": float(self.epsilon_tilde[k]),
                "intertwining": float(self.intertwining[k]),
            }
            for k in range(self.s.size)
        ]

    def summary(self) -> dict[str, Any]:
        holonomy = None
        if self.holonomy is not None:
            holonomy = {"re": self.holonomy.real.tolist(), "im": self.holonomy.imag.tolist()}
        return {
            "T": self.T,
            "dim": self.dim,
            "delta": self.delta,
            "delta_frobenius": self.delta_frobenius,
            "fidelity_final": float(self.fidelity[-1]),
            "epsilon": self.epsilon_total,
            "epsilon_tilde": self.epsilon_tilde_total,
            "max_intertwining_residual": float(np.max(self.intertwining)),
            "fidelity_bound_holds": bool(np.all(fidelity_bound_check(self))),
            "dynamical_phase": self.dynamical_phase,
            "holonomy": holonomy,
            "holonomy_deviation_actual": self.holonomy_deviation_actual,
            "holonomy_deviation_adiabatic": self.holonomy_deviation_adiabatic,
            **self.diagnostics,
        }


def operator_fidelity(result: PropagationResult) -> FloatArray:
    """f(s) = |Tr Omega(s)| / N on the record knots."""
    traces = np.trace(result.Omega, axis1=1, axis2=2)
    return np.asarray(np.abs(traces) / result.dim, dtype=np.float64)


def fidelity_bound_check(result: PropagationResult, slack: float = FIDELITY_SLACK) -> NDArray[np.bool_]:
    """Pointwise 1 - eps(s)/sqrt(N) <= f(s) <= 1, each side relaxed by ``slack``."""
    fidelity = operator_fidelity(result)
    lower = 1.0 - result.epsilon / math.sqrt(result.dim) - slack
    return np.asarray((fidelity >= lower) & (fidelity <= 1.0 + slack))


def observable_deviation(result: PropagationResult, observable: ArrayLike) -> float:
    """
    Return max_s ||V O V^dagger - V_ad O V_ad^dagger||.

    Raises
    ------
    ValueError
        If ``observable`` is not an N x N matrix.
    """
    operator = np.asarray(observable, dtype=np.complex128)
    if operator.shape != (result.dim, result.dim):
        raise ValueError(f"observable must be {result.dim}x{result.dim}, got {operator.shape}")
    actual = result.V @ operator @ np.conj(np.swapaxes(result.V, 1, 2))
    adiabatic = result.V_ad @ operator @ np.conj(np.swapaxes(result.V_ad, 1, 2))
    return float(np.max(_sup_norms(actual - adiabatic)))


def intertwining_residual(
    model: HamiltonianModel,
    path: ControlPath,
    samples: PropagatorSamples,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> FloatArray:
    """||V_ad(s) P0(0) V_ad(s)^dagger - P0(s)|| on the record knots."""
    initial = diagonalize(model, path.position(0.0), tolerances=tolerances).P0
    residuals = np.empty(samples.s.size)
    for index, value in enumerate(samples.s):
        unitary = samples.U[index]
        target = diagonalize(model, path.position(float(value)), tolerances=tolerances).P0
        residuals[index] = scipy.linalg.svdvals(unitary @ initial @ unitary.conj().T - target)[0]
    return residuals


def run_propagation(
    model: HamiltonianModel,
    path: ControlPath,
    T: float,
    *,
    options: PropagationOptions | None = None,
    holonomy: bool = False,
    holonomy_mesh: int = 1025,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> PropagationResult:
    """
    Propagate V and V_ad along ``path`` and derive the reported quantities.

    Parameters
    ----------
    model, path:
        Hamiltonian family and schedule.
    T:
        Total evolution time.
    options:
        Shared record knots and step cap for both propagators.
    holonomy:
        Also compute the Wilczek-Zee holonomy on ``holonomy_mesh`` knots.
    tolerances:
        Numerical tolerances.

    Raises
    ------
    GapCollapse, StepLimitExceeded, FrameDegeneration
        From the underlying computations.
    """
    opts = options or PropagationOptions()
    actual = propagate(model, path, T, options=opts, tolerances=tolerances)
    adiabatic = propagate_adiabatic(model, path, T, options=opts, tolerances=tolerances)
    errors = path_error_functional(model, path, tolerances=tolerances)

    start = diagonalize(model, path.position(0.0), tolerances=tolerances)
    end = diagonalize(model, path.position(1.0), tolerances=tolerances)
    phase = dynamical_phase(model, path, tolerances=tolerances)
    unwind = cmath.exp(1j * T * phase)
    wilczek_zee = None
    if holonomy:
        wilczek_zee = wilczek_zee_holonomy(
            model,
            path,
            holonomy_mesh,
            start_frame=start.ground_frame,
            end_frame=end.ground_frame,
            tolerances=tolerances,
        )

    result = PropagationResult(
        T=float(T),
        s=actual.s,
        V=actual.U,
        V_ad=adiabatic.U,
        epsilon=errors.epsilon_at(actual.s),
        epsilon_tilde=errors.epsilon_tilde_at(actual.s),
        epsilon_total=errors.total,
        epsilon_tilde_total=float(errors.total_tilde or 0.0),
        dynamical_phase=phase,
        ground_block_actual=unwind * ground_block(actual.final, start.ground_frame, end.ground_frame),
        ground_block_adiabatic=unwind
        * ground_block(adiabatic.final, start.ground_frame, end.ground_frame),
        intertwining=intertwining_residual(model, path, adiabatic, tolerances=tolerances),
        holonomy=wilczek_zee,
        diagnostics={
            "propagator": actual.summary(),
            "adiabatic_propagator": adiabatic.summary(),
            "max_unitarity_defect": max(actual.unitarity_defect, adiabatic.unitarity_defect),
        },
    )
    _LOGGER.info(
        "T=%g: delta=%.3e f(1)=%.9f eps=%.6g", result.T, result.delta, result.fidelity[-1], result.epsilon_total
    )
    return result


def adiabatic_error(
    model: HamiltonianModel,
    path: ControlPath,
    T: float,
    *,
    options: PropagationOptions | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """delta(T) = max_s ||V(s) - V_ad(s)|| on the record knots."""
    actual = propagate(model, path, T, options=options, tolerances=tolerances)
    adiabatic = propagate_adiabatic(model, path, T, options=options, tolerances=tolerances)
    return float(np.max(_sup_norms(actual.U - adiabatic.U)))

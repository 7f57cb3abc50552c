"""
Dyson iterates of the wave operator Omega = V_ad^dagger V.

Omega solves dOmega/ds = -K Omega with K = V_ad^dagger [dP0/ds, P0] V_ad, so
Omega_0 = I and Omega_l(s) = -int_0^s K Omega_{l-1} ds'. The nested integrals
are cumulative Simpson sums on the record mesh of V_ad; the same ladder on
every other knot provides the mesh check.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg
from numpy.typing import NDArray
from scipy.integrate import cumulative_simpson

from ..errors import MeshTooCoarse
from ..hamiltonian.model import HamiltonianModel
from ..hamiltonian.spectral import diagonalize, projector_velocity
from ..schedule import ControlPath
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .propagator import PropagationOptions, PropagatorSamples, propagate, propagate_adiabatic

_LOGGER = logging.getLogger(__name__)

MAX_DEPTH = 4
DEFAULT_KNOTS = 2049
DEFAULT_MESH_TOL = 1e-5

FloatArray = NDArray[np.float64]
MatrixStack = NDArray[np.complex128]


@dataclass(frozen=True, slots=True)
class DysonLadder:
    """
    Dyson iterates on a uniform mesh.

    Attributes
    ----------
    s:
        Mesh knots.
    T:
        Total evolution time.
    iterates:
        Omega_0 .. Omega_L, shape (L + 1, K, N, N).
    norms:
        ||Omega_l(s)|| (largest singular value), shape (L + 1, K).
    epsilon_tilde:
        Running int ||[dP0/ds, P0]|| ds; bounds ||Omega_1(s)|| pointwise.
    mesh_error:
        Fine-versus-coarse estimate of the nested quadrature error.
    remainders:
        max_s ||Omega - sum_{j<=l} Omega_j|| for l = 0..L when Omega was propagated.
    """

    s: FloatArray
    T: float
    iterates: MatrixStack
    norms: FloatArray
    epsilon_tilde: FloatArray
    mesh_error: float
    remainders: FloatArray | None = None

    @property
    def depth(self) -> int:
        return int(self.iterates.shape[0] - 1)

    @property
    def delta_1(self) -> float:
        """max_s ||Omega_1(s)||."""
        return float(np.max(self.norms[1])) if self.depth >= 1 else 0.0

    def partial_sum(self, depth: int) -> MatrixStack:
        if not 0 <= depth <= self.depth:
            raise ValueError(f"depth must lie in [0, {self.depth}]")
        return np.asarray(np.sum(self.iterates[: depth + 1], axis=0), dtype=np.complex128)

    def summary(self) -> dict[str, Any]:
        return {
            "T": self.T,
            "depth": self.depth,
            "knots": int(self.s.size),
            "delta_1": self.delta_1,
            "iterate_norms": [float(np.max(row)) for row in self.norms],
            "epsilon_tilde": float(self.epsilon_tilde[-1]),
            "mesh_error": self.mesh_error,
            "remainders": None if self.remainders is None else self.remainders.tolist(),
        }


def _cumulative(values: NDArray[Any], s: FloatArray) -> NDArray[Any]:
    if np.iscomplexobj(values):
        real = cumulative_simpson(values.real, x=s, axis=0, initial=0.0)
        imag = cumulative_simpson(values.imag, x=s, axis=0, initial=0.0)
        return real + 1j * imag
    return cumulative_simpson(values, x=s, axis=0, initial=0.0)


def _ladder(kernel: MatrixStack, s: FloatArray, depth: int) -> MatrixStack:
    count, dim, _ = kernel.shape
    iterates = np.empty((depth + 1, count, dim, dim), dtype=np.complex128)
    iterates[0] = np.eye(dim)
    for level in range(1, depth + 1):
        iterates[level] = -_cumulative(kernel @ iterates[level - 1], s)
    return iterates


def _commutators(
    model: HamiltonianModel, path: ControlPath, s: FloatArray, tolerances: Tolerances
) -> MatrixStack:
    commutators = []
    for value in s:
        point = path.position(float(value))
        spectral = diagonalize(model, point, tolerances=tolerances)
        p_dot = projector_velocity(
            model, point, path.velocity_at(float(value)), spectral=spectral, tolerances=tolerances
        )
        projector = spectral.P0
        commutators.append(p_dot @ projector - projector @ p_dot)
    return np.asarray(commutators, dtype=np.complex128)


def _sup_norms(stack: MatrixStack) -> FloatArray:
    return np.asarray([scipy.linalg.svdvals(matrix)[0] for matrix in stack], dtype=np.float64)


def dyson_ladder(
    model: HamiltonianModel,
    path: ControlPath,
    T: float,
    L: int = 2,
    *,
    knots: int = DEFAULT_KNOTS,
    mesh_tol: float = DEFAULT_MESH_TOL,
    adiabatic: PropagatorSamples | None = None,
    with_remainder: bool = True,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> DysonLadder:
    """
    Compute Omega_0 .. Omega_L along ``path`` at total time ``T``.

    Parameters
    ----------
    model, path, T:
        Hamiltonian family, schedule and total time.
    L:
        Depth of the ladder, at most 4.
    knots:
        Odd mesh size for V_ad and the nested integrals.
    mesh_tol:
        Largest accepted fine-versus-coarse quadrature estimate.
    adiabatic:
        Precomputed V_ad samples; their knots replace ``knots``.
    with_remainder:
        Also propagate V on the same mesh and report the truncation remainders.
    tolerances:
        Numerical tolerances.

    Raises
    ------
    MeshTooCoarse
        If the nested integrals have not converged on the mesh.
    ValueError
        If ``L`` is outside [0, 4] or the mesh has an even knot count.
    """
    if not 0 <= L <= MAX_DEPTH:
        raise ValueError(f"Dyson depth must lie in [0, {MAX_DEPTH}], got {L}")
    options = PropagationOptions(record_knots=knots)
    samples = adiabatic
    if samples is None:
        samples = propagate_adiabatic(model, path, T, options=options, tolerances=tolerances)
    s = samples.s
    if s.size % 2 == 0 or s.size < 5:
        raise ValueError("Dyson mesh must have an odd number of knots, at least 5")

    commutators = _commutators(model, path, s, tolerances)
    adjoint = np.conj(np.swapaxes(samples.U, 1, 2))
    kernel = adjoint @ commutators @ samples.U

    iterates = _ladder(kernel, s, L)
    coarse = _ladder(kernel[::2], s[::2], L)
    # Simpson: halving the mesh multiplies the error by 16
    mesh_error = float(np.max(np.abs(iterates[:, ::2] - coarse))) / 15.0 if L else 0.0
    if mesh_error > mesh_tol:
        raise MeshTooCoarse(
            f"Dyson iterates at T={T} change by {mesh_error:.2e} under mesh halving "
            f"(tolerance {mesh_tol:.1e}); increase the knot count above {s.size}"
        )

    norms = np.asarray([_sup_norms(level) for level in iterates])
    epsilon_tilde = np.maximum.accumulate(np.maximum(_cumulative(_sup_norms(commutators), s), 0.0))

    remainders = None
    if with_remainder:
        actual = propagate(model, path, T, options=PropagationOptions(record_knots=s.size), tolerances=tolerances)
        omega = adjoint @ actual.U
        partial = np.cumsum(iterates, axis=0)
        remainders = np.asarray([float(np.max(_sup_norms(omega - partial[level]))) for level in range(L + 1)])

    ladder = DysonLadder(
        s=s,
        T=float(T),
        iterates=iterates,
        norms=norms,
        epsilon_tilde=epsilon_tilde,
        mesh_error=mesh_error,
        remainders=remainders,
    )
    _LOGGER.info("Dyson ladder T=%g depth %d: delta_1=%.3e mesh_error=%.1e", T, L, ladder.delta_1, mesh_error)
    return ladder

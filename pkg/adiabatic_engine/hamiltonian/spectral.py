"""
Exact diagonalization and ground-projector calculus.

Everything downstream of this module consumes ground projectors P0, never raw
eigenvectors: eigenvector gauge and ordering inside a degenerate cluster are
arbitrary, while every geometric quantity is gauge invariant in P0.

Design notes
------------
- The ground cluster is every eigenvalue within ``degeneracy_tol`` of the lowest.
- The reduced resolvent R = Q0 (H - E0)^-1 Q0 is built in the eigenbasis.
- Projector derivatives use dP0 = -(P0 dH R + R dH P0), which avoids numerical
  differentiation of projectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from ..errors import DegenerateGround, GapCollapse, NumericalFailure
from ..tolerances import DEFAULT_TOLERANCES, Tolerances
from .model import (
    ComplexMatrix,
    HamiltonianModel,
    RealVector,
    check_hermitian,
    control_point,
    directional_partial,
)


@dataclass(frozen=True, slots=True)
class SpectralData:
    """
    Eigen-decomposition of H at one control point.

    Attributes
    ----------
    x:
        Control point.
    eigenvalues:
        Ascending eigenvalues.
    eigenvectors:
        Orthonormal columns matching ``eigenvalues``.
    g0:
        Ground degeneracy (size of the cluster around E0).
    degeneracy_tol:
        Absolute tolerance that defined the cluster.
    """

    x: RealVector
    eigenvalues: NDArray[np.float64]
    eigenvectors: ComplexMatrix
    g0: int
    degeneracy_tol: float

    @property
    def dim(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def E0(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def gap(self) -> float:
        """First eigenvalue above the ground cluster minus E0 (inf if none)."""
        if self.g0 >= self.dim:
            return float("inf")
        return float(self.eigenvalues[self.g0] - self.eigenvalues[0])

    @property
    def ground_frame(self) -> ComplexMatrix:
        """N x g0 orthonormal basis of the ground eigenspace (eigensolver gauge)."""
        return self.eigenvectors[:, : self.g0]

    @property
    def P0(self) -> ComplexMatrix:
        frame = self.ground_frame
        return frame @ frame.conj().T

    @property
    def spectral_norm(self) -> float:
        return float(np.max(np.abs(self.eigenvalues)))

    def excitation_energies(self) -> NDArray[np.float64]:
        """E_n - E0 for every eigenvector outside the ground cluster."""
        return self.eigenvalues[self.g0 :] - self.eigenvalues[0]

    def to_eigenbasis(self, operator: ComplexMatrix) -> ComplexMatrix:
        """Return V^dagger A V."""
        return self.eigenvectors.conj().T @ operator @ self.eigenvectors


def diagonalize(
    model: HamiltonianModel,
    x: ArrayLike,
    degeneracy_tol: float | None = None,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> SpectralData:
    """
    Diagonalize H(x) and identify the ground cluster.

    Parameters
    ----------
    model:
        Hamiltonian family.
    x:
        Control point.
    degeneracy_tol:
        Absolute clustering tolerance. Defaults to
        ``tolerances.degeneracy_rel * max(1, ||H||)``.
    tolerances:
        Numerical tolerances.

    Returns
    -------
    SpectralData
        Eigen-decomposition with ground-cluster bookkeeping.

    Raises
    ------
    InvalidModel
        If H(x) is non-finite or not Hermitian.
    NumericalFailure
        If the eigensolver fails or its residual exceeds ``1e-9 * ||H||``.
    """
    point = control_point(x, model.param_dim)
    hamiltonian = check_hermitian(
        model.evaluate(point), tolerance=tolerances.hermiticity, context=model.name
    )
    hermitian = 0.5 * (hamiltonian + hamiltonian.conj().T)
    try:
        eigenvalues, eigenvectors = scipy.linalg.eigh(hermitian)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NumericalFailure(f"{model.name}: eigensolver failed at x={point.tolist()}") from exc

    norm = float(np.max(np.abs(eigenvalues))) if eigenvalues.size else 0.0
    residual = float(np.max(np.linalg.norm(hermitian @ eigenvectors - eigenvectors * eigenvalues, axis=0)))
    if residual > 1e-9 * max(norm, np.finfo(float).tiny):
        raise NumericalFailure(
            f"{model.name}: eigen-residual {residual:.3e} exceeds 1e-9*||H|| at x={point.tolist()}"
        )

    tol = tolerances.degeneracy_tol(norm) if degeneracy_tol is None else float(degeneracy_tol)
    if not tol > 0.0:
        raise ValueError("degeneracy_tol must be positive")
    g0 = int(np.count_nonzero(eigenvalues - eigenvalues[0] <= tol))
    return SpectralData(
        x=point,
        eigenvalues=np.asarray(eigenvalues, dtype=np.float64),
        eigenvectors=np.asarray(eigenvectors, dtype=np.complex128),
        g0=g0,
        degeneracy_tol=tol,
    )


def require_gap(spectral: SpectralData, *, tolerances: Tolerances = DEFAULT_TOLERANCES) -> float:
    """
    Return the gap, or raise if it is at or below the gap floor.

    Raises
    ------
    GapCollapse
        If ``gap <= tolerances.gap_floor``.
    """
    gap = spectral.gap
    if gap <= tolerances.gap_floor:
        raise GapCollapse(f"gap {gap:.3e} <= floor {tolerances.gap_floor:.1e} at x={spectral.x.tolist()}")
    return gap


def require_nondegenerate(spectral: SpectralData) -> None:
    """Raise ``DegenerateGround`` unless g0 == 1."""
    if spectral.g0 != 1:
        raise DegenerateGround(f"ground state is {spectral.g0}-fold degenerate at x={spectral.x.tolist()}")


def reduced_resolvent(
    spectral: SpectralData, *, tolerances: Tolerances = DEFAULT_TOLERANCES
) -> ComplexMatrix:
    """
    Return R = Q0 (H - E0)^-1 Q0.

    R vanishes on the ground cluster and equals 1/(E_n - E0) on excited
    eigenvectors, so R P0 = P0 R = 0 and ||R|| = 1/gap.

    Raises
    ------
    GapCollapse
        If the gap is at or below the gap floor.
    """
    require_gap(spectral, tolerances=tolerances)
    excited = spectral.eigenvectors[:, spectral.g0 :]
    weights = 1.0 / spectral.excitation_energies()
    return (excited * weights) @ excited.conj().T


def _projector_derivative_from(
    spectral: SpectralData, derivative: ComplexMatrix, resolvent: ComplexMatrix
) -> ComplexMatrix:
    projector = spectral.P0
    left = projector @ derivative @ resolvent
    return -(left + left.conj().T)


def projector_derivative(
    model: HamiltonianModel,
    x: ArrayLike,
    i: int,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """
    Return dP0/dx_i = -(P0 dH R + R dH P0).

    Parameters
    ----------
    model, x, i:
        Model, control point and parameter index.
    spectral:
        Precomputed decomposition at ``x`` (recomputed when omitted).
    tolerances:
        Numerical tolerances.

    Raises
    ------
    GapCollapse
        If the gap is at or below the gap floor.
    """
    point = control_point(x, model.param_dim)
    spec = spectral if spectral is not None else diagonalize(model, point, tolerances=tolerances)
    resolvent = reduced_resolvent(spec, tolerances=tolerances)
    return _projector_derivative_from(spec, model.partial(point, i), resolvent)


def projector_velocity(
    model: HamiltonianModel,
    x: ArrayLike,
    velocity: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """Return dP0/ds = sum_i (dP0/dx_i) v^i along a path with velocity v."""
    point = control_point(x, model.param_dim)
    spec = spectral if spectral is not None else diagonalize(model, point, tolerances=tolerances)
    resolvent = reduced_resolvent(spec, tolerances=tolerances)
    return _projector_derivative_from(spec, directional_partial(model, point, velocity), resolvent)


def energy_derivative(
    model: HamiltonianModel,
    x: ArrayLike,
    i: int,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """Return dE0/dx_i = Tr[(dH/dx_i) P0] / g0."""
    point = control_point(x, model.param_dim)
    spec = spectral if spectral is not None else diagonalize(model, point, tolerances=tolerances)
    return float(np.real(np.trace(model.partial(point, i) @ spec.P0))) / spec.g0


def operator_norm(matrix: ComplexMatrix) -> float:
    """Largest singular value."""
    if matrix.size == 0:
        return 0.0
    return float(scipy.linalg.svdvals(matrix)[0])


def commutator_norm_identity_check(
    model: HamiltonianModel,
    x: ArrayLike,
    velocity: ArrayLike,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> tuple[float, float]:
    """
    Evaluate both sides of ||[dP0, P0]|| = sqrt(||P0 dH R^2 dH P0||).

    Returns
    -------
    tuple[float, float]
        ``(lhs, rhs)`` computed independently in the operator norm.
    """
    point = control_point(x, model.param_dim)
    spec = diagonalize(model, point, tolerances=tolerances)
    resolvent = reduced_resolvent(spec, tolerances=tolerances)
    derivative = directional_partial(model, point, velocity)
    projector = spec.P0

    p_dot = _projector_derivative_from(spec, derivative, resolvent)
    lhs = operator_norm(p_dot @ projector - projector @ p_dot)

    sandwich = projector @ derivative @ resolvent @ resolvent @ derivative @ projector
    rhs = float(np.sqrt(operator_norm(sandwich)))
    return lhs, rhs

"""
Two-projector (Grover-type) Hamiltonian H(x) = x1 (I - |a><a|) + x2 (I - |b><b|).

The model is realized in the basis {|a>, |a_perp_1>, ...} where |a> = e0 and
|b> = alpha0 e0 + alpha1 e1 with alpha0 = |<a|b>| and
alpha1 = e^(i phi) sqrt(1 - alpha0^2). H is then an effective 2 x 2 block plus
(x1 + x2) times the identity on the remaining N - 2 states, which keeps every
quantity exact for any N.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..hamiltonian.model import ComplexMatrix, RealVector, control_point


@dataclass(frozen=True, slots=True)
class ProjectiveSpec:
    """
    Parameters of the two-projector model.

    Attributes
    ----------
    dim:
        Hilbert-space dimension N (>= 2).
    overlap:
        |<a|b>| in (0, 1).
    phase:
        Phase phi of alpha1.
    """

    dim: int
    overlap: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if self.dim < 2:
            raise ValueError("projective model needs dim >= 2")
        if not 0.0 < self.overlap < 1.0:
            raise ValueError("overlap must lie in (0, 1)")

    @property
    def alpha0(self) -> float:
        return self.overlap

    @property
    def alpha1(self) -> complex:
        return complex(np.exp(1j * self.phase) * np.sqrt(1.0 - self.overlap**2))

    def to_dict(self) -> dict[str, Any]:
        return {"dim": self.dim, "overlap": self.overlap, "phase": self.phase}


def _block(spec: ProjectiveSpec, x: RealVector) -> ComplexMatrix:
    x1, x2 = float(x[0]), float(x[1])
    a0, a1 = spec.alpha0, spec.alpha1
    return np.array(
        [
            [x2 * (1.0 - a0**2), -x2 * a0 * np.conj(a1)],
            [-x2 * a0 * a1, x1 + x2 * a0**2],
        ],
        dtype=np.complex128,
    )


@dataclass(frozen=True, slots=True)
class ProjectiveModel:
    """Full N-dimensional realization with analytic partials."""

    spec: ProjectiveSpec

    @property
    def name(self) -> str:
        return "projective"

    @property
    def dim(self) -> int:
        return self.spec.dim

    @property
    def param_dim(self) -> int:
        return 2

    @property
    def metadata(self) -> Mapping[str, Any]:
        return self.spec.to_dict()

    def state_a(self) -> NDArray[np.complex128]:
        vector = np.zeros(self.dim, dtype=np.complex128)
        vector[0] = 1.0
        return vector

    def state_b(self) -> NDArray[np.complex128]:
        vector = np.zeros(self.dim, dtype=np.complex128)
        vector[0] = self.spec.alpha0
        vector[1] = self.spec.alpha1
        return vector

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        point = control_point(x, 2)
        matrix = (point[0] + point[1]) * np.eye(self.dim, dtype=np.complex128)
        matrix[:2, :2] = _block(self.spec, point)
        return matrix

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        control_point(x, 2)
        if index not in (0, 1):
            raise IndexError("projective model has two parameters")
        state = self.state_a() if index == 0 else self.state_b()
        return np.eye(self.dim, dtype=np.complex128) - np.outer(state, state.conj())


def projective_gap(spec: ProjectiveSpec, x: ArrayLike) -> float:
    """Delta = sqrt(x1^2 + x2^2 + 2 (2 |<a|b>|^2 - 1) x1 x2)."""
    x1, x2 = control_point(x, 2)
    radicand = x1**2 + x2**2 + 2.0 * (2.0 * spec.overlap**2 - 1.0) * x1 * x2
    return float(np.sqrt(max(radicand, 0.0)))


def projective_spectrum(spec: ProjectiveSpec, x: ArrayLike) -> tuple[float, float, float]:
    """Return (E_minus, E_plus, E_upper) with E_upper = x1 + x2 of multiplicity N - 2."""
    point = control_point(x, 2)
    total = float(point[0] + point[1])
    gap = projective_gap(spec, point)
    return 0.5 * (total - gap), 0.5 * (total + gap), total


def projective_ground_projector(spec: ProjectiveSpec, x: ArrayLike) -> ComplexMatrix:
    """
    Ground projector from the analytic 2 x 2 eigenvector, embedded in dim N.

    Valid where the lower block eigenvalue is the global ground state
    (x1, x2 >= 0, not both zero).
    """
    point = control_point(x, 2)
    block = _block(spec, point)
    a, d, b = block[0, 0].real, block[1, 1].real, block[0, 1]
    lower = 0.5 * (a + d) - np.sqrt(0.25 * (a - d) ** 2 + abs(b) ** 2)
    vector = np.zeros(spec.dim, dtype=np.complex128)
    if abs(b) > 0.0:
        vector[0], vector[1] = b, lower - a
    elif a <= d:
        vector[0] = 1.0
    else:
        vector[1] = 1.0
    vector /= np.linalg.norm(vector)
    return np.outer(vector, vector.conj())


def projective_metric_1d(spec: ProjectiveSpec, x: float) -> float:
    """
    Metric on the line (1 - x, x): g = c (1 - c) / Delta^4 with c = |<a|b>|^2.

    Equal to (d theta / dx)^2 for the mixing angle of the 2 x 2 block.
    """
    c = spec.overlap**2
    gap = projective_gap(spec, (1.0 - x, x))
    return c * (1.0 - c) / gap**4


def projective_mixing_angle(spec: ProjectiveSpec, x: float) -> float:
    """Half rotation angle of the ground vector on the line (1 - x, x)."""
    c = spec.overlap**2
    return 0.5 * float(np.arctan2(2.0 * x * np.sqrt(c * (1.0 - c)), 1.0 - 2.0 * x * (1.0 - c)))


def projective_geodesic(spec: ProjectiveSpec, s: ArrayLike) -> NDArray[np.float64]:
    """
    Closed-form geodesic on the line (1 - x, x) from x=0 to x=1.

    x(s) = 1/2 - (c / (2 sqrt(1 - c^2))) tan[(1 - 2s) arccos c] with c = |<a|b>|.
    """
    c = spec.overlap
    s_values = np.asarray(s, dtype=np.float64)
    return 0.5 - (c / (2.0 * np.sqrt(1.0 - c**2))) * np.tan((1.0 - 2.0 * s_values) * np.arccos(c))

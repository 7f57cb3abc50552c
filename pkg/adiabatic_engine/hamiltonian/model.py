"""
Parametrized Hamiltonian families.

A model maps a control point x (M real parameters) to a dense N x N Hermitian
matrix H(x) and supplies partial derivatives dH/dx_i. Built-in models provide
analytic partials; anything else falls back to central finite differences.

Notes
-----
Models are immutable and evaluation is pure, so a single instance can be shared
by concurrent workers sweeping disjoint control points.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Protocol, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import InvalidModel
from ..tolerances import DEFAULT_TOLERANCES, Tolerances

ComplexMatrix = NDArray[np.complex128]
RealVector = NDArray[np.float64]


class HamiltonianModel(Protocol):
    """A parametrized family x -> H(x) of Hermitian matrices."""

    @property
    def name(self) -> str:
        """Registry or user-facing name of the family."""
        ...

    @property
    def dim(self) -> int:
        """Hilbert-space dimension N."""
        ...

    @property
    def param_dim(self) -> int:
        """Number of control parameters M."""
        ...

    @property
    def metadata(self) -> Mapping[str, Any]:
        """Structural parameters (qubit count, overlap, chain length, ...)."""
        ...

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        """Return H(x)."""
        ...

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        """Return dH/dx_index at x."""
        ...


def control_point(x: ArrayLike, param_dim: int | None = None) -> RealVector:
    """
    Validate and normalize a control point.

    Parameters
    ----------
    x:
        Scalar or sequence of real control parameters.
    param_dim:
        Expected number of parameters, if known.

    Returns
    -------
    numpy.ndarray
        1-D float64 array with at least one entry.

    Raises
    ------
    ValueError
        If the point is empty, non-finite, or has the wrong length.
    """
    point = np.atleast_1d(np.asarray(x, dtype=np.float64))
    if point.ndim != 1 or point.size == 0:
        raise ValueError(f"control point must be a non-empty vector, got shape {point.shape}")
    if not np.all(np.isfinite(point)):
        raise ValueError(f"control point has non-finite entries: {point!r}")
    if param_dim is not None and point.size != param_dim:
        raise ValueError(f"control point has {point.size} entries, model expects {param_dim}")
    return point


def check_hermitian(matrix: ComplexMatrix, *, tolerance: float, context: str) -> ComplexMatrix:
    """
    Reject non-finite or non-Hermitian matrices.

    Raises
    ------
    InvalidModel
        If any entry is non-finite or ``max |A - A^dagger|`` exceeds ``tolerance``.
    """
    if not np.all(np.isfinite(matrix)):
        raise InvalidModel(f"{context}: matrix has non-finite entries")
    defect = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if defect > tolerance:
        raise InvalidModel(f"{context}: not Hermitian (max |A - A^H| = {defect:.3e})")
    return matrix


def central_difference_partial(
    hamiltonian: Callable[[RealVector], ComplexMatrix],
    x: RealVector,
    index: int,
    *,
    step: float,
) -> ComplexMatrix:
    """Return (H(x + h e_i) - H(x - h e_i)) / 2h."""
    shift = np.zeros_like(x)
    shift[index] = step
    forward = np.asarray(hamiltonian(x + shift), dtype=np.complex128)
    backward = np.asarray(hamiltonian(x - shift), dtype=np.complex128)
    return (forward - backward) / (2.0 * step)


def directional_partial(model: HamiltonianModel, x: RealVector, velocity: ArrayLike) -> ComplexMatrix:
    """Return the directional derivative sum_i v^i dH/dx_i."""
    v = control_point(velocity, model.param_dim)
    result = np.zeros((model.dim, model.dim), dtype=np.complex128)
    for index, component in enumerate(v):
        if component != 0.0:
            result += component * model.partial(x, index)
    return result


@dataclass(frozen=True, slots=True)
class CallableModel:
    """
    Model backed by plain callables.

    Attributes
    ----------
    name:
        Display name.
    dim, param_dim:
        Hilbert-space and control-manifold dimensions.
    hamiltonian:
        ``x -> H(x)``.
    derivative:
        Optional ``(x, i) -> dH/dx_i``; finite differences are used when absent.
    metadata:
        Free-form structural parameters.
    tolerances:
        Supplies the finite-difference step.
    """

    name: str
    dim: int
    param_dim: int
    hamiltonian: Callable[[RealVector], ArrayLike]
    derivative: Callable[[RealVector, int], ArrayLike] | None = None
    metadata: Mapping[str, Any] = field(default_factory=dict)
    tolerances: Tolerances = DEFAULT_TOLERANCES

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        point = control_point(x, self.param_dim)
        matrix = np.asarray(self.hamiltonian(point), dtype=np.complex128)
        if matrix.shape != (self.dim, self.dim):
            raise InvalidModel(f"{self.name}: H(x) has shape {matrix.shape}, expected {self.dim}")
        return matrix

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        point = control_point(x, self.param_dim)
        if not 0 <= index < self.param_dim:
            raise IndexError(f"parameter index {index} out of range for M={self.param_dim}")
        if self.derivative is not None:
            return np.asarray(self.derivative(point, index), dtype=np.complex128)
        return central_difference_partial(
            self.evaluate, point, index, step=self.tolerances.fd_step(float(point[index]))
        )


@dataclass(frozen=True, slots=True)
class AffineCoefficient:
    """Coefficient c(x) = constant + sum_i weights[i] * x_i."""

    constant: float
    weights: tuple[float, ...]

    def value(self, x: RealVector) -> float:
        return self.constant + float(np.dot(self.weights, x))

    def to_dict(self) -> dict[str, Any]:
        return {"constant": self.constant, "weights": list(self.weights)}


@dataclass(frozen=True, slots=True)
class AffineTerm:
    """One term c(x) * A of an affine Hamiltonian."""

    coefficient: AffineCoefficient
    matrix: ComplexMatrix


@dataclass(frozen=True, slots=True)
class AffineModel:
    """
    Model of the form H(x) = sum_k c_k(x) A_k with affine coefficients.

    Partials are exact: dH/dx_i = sum_k w_{k,i} A_k.
    """

    name: str
    dim: int
    param_dim: int
    terms: tuple[AffineTerm, ...]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        for position, term in enumerate(self.terms):
            if term.matrix.shape != (self.dim, self.dim):
                raise ValueError(f"term {position} has shape {term.matrix.shape}")
            if len(term.coefficient.weights) != self.param_dim:
                raise ValueError(f"term {position} coefficient has wrong parameter count")

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        point = control_point(x, self.param_dim)
        result = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for term in self.terms:
            result += term.coefficient.value(point) * term.matrix
        return result

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        control_point(x, self.param_dim)
        result = np.zeros((self.dim, self.dim), dtype=np.complex128)
        for term in self.terms:
            weight = term.coefficient.weights[index]
            if weight != 0.0:
                result += weight * term.matrix
        return result


@dataclass(frozen=True, slots=True)
class AffineRestriction:
    """
    Reduced parametrization x = origin + basis @ t of a base model.

    Used for one-parameter lines such as the Grover interpolation (1 - t, t)
    or the Ising cases, and to remove a trace direction that would make the
    metric singular.
    """

    base: HamiltonianModel
    origin: RealVector
    basis: NDArray[np.float64]
    label: str = "restricted"

    def __post_init__(self) -> None:
        basis = np.asarray(self.basis, dtype=np.float64)
        if basis.ndim == 1:
            basis = basis[:, None]
        origin = control_point(self.origin, self.base.param_dim)
        if basis.shape[0] != self.base.param_dim:
            raise ValueError(f"basis has {basis.shape[0]} rows, base model has M={self.base.param_dim}")
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "origin", origin)

    @property
    def name(self) -> str:
        return f"{self.base.name}[{self.label}]"

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def param_dim(self) -> int:
        return int(self.basis.shape[1])

    @property
    def metadata(self) -> Mapping[str, Any]:
        return {
            **dict(self.base.metadata),
            "restriction": self.label,
            "origin": self.origin.tolist(),
            "basis": self.basis.tolist(),
        }

    def lift(self, t: ArrayLike) -> RealVector:
        """Map reduced coordinates to base control coordinates."""
        return self.origin + self.basis @ control_point(t, self.param_dim)

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        return self.base.evaluate(self.lift(x))

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        return directional_partial(self.base, self.lift(x), self.basis[:, index])


def restrict_affine(
    base: HamiltonianModel,
    origin: Sequence[float],
    basis: ArrayLike,
    *,
    label: str = "affine",
) -> AffineRestriction:
    """
    Restrict ``base`` to x(t) = origin + basis @ t.

    ``basis`` is M x K (a 1-D array is a single direction); partials of the
    restricted model follow by the chain rule.
    """
    return AffineRestriction(
        base=base,
        origin=control_point(origin, base.param_dim),
        basis=np.asarray(basis, dtype=np.float64),
        label=label,
    )


def restrict_line(
    base: HamiltonianModel,
    start: Sequence[float],
    end: Sequence[float],
    *,
    label: str = "line",
) -> AffineRestriction:
    """Restrict ``base`` to the segment x(t) = start + t (end - start)."""
    origin = control_point(start, base.param_dim)
    direction = control_point(end, base.param_dim) - origin
    return restrict_affine(base, origin, direction, label=label)


@dataclass(frozen=True, slots=True)
class TraceShifted:
    """H(x) + c(x) * Identity for a scalar shift c; projectors are unchanged."""

    base: HamiltonianModel
    shift: Callable[[RealVector], float]
    shift_gradient: Callable[[RealVector], ArrayLike]

    @property
    def name(self) -> str:
        return f"{self.base.name}+shift"

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def param_dim(self) -> int:
        return self.base.param_dim

    @property
    def metadata(self) -> Mapping[str, Any]:
        return self.base.metadata

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        point = control_point(x, self.param_dim)
        return self.base.evaluate(point) + self.shift(point) * np.eye(self.dim)

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        point = control_point(x, self.param_dim)
        gradient = np.atleast_1d(np.asarray(self.shift_gradient(point), dtype=np.float64))
        return self.base.partial(point, index) + gradient[index] * np.eye(self.dim)


def shift_trace(
    base: HamiltonianModel,
    shift: Callable[[RealVector], float],
    shift_gradient: Callable[[RealVector], ArrayLike],
) -> TraceShifted:
    """Return ``base`` shifted by ``shift(x) * I``."""
    return TraceShifted(base=base, shift=shift, shift_gradient=shift_gradient)

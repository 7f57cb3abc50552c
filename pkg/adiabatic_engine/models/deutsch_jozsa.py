"""
Unitary-interpolation Hamiltonian for the Deutsch-Jozsa problem.

H(x) = V(x) H0 V(x)^dagger with V(x) = exp(i (pi/2) x G), G|i> = (-1)^f(i) |i>
and H0 = h0 sum_k |->_k<-|, whose ground state is |+>^n. The ground projector
rotates rigidly with V, so dP0/dx = i (pi/2) [G, P0] and the metric is constant.

Notes
-----
The metric here follows the engine-wide normalization Tr[dP0 dP0] / (2 g0):
g = (pi^2/4) [1 - 2^(-2n) (sum_i (-1)^f(i))^2]. The unnormalized trace
Tr[(dP0/dx)^2], twice that value, is available as :func:`dj_projector_trace`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import reduce
from typing import Any, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import ConfigError
from ..hamiltonian.model import ComplexMatrix, RealVector, control_point


@dataclass(frozen=True, slots=True)
class DeutschJozsaSpec:
    """
    Oracle and energy scale of the Deutsch-Jozsa model.

    Attributes
    ----------
    n:
        Number of qubits.
    oracle:
        Truth table f(i) for i in 0..2^n - 1 (values 0/1).
    h0:
        Energy scale of H0 (> 0).
    """

    n: int
    oracle: tuple[int, ...]
    h0: float = 1.0

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("Deutsch-Jozsa model needs n >= 1")
        if len(self.oracle) != 2**self.n:
            raise ValueError(f"oracle table must have 2^n = {2**self.n} entries")
        if any(value not in (0, 1) for value in self.oracle):
            raise ValueError("oracle values must be 0 or 1")
        ones = sum(self.oracle)
        if ones not in (0, 2**self.n, 2 ** (self.n - 1)):
            raise ValueError("oracle must be constant or balanced")
        if not self.h0 > 0.0:
            raise ValueError("h0 must be positive")

    @property
    def kind(self) -> str:
        return "balanced" if 0 < sum(self.oracle) < 2**self.n else "constant"

    @property
    def signs(self) -> NDArray[np.float64]:
        """Diagonal of G: (-1)^f(i)."""
        return 1.0 - 2.0 * np.asarray(self.oracle, dtype=np.float64)

    def to_dict(self) -> dict[str, Any]:
        return {"n": self.n, "oracle": list(self.oracle), "h0": self.h0, "kind": self.kind}


def oracle_from_selector(n: int, selector: str) -> tuple[int, ...]:
    """
    Build an oracle table from a CLI selector.

    Selectors: ``constant:0``, ``constant:1``, ``balanced:<seed>`` (a seeded
    random balanced table) or ``balanced`` (first half 0, second half 1).

    Raises
    ------
    ConfigError
        If the selector is not recognized.
    """
    size = 2**n
    kind, _, argument = selector.partition(":")
    if kind == "constant":
        value = int(argument or "0")
        if value not in (0, 1):
            raise ConfigError(f"constant oracle value must be 0 or 1, got {argument!r}")
        return (value,) * size
    if kind == "balanced":
        table = np.zeros(size, dtype=np.int64)
        table[size // 2 :] = 1
        if argument:
            try:
                seed = int(argument)
            except ValueError as exc:
                raise ConfigError(f"balanced oracle seed must be an integer, got {argument!r}") from exc
            table = np.random.default_rng(seed).permutation(table)
        return tuple(int(value) for value in table)
    raise ConfigError(f"unknown oracle selector {selector!r}")


def _minus_projector_sum(n: int) -> ComplexMatrix:
    identity = np.eye(2, dtype=np.complex128)
    minus = 0.5 * np.array([[1.0, -1.0], [-1.0, 1.0]], dtype=np.complex128)
    total = np.zeros((2**n, 2**n), dtype=np.complex128)
    for site in range(n):
        factors = [minus if k == site else identity for k in range(n)]
        total += reduce(np.kron, factors)
    return total


@dataclass(frozen=True, slots=True)
class DeutschJozsaModel:
    """Full 2^n-dimensional matrix realization (one control parameter)."""

    spec: DeutschJozsaSpec
    _h0_matrix: ComplexMatrix = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "_h0_matrix", self.spec.h0 * _minus_projector_sum(self.spec.n))

    @property
    def name(self) -> str:
        return "deutsch_jozsa"

    @property
    def dim(self) -> int:
        return 2**self.spec.n

    @property
    def param_dim(self) -> int:
        return 1

    @property
    def metadata(self) -> Mapping[str, Any]:
        return self.spec.to_dict()

    def _phases(self, x: RealVector) -> NDArray[np.complex128]:
        return np.exp(0.5j * np.pi * x[0] * self.spec.signs)

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        point = control_point(x, 1)
        phases = self._phases(point)
        return phases[:, None] * self._h0_matrix * phases.conj()[None, :]

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        if index != 0:
            raise IndexError("Deutsch-Jozsa model has a single parameter")
        hamiltonian = self.evaluate(x)
        signs = self.spec.signs
        # i (pi/2) [G, H] with G diagonal
        return 0.5j * np.pi * (signs[:, None] - signs[None, :]) * hamiltonian


def _mean_sign(spec: DeutschJozsaSpec) -> float:
    return float(np.mean(spec.signs))


def dj_metric(spec: DeutschJozsaSpec, x: ArrayLike | None = None) -> float:
    """
    Closed-form metric g = (pi^2/4) [1 - 2^(-2n) (sum_i e^(i pi f(i)))^2].

    Constant in x; the argument is accepted for interface symmetry.
    """
    if x is not None:
        control_point(x, 1)
    return 0.25 * np.pi**2 * (1.0 - _mean_sign(spec) ** 2)


def dj_projector_trace(spec: DeutschJozsaSpec) -> float:
    """Tr[(dP0/dx)^2] = (pi^2/2) [1 - 2^(-2n) (sum_i e^(i pi f(i)))^2]."""
    return 0.5 * np.pi**2 * (1.0 - _mean_sign(spec) ** 2)


def dj_geodesic(s: ArrayLike) -> NDArray[np.float64]:
    """Geodesic of the flat metric between x=0 and x=1: x(s) = s."""
    return np.asarray(s, dtype=np.float64).copy()

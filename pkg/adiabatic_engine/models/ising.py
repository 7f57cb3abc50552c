"""
Transverse-field Ising ring with 2m + 1 sites.

H(x) = -x1 sum_l sigma_z^l + x2 sum_l sigma_x^l sigma_x^(l+1), periodic.

Two realizations share one spec:

- full matrix (m <= 5, dimension 2^(2m+1)) for the generic pipeline;
- analytic, through the Bogoliubov angles theta_l of the even-parity state
  prod_l (cos theta_l + i sin theta_l c_l^dagger c_-l^dagger)|0> with momenta
  z_l = 2 pi l / (2m + 1), l = 1..m.

Design notes
------------
- With this sign of the coupling the odd ring's even-parity fermion sector uses
  exactly the momenta z_l above, and that state is the ground state for
  x1 > x2 > 0. Full-matrix cross-checks use points in that region.
- 2 theta_l = atan2(x2 sin z_l, x1 - x2 cos z_l): the cos 2 theta sign fixes the
  branch, continuous with theta = 0 at the polarized point x = (1, 0).
- The case restrictions are (i) x = (1 - x, x), (ii) x = (x, 1), (iii) x = (1, x).
  Their 1-D metrics are p(x) for (i) and q(x) for (ii)/(iii).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from functools import lru_cache, reduce
from typing import Any, Mapping

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..errors import DegenerateMode
from ..hamiltonian.model import ComplexMatrix, RealVector, control_point

FULL_MATRIX_MAX_M = 5
_MODE_FLOOR = 1e-14


class IsingMode(str, Enum):
    """Realization of the Ising family."""

    FULL = "full"
    ANALYTIC = "analytic"


class IsingCase(str, Enum):
    """One-parameter restriction of the two-parameter Ising family."""

    I = "i"  # noqa: E741
    II = "ii"
    III = "iii"

    def origin_and_direction(self) -> tuple[tuple[float, float], tuple[float, float]]:
        """Return (x at t=0, dx/dt) so that x(t) = origin + t direction."""
        if self is IsingCase.I:
            return (1.0, 0.0), (-1.0, 1.0)
        if self is IsingCase.II:
            return (0.0, 1.0), (1.0, 0.0)
        return (1.0, 0.0), (0.0, 1.0)

    def lift(self, t: float) -> NDArray[np.float64]:
        origin, direction = self.origin_and_direction()
        return np.asarray(origin, dtype=np.float64) + t * np.asarray(direction, dtype=np.float64)


@dataclass(frozen=True, slots=True)
class IsingSpec:
    """
    Ising ring parameters.

    Attributes
    ----------
    m:
        Half-chain index; the ring has 2m + 1 sites.
    mode:
        Full-matrix (m <= 5) or analytic realization.
    case:
        Optional one-parameter restriction.
    """

    m: int
    mode: IsingMode = IsingMode.ANALYTIC
    case: IsingCase | None = None

    def __post_init__(self) -> None:
        if self.m < 1:
            raise ValueError("Ising ring needs m >= 1")
        if self.mode is IsingMode.FULL and self.m > FULL_MATRIX_MAX_M:
            raise ValueError(f"full-matrix Ising mode is limited to m <= {FULL_MATRIX_MAX_M}")

    @property
    def sites(self) -> int:
        return 2 * self.m + 1

    @property
    def momenta(self) -> NDArray[np.float64]:
        ell = np.arange(1, self.m + 1, dtype=np.float64)
        return 2.0 * np.pi * ell / self.sites

    def to_dict(self) -> dict[str, Any]:
        return {
            "m": self.m,
            "sites": self.sites,
            "mode": self.mode.value,
            "case": None if self.case is None else self.case.value,
        }


@lru_cache(maxsize=8)
def _site_sums(sites: int) -> tuple[ComplexMatrix, ComplexMatrix]:
    identity = np.eye(2, dtype=np.complex128)
    sigma_z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)
    sigma_x = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
    dim = 2**sites
    field_sum = np.zeros((dim, dim), dtype=np.complex128)
    bond_sum = np.zeros((dim, dim), dtype=np.complex128)
    for site in range(sites):
        z_factors = [sigma_z if k == site else identity for k in range(sites)]
        field_sum += reduce(np.kron, z_factors)
        partner = (site + 1) % sites
        x_factors = [sigma_x if k in (site, partner) else identity for k in range(sites)]
        bond_sum += reduce(np.kron, x_factors)
    field_sum.setflags(write=False)
    bond_sum.setflags(write=False)
    return field_sum, bond_sum


@dataclass(frozen=True, slots=True)
class IsingChainModel:
    """Full-matrix realization with analytic partials (-sum sigma_z, sum sigma_x sigma_x)."""

    spec: IsingSpec

    def __post_init__(self) -> None:
        if self.spec.m > FULL_MATRIX_MAX_M:
            raise ValueError(f"full-matrix Ising mode is limited to m <= {FULL_MATRIX_MAX_M}")

    @property
    def name(self) -> str:
        return "ising"

    @property
    def dim(self) -> int:
        return 2**self.spec.sites

    @property
    def param_dim(self) -> int:
        return 2

    @property
    def metadata(self) -> Mapping[str, Any]:
        return self.spec.to_dict()

    def evaluate(self, x: RealVector) -> ComplexMatrix:
        x1, x2 = control_point(x, 2)
        field_sum, bond_sum = _site_sums(self.spec.sites)
        return -x1 * field_sum + x2 * bond_sum

    def partial(self, x: RealVector, index: int) -> ComplexMatrix:
        control_point(x, 2)
        field_sum, bond_sum = _site_sums(self.spec.sites)
        if index == 0:
            return -np.array(field_sum)
        if index == 1:
            return np.array(bond_sum)
        raise IndexError("Ising model has two parameters")


def _mode_terms(
    spec: IsingSpec, x: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
    """Return (x1 - x2 cos z, x2 sin z, D^2) per mode, rejecting D < 1e-14."""
    x1, x2 = control_point(x, 2)
    z = spec.momenta
    along = x1 - x2 * np.cos(z)
    across = x2 * np.sin(z)
    squared = along**2 + across**2
    if np.any(np.sqrt(squared) < _MODE_FLOOR):
        worst = int(np.argmin(squared)) + 1
        raise DegenerateMode(f"Ising mode l={worst} has vanishing denominator at x={[x1, x2]}")
    return along, across, squared


def ising_theta(spec: IsingSpec, ell: int, x: ArrayLike) -> float:
    """
    Bogoliubov angle theta_l in [0, pi/2] (for x2 >= 0).

    Raises
    ------
    DegenerateMode
        If sqrt((x1 - x2 cos z_l)^2 + (x2 sin z_l)^2) < 1e-14.
    """
    if not 1 <= ell <= spec.m:
        raise ValueError(f"mode index must be in 1..{spec.m}, got {ell}")
    return float(ising_thetas(spec, x)[ell - 1])


def ising_thetas(spec: IsingSpec, x: ArrayLike) -> NDArray[np.float64]:
    """All angles theta_1..theta_m."""
    along, across, _ = _mode_terms(spec, x)
    return 0.5 * np.arctan2(across, along)


def ising_theta_gradient(spec: IsingSpec, x: ArrayLike) -> NDArray[np.float64]:
    """
    Analytic gradient d theta_l / d x_i as an (m, 2) array.

    d theta / d x1 = -x2 sin z / (2 D^2), d theta / d x2 = x1 sin z / (2 D^2).
    """
    x1, x2 = control_point(x, 2)
    _, _, squared = _mode_terms(spec, (x1, x2))
    sine = np.sin(spec.momenta)
    return np.column_stack((-x2 * sine / (2.0 * squared), x1 * sine / (2.0 * squared)))


def ising_metric(spec: IsingSpec, x: ArrayLike) -> NDArray[np.float64]:
    """g_ij = sum_l d_i theta_l d_j theta_l (2 x 2, symmetric PSD by construction)."""
    gradient = ising_theta_gradient(spec, x)
    return gradient.T @ gradient


def ising_ground_energy(spec: IsingSpec, x: ArrayLike) -> float:
    """
    Energy of the even-parity Bogoliubov state.

    E = -x1 (2m + 1) + sum_l [2 (x1 - x2 cos z_l) - 2 D_l]. This is the ground
    energy for x1 > x2 > 0.
    """
    x1, _ = control_point(x, 2)
    along, _, squared = _mode_terms(spec, x)
    return float(-x1 * spec.sites + np.sum(2.0 * along - 2.0 * np.sqrt(squared)))


def ising_p(spec: IsingSpec, x: float) -> float:
    """
    Case (i) metric p(x) = (1/4) sum_l sin^2 z_l / [1 - 2 (1 + cos z_l)(1 - x) x]^2.

    Raises
    ------
    DegenerateMode
        If a denominator vanishes.
    """
    z = spec.momenta
    denominator = 1.0 - 2.0 * (1.0 + np.cos(z)) * (1.0 - x) * x
    if np.any(np.abs(denominator) < _MODE_FLOOR):
        raise DegenerateMode(f"p(x) denominator vanishes at x={x}")
    return float(0.25 * np.sum(np.sin(z) ** 2 / denominator**2))


def ising_q(spec: IsingSpec, x: float) -> float:
    """
    Case (ii)/(iii) metric q(x) = (1/4) sum_l sin^2 z_l / [1 - 2 x cos z_l + x^2]^2.

    Raises
    ------
    DegenerateMode
        If a denominator vanishes.
    """
    z = spec.momenta
    denominator = 1.0 - 2.0 * x * np.cos(z) + x**2
    if np.any(np.abs(denominator) < _MODE_FLOOR):
        raise DegenerateMode(f"q(x) denominator vanishes at x={x}")
    return float(0.25 * np.sum(np.sin(z) ** 2 / denominator**2))


def ising_case_metric(spec: IsingSpec, case: IsingCase, x: float) -> float:
    """1-D metric of a case restriction: p for (i), q for (ii) and (iii)."""
    return ising_p(spec, x) if case is IsingCase.I else ising_q(spec, x)


def ising_p_limit(x: float) -> float:
    """
    Thermodynamic-limit shape of p: pi / (2 max(x, 1 - x)^2 |1 - 2x|).

    The finite-m sum approaches (2m + 1) / (8 pi) times this value. Infinite at
    the critical point x = 1/2.
    """
    distance = abs(1.0 - 2.0 * x)
    if distance == 0.0:
        return float("inf")
    return float(np.pi / (2.0 * max(x, 1.0 - x) ** 2 * distance))


def ising_q_limit(x: float) -> float:
    """Thermodynamic-limit shape of q on [0, 1): pi / (2 (1 - x^2))."""
    if abs(x) >= 1.0:
        return float("inf")
    return float(np.pi / (2.0 * (1.0 - x**2)))


def ising_limit_scale(spec: IsingSpec) -> float:
    """Factor (2m + 1) / (8 pi) relating finite-m sums to the limit shapes."""
    return spec.sites / (8.0 * np.pi)


def ising_geodesic_closed_form(case: IsingCase, s: ArrayLike) -> NDArray[np.float64]:
    """
    Thermodynamic-limit geodesics.

    Case (i): x(s) = (1 - tan^2[pi (1 - 2s) / 4]) / 2 for s <= 1/2 and
    (1 + tan^2[pi (1 - 2s) / 4]) / 2 for s >= 1/2. Cases (ii)/(iii): x(s) = sin(pi s / 2).
    """
    s_values = np.asarray(s, dtype=np.float64)
    if case is IsingCase.I:
        squared = np.tan(0.25 * np.pi * (1.0 - 2.0 * s_values)) ** 2
        return np.where(s_values <= 0.5, 0.5 * (1.0 - squared), 0.5 * (1.0 + squared))
    return np.sin(0.5 * np.pi * s_values)


def ising_critical_point(case: IsingCase) -> float:
    """Critical coordinate on a case restriction (x_c = 1/2 for (i), 1 for (ii)/(iii))."""
    return 0.5 if case is IsingCase.I else 1.0

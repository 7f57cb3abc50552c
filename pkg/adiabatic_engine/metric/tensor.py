"""
Metric and geometric tensors of the ground-state bundle.

g_ij = Tr[d_i P0 d_j P0] / (2 g0) and G_ij = Tr[P0 d_i P0 d_j P0 P0] / g0, with
g = Re G. The primary evaluation works in the eigenbasis: with
A_i = Q0 dH_i P0 expressed on excited x ground eigenvectors and
B_i = A_i / (E_n - E0), G_ij = Tr[B_i^dagger B_j] / g0. That is the resolvent
form Tr[P0 dH_i R^2 dH_j P0] / g0 without forming R explicitly.

Notes
-----
The projector-derivative form, the nondegenerate perturbative sum, the
imaginary-time integral and the Bures form are independent evaluations kept as
public cross-checks.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.integrate
import scipy.linalg
from numpy.typing import ArrayLike, NDArray

from ..errors import QuadratureNotConverged, RankMismatch
from ..hamiltonian.model import ComplexMatrix, HamiltonianModel, RealVector, control_point
from ..hamiltonian.spectral import (
    SpectralData,
    diagonalize,
    projector_derivative,
    reduced_resolvent,
    require_gap,
    require_nondegenerate,
)
from ..tolerances import DEFAULT_TOLERANCES, Tolerances

_LOGGER = logging.getLogger(__name__)

RealMatrix = NDArray[np.float64]

TAU_CUTOFF_GAPS = 50.0


@dataclass(frozen=True, slots=True)
class MetricSample:
    """
    Metric data at one control point.

    Attributes
    ----------
    x:
        Control point.
    g:
        M x M real symmetric metric.
    g0:
        Ground degeneracy used in the normalization.
    gap:
        Spectral gap at x, when known.
    G:
        Geometric tensor, when computed.
    g_tilde:
        Brachistochrone metric, when computed.
    """

    x: RealVector
    g: RealMatrix
    g0: int = 1
    gap: float | None = None
    G: ComplexMatrix | None = None
    g_tilde: RealMatrix | None = None

    @property
    def param_dim(self) -> int:
        return int(self.g.shape[0])

    def norm_squared(self, velocity: ArrayLike) -> float:
        """g_ij v^i v^j."""
        v = np.atleast_1d(np.asarray(velocity, dtype=np.float64))
        return float(v @ self.g @ v)

    def to_dict(self) -> dict[str, Any]:
        payload: dict[str, Any] = {
            "x": self.x.tolist(),
            "g": self.g.tolist(),
            "g0": self.g0,
            "gap": self.gap,
        }
        if self.G is not None:
            payload["G_real"] = self.G.real.tolist()
            payload["G_imag"] = self.G.imag.tolist()
        if self.g_tilde is not None:
            payload["g_tilde"] = self.g_tilde.tolist()
        return payload


def _spectral(
    model: HamiltonianModel, x: ArrayLike, spectral: SpectralData | None, tolerances: Tolerances
) -> tuple[RealVector, SpectralData]:
    point = control_point(x, model.param_dim)
    return point, spectral if spectral is not None else diagonalize(model, point, tolerances=tolerances)


def _excitation_blocks(
    model: HamiltonianModel, point: RealVector, spectral: SpectralData
) -> list[ComplexMatrix]:
    """B_i = <n| dH_i |alpha> / (E_n - E0) for excited n and ground alpha."""
    ground = spectral.ground_frame
    excited = spectral.eigenvectors[:, spectral.g0 :]
    inverse_gaps = 1.0 / spectral.excitation_energies()
    blocks = []
    for index in range(model.param_dim):
        coupling = excited.conj().T @ model.partial(point, index) @ ground
        blocks.append(coupling * inverse_gaps[:, None])
    return blocks


def _gram(blocks: list[ComplexMatrix], g0: int) -> ComplexMatrix:
    size = len(blocks)
    tensor = np.empty((size, size), dtype=np.complex128)
    for i in range(size):
        for j in range(i, size):
            value = np.vdot(blocks[i], blocks[j]) / g0
            tensor[i, j] = value
            tensor[j, i] = np.conj(value)
    return tensor


def geometric_tensor(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """
    Return G_ij = Tr[P0 (d_i P0)(d_j P0) P0] / g0.

    Since P0 d_i P0 d_j P0 P0 = P0 dH_i R^2 dH_j P0, this is a Gram matrix of the
    excited-ground coupling blocks, Hermitian by construction.

    Raises
    ------
    GapCollapse
        If the gap is at or below the gap floor.
    """
    point, spec = _spectral(model, x, spectral, tolerances)
    require_gap(spec, tolerances=tolerances)
    return _gram(_excitation_blocks(model, point, spec), spec.g0)


def metric_tensor(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RealMatrix:
    """
    Return g_ij = Re Tr[P0 dH_i R^2 dH_j P0] / g0.

    Parameters
    ----------
    model:
        Hamiltonian family.
    x:
        Control point.
    spectral:
        Precomputed decomposition at ``x``.
    tolerances:
        Numerical tolerances.

    Returns
    -------
    numpy.ndarray
        M x M real symmetric positive semidefinite matrix.

    Raises
    ------
    GapCollapse
        If the gap is at or below the gap floor.
    """
    tensor = geometric_tensor(model, x, spectral=spectral, tolerances=tolerances)
    real = np.ascontiguousarray(tensor.real)
    return 0.5 * (real + real.T)


def metric_tensor_projector_form(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RealMatrix:
    """g_ij = Tr[d_i P0 d_j P0] / (2 g0) from dense projector derivatives."""
    point, spec = _spectral(model, x, spectral, tolerances)
    derivatives = [
        projector_derivative(model, point, i, spectral=spec, tolerances=tolerances)
        for i in range(model.param_dim)
    ]
    size = model.param_dim
    metric = np.empty((size, size), dtype=np.float64)
    for i in range(size):
        for j in range(i, size):
            value = float(np.real(np.trace(derivatives[i] @ derivatives[j]))) / (2.0 * spec.g0)
            metric[i, j] = metric[j, i] = value
    return metric


def metric_nondegenerate(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RealMatrix:
    """
    Perturbative sum Re sum_{n>0} <0|dH_i|n><n|dH_j|0> / (E_n - E0)^2.

    Raises
    ------
    DegenerateGround
        If g0 > 1.
    GapCollapse
        If the gap is at or below the gap floor.
    """
    point, spec = _spectral(model, x, spectral, tolerances)
    require_nondegenerate(spec)
    require_gap(spec, tolerances=tolerances)
    ground = spec.eigenvectors[:, 0]
    size = model.param_dim
    rows = np.empty((size, spec.dim - 1), dtype=np.complex128)
    for i in range(size):
        rows[i] = ground.conj() @ model.partial(point, i) @ spec.eigenvectors[:, 1:]
    weights = 1.0 / spec.excitation_energies() ** 2
    metric = np.empty((size, size), dtype=np.float64)
    for i in range(size):
        for j in range(size):
            metric[i, j] = float(np.real(np.sum(rows[i] * np.conj(rows[j]) * weights)))
    return metric


def geometric_tensor_integral(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    analytic: bool = True,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """
    Imaginary-time representation of G.

    G_ij = (1/g0) int_0^inf dtau tau (Tr[P0 dH_i(tau) dH_j] - Tr[P0 dH_i] Tr[P0 dH_j] / g0),
    dH_i(tau) = e^(tau H) dH_i e^(-tau H), evaluated in the eigenbasis with E0
    subtracted so every excited pair contributes tau e^(-(E_n - E0) tau).

    Parameters
    ----------
    analytic:
        Integrate each pair exactly (int tau e^(-D tau) = 1/D^2). Otherwise
        integrate numerically on [0, 50 / gap] with ``scipy.integrate.quad_vec``
        and bound the discarded tail.

    Raises
    ------
    GapCollapse
        If the gap is at or below the gap floor.
    QuadratureNotConverged
        If the numerical error estimate or the tail bound exceeds
        ``tolerances.quadrature_abs``.

    Notes
    -----
    For g0 > 1 the ground-block part Tr[P0 dH_i P0 dH_j] - Tr[P0 dH_i] Tr[P0 dH_j] / g0
    does not decay in tau. It is excluded, which leaves exactly the excited-pair
    sum; its size is logged when it is not negligible.
    """
    point, spec = _spectral(model, x, spectral, tolerances)
    gap = require_gap(spec, tolerances=tolerances)
    g0 = spec.g0
    in_basis = [spec.to_eigenbasis(model.partial(point, i)) for i in range(model.param_dim)]
    size = model.param_dim

    if g0 > 1:
        _warn_ground_block(in_basis, g0)

    # upward[i][n, a] = <a|dH_i|n> for ground a and excited n; downward[j][n, a] = <n|dH_j|a>
    upward = [block[: g0, g0:].T for block in in_basis]
    downward = [block[g0:, : g0] for block in in_basis]
    excitations = spec.excitation_energies()

    if analytic:
        weights = 1.0 / excitations**2
        tensor = np.empty((size, size), dtype=np.complex128)
        for i in range(size):
            for j in range(size):
                tensor[i, j] = np.sum(upward[i] * downward[j] * weights[:, None]) / g0
        return tensor

    products = np.array(
        [[np.sum(upward[i] * downward[j], axis=1) for j in range(size)] for i in range(size)]
    )

    def integrand(tau: float) -> NDArray[np.float64]:
        kernel = tau * np.exp(-excitations * tau)
        values = (products @ kernel) / g0
        return np.concatenate((values.real.ravel(), values.imag.ravel()))

    cutoff = TAU_CUTOFF_GAPS / gap
    values, error = scipy.integrate.quad_vec(
        integrand, 0.0, cutoff, epsabs=0.1 * tolerances.quadrature_abs, epsrel=0.0, limit=2000
    )
    scale = float(np.max(np.abs(products))) / g0 if products.size else 0.0
    tail = scale * excitations.size * np.exp(-gap * cutoff) * (cutoff / gap + 1.0 / gap**2)
    if error > tolerances.quadrature_abs or tail > tolerances.quadrature_abs:
        raise QuadratureNotConverged(
            f"tau integral error {error:.2e}, tail {tail:.2e} exceed {tolerances.quadrature_abs:.1e}"
        )
    flat = np.asarray(values)
    half = size * size
    return (flat[:half] + 1j * flat[half:]).reshape(size, size)


def _warn_ground_block(in_basis: list[ComplexMatrix], g0: int) -> None:
    worst = 0.0
    for first in in_basis:
        for second in in_basis:
            block = np.trace(first[:g0, :g0] @ second[:g0, :g0])
            block -= np.trace(first[:g0, :g0]) * np.trace(second[:g0, :g0]) / g0
            worst = max(worst, abs(complex(block)))
    if worst > 1e-10:
        _LOGGER.warning("Dropping non-decaying ground-block term of size %.3e (g0=%d)", worst, g0)


def symmetric_log_derivative(
    model: HamiltonianModel,
    x: ArrayLike,
    i: int,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """
    SLD of rho = P0 / g0 along x_i: L = 2 d_i P0.

    Satisfies d_i rho = (L rho + rho L) / 2.
    """
    point, spec = _spectral(model, x, spectral, tolerances)
    return 2.0 * projector_derivative(model, point, i, spectral=spec, tolerances=tolerances)


def bures_metric(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RealMatrix:
    """
    Bures metric of rho = P0 / g0 from the SLD, Tr[L_i L_j] / g0.

    With L = 2 dP0 this is (4 / g0) Tr[d_i P0 d_j P0] = 8 g_ij.
    """
    point, spec = _spectral(model, x, spectral, tolerances)
    logs = [
        symmetric_log_derivative(model, point, i, spectral=spec, tolerances=tolerances)
        for i in range(model.param_dim)
    ]
    size = model.param_dim
    metric = np.empty((size, size), dtype=np.float64)
    for i in range(size):
        for j in range(i, size):
            value = float(np.real(np.trace(logs[i] @ logs[j]))) / spec.g0
            metric[i, j] = metric[j, i] = value
    return metric


def brachistochrone_metric(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    spectral: SpectralData | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RealMatrix:
    """
    g~_ij = Tr[dH_i dH_j] / gap^4.

    Raises
    ------
    GapCollapse
        If the gap is at or below the gap floor.
    """
    point, spec = _spectral(model, x, spectral, tolerances)
    gap = require_gap(spec, tolerances=tolerances)
    partials = [model.partial(point, i) for i in range(model.param_dim)]
    size = model.param_dim
    metric = np.empty((size, size), dtype=np.float64)
    for i in range(size):
        for j in range(i, size):
            value = float(np.real(np.trace(partials[i] @ partials[j]))) / gap**4
            metric[i, j] = metric[j, i] = value
    return metric


def trace_norm(matrix: ComplexMatrix) -> float:
    """Sum of singular values."""
    return float(np.sum(scipy.linalg.svdvals(matrix)))


@dataclass(frozen=True, slots=True)
class MetricBounds:
    """
    Gap bounds on g and g~ at one point.

    Attributes
    ----------
    g, g_tilde:
        The metrics themselves.
    trace_norms:
        ||dH_i dH_j||_1.
    gap:
        Gap used in the bounds (the minimum gap along a path when supplied).
    g_bound:
        trace_norms / gap^2.
    g_tilde_bound:
        trace_norms / gap^4.
    g_entry_bound:
        ||dH_j P0 dH_i||_1 / (g0 gap^2), valid for every entry.
    """

    g: RealMatrix
    g_tilde: RealMatrix
    trace_norms: RealMatrix
    gap: float
    g_bound: RealMatrix
    g_tilde_bound: RealMatrix
    g_entry_bound: RealMatrix

    def g_tilde_holds(self, slack: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.g_tilde) <= self.g_tilde_bound + slack))

    def g_diagonal_holds(self, slack: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.diag(self.g)) <= np.diag(self.g_bound) + slack))

    def g_entries_hold(self, slack: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.g) <= self.g_entry_bound + slack))


def metric_bounds(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    min_gap: float | None = None,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> MetricBounds:
    """
    Report |g_ij| <= ||dH_i dH_j||_1 / gap^2 and |g~_ij| <= ||dH_i dH_j||_1 / gap^4.

    Parameters
    ----------
    min_gap:
        Path-wide minimum gap; defaults to the gap at ``x``.

    Notes
    -----
    The g~ bound holds entrywise. For g the trace-norm form is guaranteed on
    the diagonal; off-diagonal entries are covered by ``g_entry_bound``, which
    keeps the P0 sandwich.
    """
    point, spec = _spectral(model, x, None, tolerances)
    local_gap = require_gap(spec, tolerances=tolerances)
    gap = local_gap if min_gap is None else min(float(min_gap), local_gap)
    partials = [model.partial(point, i) for i in range(model.param_dim)]
    size = model.param_dim
    norms = np.empty((size, size), dtype=np.float64)
    entry = np.empty((size, size), dtype=np.float64)
    projector = spec.P0
    for i in range(size):
        for j in range(size):
            norms[i, j] = trace_norm(partials[i] @ partials[j])
            entry[i, j] = trace_norm(partials[j] @ projector @ partials[i]) / (spec.g0 * gap**2)
    return MetricBounds(
        g=metric_tensor(model, point, spectral=spec, tolerances=tolerances),
        g_tilde=brachistochrone_metric(model, point, spectral=spec, tolerances=tolerances),
        trace_norms=norms,
        gap=gap,
        g_bound=norms / gap**2,
        g_tilde_bound=norms / gap**4,
        g_entry_bound=entry,
    )


def metric_sample(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    with_geometric: bool = False,
    with_brachistochrone: bool = False,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> MetricSample:
    """Diagonalize once and assemble a :class:`MetricSample`."""
    point, spec = _spectral(model, x, None, tolerances)
    tensor = geometric_tensor(model, point, spectral=spec, tolerances=tolerances)
    real = np.ascontiguousarray(tensor.real)
    return MetricSample(
        x=point,
        g=0.5 * (real + real.T),
        g0=spec.g0,
        gap=spec.gap,
        G=tensor if with_geometric else None,
        g_tilde=(
            brachistochrone_metric(model, point, spectral=spec, tolerances=tolerances)
            if with_brachistochrone
            else None
        ),
    )


def grassmannian_distance(first: ComplexMatrix, second: ComplexMatrix, *, rank_tol: float = 1e-8) -> float:
    """
    d(P, P') = ||P - P'||_2 / sqrt(2 g0) for projectors of equal rank g0.

    Raises
    ------
    RankMismatch
        If the traces differ or are not integers.
    """
    rank_first = float(np.real(np.trace(first)))
    rank_second = float(np.real(np.trace(second)))
    g0 = round(rank_first)
    if abs(rank_first - g0) > rank_tol or abs(rank_second - g0) > rank_tol or g0 < 1:
        raise RankMismatch(f"projector ranks {rank_first:.6g} and {rank_second:.6g} differ")
    return float(np.linalg.norm(first - second, "fro")) / np.sqrt(2.0 * g0)


def fidelity_expansion_defect(
    model: HamiltonianModel,
    x: ArrayLike,
    dx: ArrayLike,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> float:
    """
    Tr[P0(x) P0(x + dx)] / g0 - (1 - G_ij dx^i dx^j).

    Only the symmetric part of G contributes, so this is the remainder of the
    second-order fidelity expansion (third order in |dx|).
    """
    point, spec = _spectral(model, x, None, tolerances)
    step = control_point(dx, model.param_dim)
    shifted = diagonalize(model, point + step, tolerances=tolerances)
    if shifted.g0 != spec.g0:
        raise RankMismatch(f"ground degeneracy changes from {spec.g0} to {shifted.g0} across dx")
    fidelity = float(np.real(np.trace(spec.P0 @ shifted.P0))) / spec.g0
    tensor = geometric_tensor(model, point, spectral=spec, tolerances=tolerances)
    quadratic = float(np.real(step @ tensor @ step))
    return fidelity - (1.0 - quadratic)


def resolvent_metric_check(
    model: HamiltonianModel,
    x: ArrayLike,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> RealMatrix:
    """
    Dense resolvent evaluation Tr[P0 dH_i R^2 dH_j P0] / (2 g0) + (i <-> j).

    Forms R explicitly; used to validate the eigenbasis evaluation.
    """
    point, spec = _spectral(model, x, None, tolerances)
    resolvent = reduced_resolvent(spec, tolerances=tolerances)
    squared = resolvent @ resolvent
    projector = spec.P0
    partials = [model.partial(point, i) for i in range(model.param_dim)]
    size = model.param_dim
    metric = np.empty((size, size), dtype=np.float64)
    for i in range(size):
        for j in range(size):
            forward = np.trace(projector @ partials[i] @ squared @ partials[j] @ projector)
            backward = np.trace(projector @ partials[j] @ squared @ partials[i] @ projector)
            metric[i, j] = float(np.real(forward + backward)) / (2.0 * spec.g0)
    return metric

from __future__ import annotations

import numpy as np
import pytest

from adiabatic_engine.errors import DegenerateGround, GapCollapse, InvalidModel
from adiabatic_engine.hamiltonian import (
    CallableModel,
    commutator_norm_identity_check,
    diagonalize,
    energy_derivative,
    operator_norm,
    projector_derivative,
    projector_velocity,
    reduced_resolvent,
    require_gap,
    require_nondegenerate,
    restrict_affine,
    restrict_line,
    shift_trace,
)
from adiabatic_engine.hamiltonian.model import RealVector

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def _spin(x: RealVector) -> np.ndarray:
    theta = float(x[0])
    return -(np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X)


def _spin_derivative(x: RealVector, _index: int) -> np.ndarray:
    theta = float(x[0])
    return -(-np.sin(theta) * SIGMA_Z + np.cos(theta) * SIGMA_X)


SPIN = CallableModel(name="spin", dim=2, param_dim=1, hamiltonian=_spin, derivative=_spin_derivative)
SPIN_FD = CallableModel(name="spin-fd", dim=2, param_dim=1, hamiltonian=_spin)


def _three_level(x: RealVector) -> np.ndarray:
    a, b = float(x[0]), float(x[1])
    return np.array(
        [[0.0, a, 0.3j], [a, 1.0 + b, 0.2], [-0.3j, 0.2, 2.5 - a * b]], dtype=np.complex128
    )


THREE_LEVEL = CallableModel(name="three", dim=3, param_dim=2, hamiltonian=_three_level)


def test_diagonalize_spin_ground_projector() -> None:
    theta = 0.7
    spectral = diagonalize(SPIN, theta)

    assert spectral.g0 == 1
    assert spectral.E0 == pytest.approx(-1.0)
    assert spectral.gap == pytest.approx(2.0)
    n_sigma = np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X
    np.testing.assert_allclose(spectral.P0, 0.5 * (np.eye(2) + n_sigma), atol=1e-12)


def test_reduced_resolvent_annihilates_ground_space() -> None:
    spectral = diagonalize(THREE_LEVEL, [0.4, -0.2])
    resolvent = reduced_resolvent(spectral)

    np.testing.assert_allclose(resolvent @ spectral.P0, 0.0, atol=1e-12)
    np.testing.assert_allclose(spectral.P0 @ resolvent, 0.0, atol=1e-12)
    assert operator_norm(resolvent) == pytest.approx(1.0 / spectral.gap, rel=1e-10)


@pytest.mark.parametrize("index", [0, 1])
def test_projector_derivative_matches_finite_difference(index: int) -> None:
    x = np.array([0.4, -0.2])
    step = 1e-6
    shift = np.zeros(2)
    shift[index] = step
    forward = diagonalize(THREE_LEVEL, x + shift).P0
    backward = diagonalize(THREE_LEVEL, x - shift).P0

    analytic = projector_derivative(THREE_LEVEL, x, index)

    np.testing.assert_allclose(analytic, (forward - backward) / (2 * step), atol=1e-7)
    np.testing.assert_allclose(analytic, analytic.conj().T, atol=1e-12)


def test_projector_velocity_is_linear_in_velocity() -> None:
    x = np.array([0.1, 0.3])
    velocity = np.array([0.5, -2.0])
    combined = 0.5 * projector_derivative(THREE_LEVEL, x, 0) - 2.0 * projector_derivative(
        THREE_LEVEL, x, 1
    )
    np.testing.assert_allclose(projector_velocity(THREE_LEVEL, x, velocity), combined, atol=1e-9)


def test_finite_difference_partials_agree_with_analytic() -> None:
    np.testing.assert_allclose(SPIN_FD.partial(0.3, 0), SPIN.partial(0.3, 0), atol=1e-8)


def test_energy_derivative_is_hellmann_feynman() -> None:
    # E0(theta) = -1 for every theta
    assert energy_derivative(SPIN, 1.1, 0) == pytest.approx(0.0, abs=1e-12)
    diagonal = CallableModel(
        name="diag",
        dim=2,
        param_dim=1,
        hamiltonian=lambda x: np.diag([float(x[0]), 3.0]),
        derivative=lambda _x, _i: np.diag([1.0, 0.0]),
    )
    assert energy_derivative(diagonal, 0.5, 0) == pytest.approx(1.0)


@pytest.mark.parametrize("x", [[0.0, 0.0], [0.4, -0.2], [1.3, 0.9]])
def test_commutator_norm_identity(x: list[float]) -> None:
    lhs, rhs = commutator_norm_identity_check(THREE_LEVEL, x, [0.7, -0.3])
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-12)


def test_trace_shift_leaves_projector_calculus_unchanged() -> None:
    shifted = shift_trace(SPIN, lambda x: 3.0 * float(x[0]) ** 2, lambda x: [6.0 * float(x[0])])
    x = 0.8

    base, moved = diagonalize(SPIN, x), diagonalize(shifted, x)

    assert moved.E0 == pytest.approx(base.E0 + 3.0 * x**2)
    np.testing.assert_allclose(moved.P0, base.P0, atol=1e-12)
    np.testing.assert_allclose(
        projector_derivative(shifted, x, 0), projector_derivative(SPIN, x, 0), atol=1e-12
    )


def test_restrict_line_maps_reduced_coordinate() -> None:
    line = restrict_line(THREE_LEVEL, [0.0, 1.0], [1.0, -1.0])

    assert line.param_dim == 1
    np.testing.assert_allclose(line.lift(0.25), [0.25, 0.5])
    np.testing.assert_allclose(line.evaluate(np.array([0.25])), _three_level(np.array([0.25, 0.5])))
    expected = THREE_LEVEL.partial(np.array([0.25, 0.5]), 0) - 2.0 * THREE_LEVEL.partial(
        np.array([0.25, 0.5]), 1
    )
    np.testing.assert_allclose(line.partial(np.array([0.25]), 0), expected, atol=1e-9)


def test_restrict_affine_keeps_every_basis_direction() -> None:
    plane = restrict_affine(THREE_LEVEL, [0.1, 0.2], [[1.0, 1.0], [0.0, 2.0]])
    t = np.array([0.3, 0.4])
    x = np.array([0.8, 1.0])

    assert plane.param_dim == 2
    np.testing.assert_allclose(plane.lift(t), x)
    expected = THREE_LEVEL.partial(x, 0) + 2.0 * THREE_LEVEL.partial(x, 1)
    np.testing.assert_allclose(plane.partial(t, 1), expected, atol=1e-9)
    with pytest.raises(ValueError, match="basis has 3 rows"):
        restrict_affine(THREE_LEVEL, [0.0, 0.0], np.ones((3, 1)))


def test_degenerate_cluster_is_counted() -> None:
    model = CallableModel(
        name="triplet", dim=3, param_dim=1, hamiltonian=lambda x: np.diag([0.0, 1e-12, 1.0])
    )
    spectral = diagonalize(model, 0.0)

    assert spectral.g0 == 2
    assert spectral.gap == pytest.approx(1.0)
    assert np.trace(spectral.P0).real == pytest.approx(2.0)
    with pytest.raises(DegenerateGround):
        require_nondegenerate(spectral)


def test_gap_below_floor_raises_gap_collapse() -> None:
    model = CallableModel(
        name="near-crossing", dim=2, param_dim=1, hamiltonian=lambda x: np.diag([0.0, 1e-12])
    )
    spectral = diagonalize(model, 0.0, degeneracy_tol=1e-14)

    assert spectral.g0 == 1
    with pytest.raises(GapCollapse, match="gap"):
        require_gap(spectral)
    with pytest.raises(GapCollapse):
        projector_derivative(model, 0.0, 0, spectral=spectral)


def test_non_hermitian_matrix_is_rejected() -> None:
    model = CallableModel(
        name="skew", dim=2, param_dim=1, hamiltonian=lambda x: np.array([[0.0, 1.0], [0.0, 0.0]])
    )
    with pytest.raises(InvalidModel, match="not Hermitian"):
        diagonalize(model, 0.0)


def test_wrong_control_dimension_is_rejected() -> None:
    with pytest.raises(ValueError, match="expects 2"):
        diagonalize(THREE_LEVEL, [0.1])


def test_complex_hermitian_model_diagonalizes() -> None:
    model = CallableModel(
        name="y", dim=2, param_dim=1, hamiltonian=lambda x: float(x[0]) * SIGMA_Y + SIGMA_Z
    )
    spectral = diagonalize(model, 1.0)
    assert spectral.gap == pytest.approx(2.0 * np.sqrt(2.0))

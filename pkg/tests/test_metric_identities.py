from __future__ import annotations

import numpy as np
import pytest

from adiabatic_engine.errors import DegenerateGround, GapCollapse, RankMismatch
from adiabatic_engine.hamiltonian import CallableModel, diagonalize, projector_derivative, shift_trace
from adiabatic_engine.hamiltonian.model import RealVector
from adiabatic_engine.metric import (
    ScalarMetricField,
    bures_metric,
    fidelity_expansion_defect,
    geometric_tensor,
    geometric_tensor_integral,
    grassmannian_distance,
    metric_bounds,
    metric_nondegenerate,
    metric_sample,
    metric_tensor,
    metric_tensor_projector_form,
    resolvent_metric_check,
    symmetric_log_derivative,
)

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def _spin(x: RealVector) -> np.ndarray:
    theta = float(x[0])
    return -(np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X)


SPIN = CallableModel(name="spin", dim=2, param_dim=1, hamiltonian=_spin)


def _random_family(seed: int, dim: int = 5, params: int = 3) -> CallableModel:
    rng = np.random.default_rng(seed)
    matrices = []
    for _ in range(params + 1):
        raw = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
        matrices.append(0.5 * (raw + raw.conj().T))

    def hamiltonian(x: RealVector) -> np.ndarray:
        return matrices[0] + sum(value * matrix for value, matrix in zip(x, matrices[1:]))

    def derivative(_x: RealVector, index: int) -> np.ndarray:
        return matrices[index + 1]

    return CallableModel(
        name=f"random-{seed}", dim=dim, param_dim=params, hamiltonian=hamiltonian, derivative=derivative
    )


RANDOM_SEEDS = list(range(8))
POINT = np.array([0.3, -0.4, 0.2])


def test_spin_metric_is_one_quarter() -> None:
    assert metric_tensor(SPIN, 0.4)[0, 0] == pytest.approx(0.25, rel=1e-6)
    assert metric_tensor_projector_form(SPIN, 0.4)[0, 0] == pytest.approx(0.25, rel=1e-6)
    assert bures_metric(SPIN, 0.4)[0, 0] == pytest.approx(2.0, rel=1e-6)


@pytest.mark.parametrize("seed", RANDOM_SEEDS)
def test_metric_forms_agree(seed: int) -> None:
    model = _random_family(seed)
    g = metric_tensor(model, POINT)

    np.testing.assert_allclose(g, g.T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(g) >= -1e-12)
    np.testing.assert_allclose(geometric_tensor(model, POINT).real, g, atol=1e-9)
    np.testing.assert_allclose(metric_tensor_projector_form(model, POINT), g, atol=1e-9)
    np.testing.assert_allclose(metric_nondegenerate(model, POINT), g, atol=1e-9)
    np.testing.assert_allclose(resolvent_metric_check(model, POINT), g, atol=1e-9)
    np.testing.assert_allclose(bures_metric(model, POINT), 8.0 * g, atol=1e-8)


@pytest.mark.parametrize("seed", RANDOM_SEEDS[:3])
def test_geometric_tensor_is_hermitian_with_antisymmetric_curvature(seed: int) -> None:
    tensor = geometric_tensor(_random_family(seed), POINT)
    np.testing.assert_allclose(tensor, tensor.conj().T, atol=1e-14)
    np.testing.assert_allclose(tensor.imag, -tensor.imag.T, atol=1e-14)


@pytest.mark.parametrize("seed", RANDOM_SEEDS[:4])
def test_imaginary_time_integral_matches_spectral_sum(seed: int) -> None:
    model = _random_family(seed)
    spectral_form = geometric_tensor(model, POINT)

    np.testing.assert_allclose(
        geometric_tensor_integral(model, POINT, analytic=True), spectral_form, atol=1e-10
    )
    np.testing.assert_allclose(
        geometric_tensor_integral(model, POINT, analytic=False), spectral_form, atol=1e-8
    )


def test_symmetric_log_derivative_reproduces_state_derivative() -> None:
    x = 0.9
    spectral = diagonalize(SPIN, x)
    rho = spectral.P0
    sld = symmetric_log_derivative(SPIN, x, 0)
    np.testing.assert_allclose(0.5 * (sld @ rho + rho @ sld), projector_derivative(SPIN, x, 0), atol=1e-8)


def test_metric_sample_collects_optional_tensors() -> None:
    sample = metric_sample(SPIN, 0.2, with_geometric=True, with_brachistochrone=True)

    assert sample.g0 == 1
    assert sample.gap == pytest.approx(2.0)
    assert sample.g_tilde is not None and sample.g_tilde[0, 0] == pytest.approx(1.0 / 8.0, rel=1e-6)
    assert sample.G is not None and sample.G[0, 0].real == pytest.approx(0.25, rel=1e-6)
    assert sample.norm_squared([2.0]) == pytest.approx(1.0, rel=1e-6)
    payload = sample.to_dict()
    assert set(payload) == {"x", "g", "g0", "gap", "G_real", "G_imag", "g_tilde"}


@pytest.mark.parametrize("seed", RANDOM_SEEDS[:4])
def test_gap_bounds_hold(seed: int) -> None:
    bounds = metric_bounds(_random_family(seed), POINT)
    assert bounds.g_tilde_holds()
    assert bounds.g_diagonal_holds()
    assert bounds.g_entries_hold()


def test_path_minimum_gap_loosens_bounds() -> None:
    local = metric_bounds(SPIN, 0.1)
    path_wide = metric_bounds(SPIN, 0.1, min_gap=0.5)
    assert path_wide.gap == 0.5
    assert np.all(path_wide.g_bound >= local.g_bound)


@pytest.mark.parametrize("step", [1e-1, 5e-2, 2e-2])
def test_fidelity_expansion_remainder_is_higher_order(step: float) -> None:
    # Tr[P(t) P(t + d)] = cos^2(d / 2) for the spin
    defect = fidelity_expansion_defect(SPIN, 0.3, [step])
    assert defect == pytest.approx(step**4 / 48.0, rel=2e-2)


def test_grassmannian_distance_on_the_bloch_sphere() -> None:
    first = diagonalize(SPIN, 0.0).P0
    second = diagonalize(SPIN, 0.6).P0
    assert grassmannian_distance(first, second) == pytest.approx(np.sin(0.3), rel=1e-10)
    assert grassmannian_distance(first, first) == pytest.approx(0.0, abs=1e-14)


def test_grassmannian_distance_rejects_rank_mismatch() -> None:
    with pytest.raises(RankMismatch):
        grassmannian_distance(np.diag([1.0, 0.0]).astype(complex), np.eye(2, dtype=complex))


@pytest.mark.parametrize("seed", RANDOM_SEEDS[:3])
def test_trace_shift_invariance(seed: int) -> None:
    model = _random_family(seed)
    shifted = shift_trace(
        model,
        lambda x: float(np.dot(x, x)) + 7.0,
        lambda x: 2.0 * np.asarray(x),
    )
    np.testing.assert_allclose(metric_tensor(shifted, POINT), metric_tensor(model, POINT), atol=1e-10)
    np.testing.assert_allclose(
        geometric_tensor(shifted, POINT), geometric_tensor(model, POINT), atol=1e-10
    )


def test_nondegenerate_formula_rejects_degenerate_ground() -> None:
    model = CallableModel(
        name="pair",
        dim=3,
        param_dim=1,
        hamiltonian=lambda x: np.array(
            [[0.0, 0.0, float(x[0])], [0.0, 0.0, 0.0], [float(x[0]), 0.0, 1.0]]
        ),
    )
    with pytest.raises(DegenerateGround):
        metric_nondegenerate(model, 0.0)
    assert metric_tensor(model, 0.0)[0, 0] == pytest.approx(0.5, rel=1e-6)


def test_scalar_field_reports_divergence_as_gap_collapse() -> None:
    field = ScalarMetricField(label="pole", metric=lambda x: 1.0 / abs(x - 0.5) if x != 0.5 else np.inf)

    assert field.sample(0.25).g[0, 0] == pytest.approx(4.0)
    assert field.density(0.25) == pytest.approx(2.0)
    with pytest.raises(GapCollapse, match="diverges"):
        field.sample(0.5)

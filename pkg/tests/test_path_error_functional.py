from __future__ import annotations

import numpy as np
import pytest
from scipy.linalg import block_diag

from adiabatic_engine.errors import QuadratureNotConverged
from adiabatic_engine.hamiltonian import CallableModel, shift_trace
from adiabatic_engine.hamiltonian.model import RealVector
from adiabatic_engine.metric import ScalarMetricField, path_error_functional
from adiabatic_engine.metric import path_error as path_error_module
from adiabatic_engine.schedule import ControlPath, sine_perturbation

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=np.complex128)


def _spin_block(theta: float) -> np.ndarray:
    return -(np.cos(theta) * SIGMA_Z + np.sin(theta) * SIGMA_X)


SPIN = CallableModel(
    name="spin", dim=2, param_dim=1, hamiltonian=lambda x: _spin_block(float(x[0]))
)

# two decoupled spins turning at rates 1 and 2 share the ground energy -1 (g0 = 2)
PAIR = CallableModel(
    name="spin-pair",
    dim=4,
    param_dim=1,
    hamiltonian=lambda x: block_diag(_spin_block(float(x[0])), _spin_block(2.0 * float(x[0]))),
)


def test_spin_line_totals() -> None:
    path = ControlPath.linear([0.0], [1.0])
    result = path_error_functional(SPIN, path)

    assert result.converged
    assert result.s[0] == 0.0 and result.s[-1] == 1.0
    assert result.total == pytest.approx(np.sqrt(0.5), rel=1e-7)
    assert result.total_length == pytest.approx(0.5, rel=1e-7)
    assert result.total_tilde == pytest.approx(0.5, rel=1e-7)
    assert result.epsilon_frobenius is not None
    assert float(result.epsilon_frobenius[-1]) == pytest.approx(result.total, rel=1e-7)
    assert float(result.epsilon_at(0.5)) == pytest.approx(0.5 * result.total, rel=1e-6)


def test_running_functional_starts_at_zero_and_is_nondecreasing() -> None:
    path = sine_perturbation(ControlPath.linear([0.0], [2.0], knots=101), [0.3, -0.1])
    result = path_error_functional(SPIN, path)

    assert result.epsilon[0] == 0.0
    assert np.all(np.diff(result.epsilon) >= 0.0)
    assert result.epsilon_tilde is not None
    assert np.all(np.diff(result.epsilon_tilde) >= 0.0)


def test_frobenius_action_matches_metric_quadrature() -> None:
    path = sine_perturbation(ControlPath.linear([0.2], [1.4], knots=101), [0.25])
    result = path_error_functional(SPIN, path)

    assert result.frobenius_integrand is not None
    np.testing.assert_allclose(result.frobenius_integrand, result.integrand, rtol=1e-7, atol=1e-9)


def test_degenerate_pair_ordering() -> None:
    path = ControlPath.linear([0.0], [1.0])
    result = path_error_functional(PAIR, path)

    assert np.all(result.g0 == 2)
    # rates 1 and 2: eps integrand sqrt(1/2 + 2), sup-norm integrand 1
    assert result.total == pytest.approx(np.sqrt(2.5), rel=1e-7)
    assert result.total_tilde == pytest.approx(1.0, rel=1e-7)
    assert result.sup_integrand is not None
    lower = np.sqrt(2.0) * result.sup_integrand
    upper = np.sqrt(2.0 * result.g0) * result.sup_integrand
    assert np.all(result.integrand >= lower - 1e-9)
    assert np.all(result.integrand <= upper + 1e-9)
    assert np.all(result.sup_integrand <= result.integrand)


def test_trace_shift_leaves_functional_unchanged() -> None:
    path = ControlPath.linear([0.0], [1.5])
    shifted = shift_trace(SPIN, lambda x: 4.0 * float(x[0]), lambda x: [4.0])

    base = path_error_functional(SPIN, path, frobenius=False)
    moved = path_error_functional(shifted, path, frobenius=False)

    assert moved.total == pytest.approx(base.total, abs=1e-10)


def test_metric_field_without_model_has_no_sup_norm_action() -> None:
    field = ScalarMetricField(label="flat", metric=lambda x: 2.0)
    result = path_error_functional(field, ControlPath.linear([0.0], [3.0]))

    assert result.total == pytest.approx(3.0 * np.sqrt(4.0), rel=1e-10)
    assert result.total_tilde is None
    assert result.summary()["epsilon_tilde"] is None
    with pytest.raises(ValueError, match="sup-norm"):
        result.epsilon_tilde_at(0.5)


def test_constant_path_has_zero_error() -> None:
    result = path_error_functional(SPIN, ControlPath.constant([0.7]))
    assert result.total == 0.0
    assert result.total_tilde == 0.0


def test_quadrature_that_hits_the_knot_cap_raises() -> None:
    path = ControlPath.from_function(
        lambda s: 0.5 * np.pi * np.sin(0.5 * np.pi * s),
        lambda s: 0.25 * np.pi**2 * np.cos(0.5 * np.pi * s),
        knots=65,
    )

    with pytest.raises(QuadratureNotConverged, match="9 knots"):
        path_error_functional(SPIN, path, frobenius=False, initial_knots=5, max_knots=9)
    assert path_error_functional(SPIN, path, frobenius=False).converged


def test_knot_cap_must_allow_one_refinement() -> None:
    with pytest.raises(ValueError, match="max_knots"):
        path_error_functional(SPIN, ControlPath.linear([0.0], [1.0]), initial_knots=9, max_knots=9)


def test_running_integral_that_dips_is_reported_not_clipped() -> None:
    s = np.linspace(0.0, 4.0, 5)
    # the Simpson parabola through (0, 10), (1, 0), (2, 0) goes negative on [1, 2]
    values = np.array([10.0, 0.0, 0.0, 0.0, 0.0])

    with pytest.raises(QuadratureNotConverged, match="dips"):
        path_error_module._running(values, s, 1e-8)
    envelope = path_error_module._running(values, s, 1.0)
    assert np.all(np.diff(envelope) >= 0.0)

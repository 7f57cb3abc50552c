from __future__ import annotations

import numpy as np
import pytest

from adiabatic_engine.errors import ConfigError, DegenerateMode
from adiabatic_engine.hamiltonian import diagonalize, restrict_line
from adiabatic_engine.metric import metric_tensor
from adiabatic_engine.models import (
    DeutschJozsaModel,
    DeutschJozsaSpec,
    IsingCase,
    IsingChainModel,
    IsingMode,
    IsingSpec,
    ProjectiveModel,
    ProjectiveSpec,
    dj_geodesic,
    dj_metric,
    dj_projector_trace,
    ising_case_metric,
    ising_critical_point,
    ising_geodesic_closed_form,
    ising_ground_energy,
    ising_limit_scale,
    ising_metric,
    ising_p,
    ising_p_limit,
    ising_q,
    ising_q_limit,
    ising_theta,
    oracle_from_selector,
    projective_gap,
    projective_geodesic,
    projective_ground_projector,
    projective_metric_1d,
    projective_mixing_angle,
    projective_spectrum,
)


@pytest.mark.parametrize("dim", [4, 16, 64])
def test_grover_gap_at_midpoint_is_the_overlap(dim: int) -> None:
    spec = ProjectiveSpec(dim=dim, overlap=1.0 / np.sqrt(dim))
    assert projective_gap(spec, (0.5, 0.5)) == pytest.approx(1.0 / np.sqrt(dim), rel=1e-12)

    spectral = diagonalize(ProjectiveModel(spec), (0.5, 0.5))
    assert spectral.gap == pytest.approx(1.0 / np.sqrt(dim), rel=1e-10)


def test_projective_spectrum_matches_diagonalization() -> None:
    spec = ProjectiveSpec(dim=6, overlap=0.3, phase=0.7)
    point = (0.8, 0.35)
    lower, upper, top = projective_spectrum(spec, point)
    eigenvalues = np.linalg.eigvalsh(ProjectiveModel(spec).evaluate(np.asarray(point)))

    np.testing.assert_allclose(eigenvalues[:2], [lower, upper], atol=1e-12)
    np.testing.assert_allclose(eigenvalues[2:], top, atol=1e-12)


def test_projective_ground_projector_matches_diagonalization() -> None:
    spec = ProjectiveSpec(dim=5, overlap=0.4, phase=-1.1)
    point = (0.6, 0.9)
    spectral = diagonalize(ProjectiveModel(spec), point)
    np.testing.assert_allclose(projective_ground_projector(spec, point), spectral.P0, atol=1e-10)


@pytest.mark.parametrize("x", [0.1, 0.45, 0.8])
def test_projective_line_metric_matches_generic_metric(x: float) -> None:
    spec = ProjectiveSpec(dim=4, overlap=0.35)
    line = restrict_line(ProjectiveModel(spec), (1.0, 0.0), (0.0, 1.0))
    generic = metric_tensor(line, [x])[0, 0]
    assert generic == pytest.approx(projective_metric_1d(spec, x), rel=1e-8)


def test_projective_mixing_angle_derivative_squares_to_the_metric() -> None:
    spec = ProjectiveSpec(dim=8, overlap=0.2)
    x, step = 0.37, 1e-5
    slope = (projective_mixing_angle(spec, x + step) - projective_mixing_angle(spec, x - step)) / (2 * step)
    assert slope**2 == pytest.approx(projective_metric_1d(spec, x), rel=1e-6)


def test_projective_geodesic_endpoints() -> None:
    spec = ProjectiveSpec(dim=16, overlap=0.25)
    np.testing.assert_allclose(projective_geodesic(spec, [0.0, 0.5, 1.0]), [0.0, 0.5, 1.0], atol=1e-12)


@pytest.mark.parametrize(
    ("dim", "overlap"),
    [(1, 0.5), (4, 0.0), (4, 1.0)],
)
def test_projective_spec_rejects_invalid_parameters(dim: int, overlap: float) -> None:
    with pytest.raises(ValueError):
        ProjectiveSpec(dim=dim, overlap=overlap)


def test_ising_single_mode_angle_and_metric_at_origin() -> None:
    spec = IsingSpec(m=1)
    assert ising_theta(spec, 1, (0.0, 1.0)) == pytest.approx(np.pi / 6, abs=1e-14)
    assert ising_q(spec, 0.0) == pytest.approx(3.0 / 16.0, abs=1e-14)
    assert ising_theta(spec, 1, (1.0, 0.0)) == 0.0


def test_ising_theta_rejects_vanishing_mode() -> None:
    with pytest.raises(DegenerateMode, match="vanishing denominator"):
        ising_theta(IsingSpec(m=2), 1, (0.0, 0.0))
    with pytest.raises(ValueError, match="mode index"):
        ising_theta(IsingSpec(m=2), 3, (1.0, 0.2))


@pytest.mark.parametrize("m", [1, 2])
def test_ising_analytic_metric_matches_full_chain(m: int) -> None:
    spec = IsingSpec(m=m, mode=IsingMode.FULL)
    point = np.array([1.0, 0.4])
    generic = metric_tensor(IsingChainModel(spec), point)
    np.testing.assert_allclose(generic, ising_metric(spec, point), rtol=1e-8, atol=1e-12)


@pytest.mark.parametrize("m", [1, 2])
def test_ising_ground_energy_matches_full_chain(m: int) -> None:
    spec = IsingSpec(m=m, mode=IsingMode.FULL)
    point = (1.0, 0.3)
    spectral = diagonalize(IsingChainModel(spec), point)
    assert spectral.E0 == pytest.approx(ising_ground_energy(spec, point), abs=1e-10)


@pytest.mark.parametrize(("case", "x"), [(IsingCase.I, 0.3), (IsingCase.II, 0.4), (IsingCase.III, 0.6)])
def test_ising_case_metric_is_the_restricted_metric(case: IsingCase, x: float) -> None:
    spec = IsingSpec(m=3)
    origin, direction = case.origin_and_direction()
    tangent = np.asarray(direction)
    restricted = float(tangent @ ising_metric(spec, case.lift(x)) @ tangent)
    assert ising_case_metric(spec, case, x) == pytest.approx(restricted, rel=1e-10)
    np.testing.assert_allclose(case.lift(0.0), origin)


@pytest.mark.parametrize("x", [0.2, 0.3, 0.7])
def test_ising_p_approaches_its_limit_shape(x: float) -> None:
    spec = IsingSpec(m=60)
    assert ising_p(spec, x) / ising_limit_scale(spec) == pytest.approx(ising_p_limit(x), rel=1e-8)


@pytest.mark.parametrize("x", [0.0, 0.3, 0.6])
def test_ising_q_approaches_its_limit_shape(x: float) -> None:
    spec = IsingSpec(m=60)
    assert ising_q(spec, x) / ising_limit_scale(spec) == pytest.approx(ising_q_limit(x), rel=1e-8)


def test_ising_limits_diverge_at_critical_points() -> None:
    assert ising_p_limit(ising_critical_point(IsingCase.I)) == float("inf")
    assert ising_q_limit(ising_critical_point(IsingCase.II)) == float("inf")


def test_ising_closed_form_geodesics_hit_endpoints() -> None:
    s = [0.0, 0.5, 1.0]
    np.testing.assert_allclose(ising_geodesic_closed_form(IsingCase.I, s), [0.0, 0.5, 1.0], atol=1e-14)
    np.testing.assert_allclose(ising_geodesic_closed_form(IsingCase.II, s), [0.0, np.sqrt(0.5), 1.0], atol=1e-14)


def test_ising_full_mode_is_limited_in_size() -> None:
    with pytest.raises(ValueError, match="m <= 5"):
        IsingSpec(m=6, mode=IsingMode.FULL)


@pytest.mark.parametrize("selector", ["balanced", "balanced:3", "balanced:11"])
def test_deutsch_jozsa_balanced_metric(selector: str) -> None:
    spec = DeutschJozsaSpec(n=3, oracle=oracle_from_selector(3, selector))
    assert spec.kind == "balanced"
    assert dj_metric(spec) == pytest.approx(np.pi**2 / 4)
    assert dj_projector_trace(spec) == pytest.approx(np.pi**2 / 2)

    generic = metric_tensor(DeutschJozsaModel(spec), [0.3])[0, 0]
    assert generic == pytest.approx(dj_metric(spec, [0.3]), rel=1e-10)


def test_deutsch_jozsa_constant_oracle_has_flat_zero_metric() -> None:
    spec = DeutschJozsaSpec(n=2, oracle=oracle_from_selector(2, "constant:1"))
    assert spec.kind == "constant"
    assert dj_metric(spec) == 0.0
    assert metric_tensor(DeutschJozsaModel(spec), [0.6])[0, 0] == pytest.approx(0.0, abs=1e-12)


def test_deutsch_jozsa_partial_matches_finite_difference() -> None:
    model = DeutschJozsaModel(DeutschJozsaSpec(n=2, oracle=oracle_from_selector(2, "balanced:5")))
    step = 1e-6
    numeric = (model.evaluate(np.array([0.4 + step])) - model.evaluate(np.array([0.4 - step]))) / (2 * step)
    np.testing.assert_allclose(model.partial(np.array([0.4]), 0), numeric, atol=1e-8)


def test_deutsch_jozsa_geodesic_is_identity() -> None:
    np.testing.assert_allclose(dj_geodesic([0.0, 0.25, 1.0]), [0.0, 0.25, 1.0])


def test_oracle_selectors() -> None:
    assert oracle_from_selector(2, "constant:0") == (0, 0, 0, 0)
    assert oracle_from_selector(2, "balanced") == (0, 0, 1, 1)
    seeded = oracle_from_selector(4, "balanced:7")
    assert seeded == oracle_from_selector(4, "balanced:7")
    assert sum(seeded) == 8


@pytest.mark.parametrize(
    ("selector", "message"),
    [
        ("constant:2", "must be 0 or 1"),
        ("balanced:x", "seed must be an integer"),
        ("random", "unknown oracle selector"),
    ],
)
def test_oracle_selector_errors(selector: str, message: str) -> None:
    with pytest.raises(ConfigError, match=message):
        oracle_from_selector(2, selector)


def test_deutsch_jozsa_spec_rejects_unbalanced_oracle() -> None:
    with pytest.raises(ValueError, match="constant or balanced"):
        DeutschJozsaSpec(n=2, oracle=(0, 0, 0, 1))

from __future__ import annotations

from dataclasses import dataclass
from types import SimpleNamespace
from typing import Any, Sequence

import numpy as np
import pytest
from numpy.typing import ArrayLike

import adiabatic_engine.geodesic.solver as solver_module
from adiabatic_engine.errors import CriticalPointOnPath, GapCollapse, NoConvergence, SingularMetric
from adiabatic_engine.geodesic import (
    GeodesicOptions,
    christoffel,
    euler_lagrange_residual,
    path_length,
    quadrature_geodesic_1d,
    solve_geodesic,
    solve_geodesic_through_critical,
)
from adiabatic_engine.hamiltonian import restrict_line
from adiabatic_engine.hamiltonian.model import control_point
from adiabatic_engine.metric import IsingAnalyticField, MetricSample, ScalarMetricField
from adiabatic_engine.models import (
    DeutschJozsaModel,
    DeutschJozsaSpec,
    IsingCase,
    IsingSpec,
    ProjectiveModel,
    ProjectiveSpec,
    ising_case_metric,
    ising_geodesic_closed_form,
    ising_p_limit,
    oracle_from_selector,
    projective_geodesic,
    projective_metric_1d,
)
from adiabatic_engine.schedule import ControlPath


@dataclass(frozen=True)
class _PolarField:
    """Flat plane in polar coordinates: g = diag(1, r^2)."""

    name: str = "polar"
    param_dim: int = 2
    singular_points: Sequence[float] = ()

    def sample(self, x: ArrayLike) -> MetricSample:
        point = control_point(x, 2)
        return MetricSample(x=point, g=np.diag([1.0, float(point[0]) ** 2]))


@dataclass(frozen=True)
class _DegenerateField:
    name: str = "rank-one"
    param_dim: int = 2
    singular_points: Sequence[float] = ()

    def sample(self, x: ArrayLike) -> MetricSample:
        return MetricSample(x=control_point(x, 2), g=np.ones((2, 2)))


def _dj_model() -> DeutschJozsaModel:
    return DeutschJozsaModel(DeutschJozsaSpec(n=2, oracle=oracle_from_selector(2, "balanced")))


def test_christoffel_of_one_dimensional_metric() -> None:
    field = ScalarMetricField(label="quadratic", metric=lambda x: x**2 + 1.0)
    connection = christoffel(field, 0.5)

    # Gamma = g' / (2 g)
    assert connection.gamma[0, 0, 0] == pytest.approx(0.4, rel=1e-8)
    assert connection.symmetry_defect() == 0.0


def test_christoffel_of_polar_coordinates() -> None:
    connection = christoffel(_PolarField(), [2.0, 0.3])

    assert connection.gamma[0, 1, 1] == pytest.approx(-2.0, rel=1e-8)
    assert connection.gamma[1, 0, 1] == pytest.approx(0.5, rel=1e-8)
    assert connection.gamma[1, 1, 0] == pytest.approx(0.5, rel=1e-8)
    assert connection.gamma[0, 0, 0] == pytest.approx(0.0, abs=1e-10)
    np.testing.assert_allclose(connection.acceleration([0.0, 1.0]), [2.0, 0.0], atol=1e-8)


def test_singular_metric_is_rejected() -> None:
    with pytest.raises(SingularMetric, match="condition number"):
        christoffel(_DegenerateField(), [0.0, 0.0])


def test_deutsch_jozsa_geodesic_is_the_straight_line() -> None:
    path = solve_geodesic(_dj_model(), [0.0], [1.0], GeodesicOptions(mesh=33))

    np.testing.assert_allclose(path.x[:, 0], path.s, atol=1e-6)
    assert path.metadata["method"] in ("shooting", "collocation")


def test_deutsch_jozsa_line_length() -> None:
    length = path_length(_dj_model(), ControlPath.linear([0.0], [1.0]))
    assert length == pytest.approx(np.pi / 2.0, rel=1e-6)


@pytest.mark.parametrize("overlap", [0.125, 0.25, 0.5])
def test_projective_quadrature_geodesic_matches_closed_form(overlap: float) -> None:
    spec = ProjectiveSpec(dim=4, overlap=overlap)
    path = quadrature_geodesic_1d(lambda x: projective_metric_1d(spec, x), 0.0, 1.0, knots=101)

    assert path.sup_distance(lambda s: projective_geodesic(spec, s)) < 1e-6
    assert path.metadata["method"] == "quadrature"


def test_projective_overlap_half_reaches_one_third_at_quarter_time() -> None:
    spec = ProjectiveSpec(dim=4, overlap=0.5)
    assert float(projective_geodesic(spec, 0.25)) == pytest.approx(1.0 / 3.0, rel=1e-12)
    path = quadrature_geodesic_1d(lambda x: projective_metric_1d(spec, x), 0.0, 1.0, knots=5)
    assert float(path.x[1, 0]) == pytest.approx(1.0 / 3.0, abs=1e-8)


def test_projective_geodesic_from_diagonalization() -> None:
    spec = ProjectiveSpec(dim=4, overlap=0.5)
    line = restrict_line(ProjectiveModel(spec), (1.0, 0.0), (0.0, 1.0))

    quadrature = quadrature_geodesic_1d(line, 0.0, 1.0, knots=41)
    shooting = solve_geodesic(line, [0.0], [1.0], GeodesicOptions(mesh=41))

    assert quadrature.sup_distance(lambda s: projective_geodesic(spec, s)) < 1e-6
    assert shooting.sup_distance(lambda s: projective_geodesic(spec, s)) < 1e-4
    assert float(np.max(euler_lagrange_residual(line, shooting))) < 1e-2


def test_geodesic_velocity_keeps_constant_speed() -> None:
    spec = ProjectiveSpec(dim=4, overlap=0.25)
    path = quadrature_geodesic_1d(lambda x: projective_metric_1d(spec, x), 0.0, 1.0, knots=51)
    speeds = [
        np.sqrt(projective_metric_1d(spec, float(x[0]))) * abs(float(v[0]))
        for x, v in zip(path.x, path.velocity, strict=True)
    ]
    np.testing.assert_allclose(speeds, path.metadata["length"], rtol=1e-6)


def test_ising_case_ii_approaches_thermodynamic_geodesic() -> None:
    spec = IsingSpec(m=100)
    path = quadrature_geodesic_1d(
        lambda x: ising_case_metric(spec, IsingCase.II, x), 0.0, 1.0, knots=101
    )
    assert path.sup_distance(lambda s: ising_geodesic_closed_form(IsingCase.II, s)) < 2e-3


def test_ising_case_i_limit_crosses_the_singularity() -> None:
    field = ScalarMetricField(label="p-limit", metric=ising_p_limit, singular_points=(0.5,))
    path = quadrature_geodesic_1d(field, 0.0, 1.0, knots=201)

    assert path.metadata["singular_points"] == [0.5]
    assert path.sup_distance(lambda s: ising_geodesic_closed_form(IsingCase.I, s)) < 1e-5
    assert float(path.position(0.5)[0]) == pytest.approx(0.5, abs=1e-8)


def test_ising_geodesics_are_monotone_in_chain_length() -> None:
    reference = lambda s: ising_geodesic_closed_form(IsingCase.II, s)  # noqa: E731
    distances = []
    for m in (1, 4, 10, 30):
        spec = IsingSpec(m=m)
        path = quadrature_geodesic_1d(
            lambda x, spec=spec: ising_case_metric(spec, IsingCase.II, x), 0.0, 1.0, knots=101
        )
        distances.append(path.sup_distance(reference))
    assert distances == sorted(distances, reverse=True)


def test_splice_through_critical_point_follows_quadrature() -> None:
    field = ScalarMetricField(label="p-limit", metric=ising_p_limit, singular_points=(0.5,))
    splice = solve_geodesic_through_critical(
        field, 0.0, 1.0, 0.5, eta=0.1, knots=101, options=GeodesicOptions(mesh=41)
    )

    assert splice.s_c == pytest.approx(0.5, abs=1e-8)
    assert splice.sup_distance < 1e-4
    assert splice.path.sup_distance(lambda s: ising_geodesic_closed_form(IsingCase.I, s)) < 1e-3
    assert set(splice.to_dict()) == {"s_c", "eta", "sup_distance", "velocity_jumps", "residuals"}


def test_splice_rejects_critical_point_outside_segment() -> None:
    with pytest.raises(ValueError, match="not strictly between"):
        solve_geodesic_through_critical(lambda x: 1.0, 0.0, 1.0, 1.5)


def test_two_parameter_ising_metric_is_degenerate_along_rays() -> None:
    # the ground state depends on x2 / x1 only
    field = IsingAnalyticField(IsingSpec(m=2))
    point = np.array([1.0, 0.3])

    np.testing.assert_allclose(field.sample(point).g @ point, 0.0, atol=1e-12)
    with pytest.raises(SingularMetric):
        christoffel(field, point)
    with pytest.raises(SingularMetric, match="shooting"):
        solve_geodesic(field, [1.0, 0.1], [1.0, 0.5], GeodesicOptions(mesh=17))


def test_identical_endpoints_give_a_constant_path() -> None:
    path = solve_geodesic(_dj_model(), [0.3], [0.3])
    assert path.metadata["method"] == "trivial"
    np.testing.assert_allclose(path.x, 0.3)


def _grover_field() -> ScalarMetricField:
    spec = ProjectiveSpec(dim=4, overlap=0.5)
    return ScalarMetricField(label="grover", metric=lambda x: projective_metric_1d(spec, x))


@pytest.mark.parametrize("method", ["shooting", "collocation"])
def test_geodesic_residual_is_measured_on_the_dense_solution(method: str) -> None:
    spec = ProjectiveSpec(dim=4, overlap=0.5)
    path = solve_geodesic(_grover_field(), [0.0], [1.0], GeodesicOptions(method=method))

    assert path.metadata["method"] == method
    assert path.metadata["residual"] <= GeodesicOptions().residual_tol
    assert path.sup_distance(lambda s: projective_geodesic(spec, s)) < 1e-6


def test_residual_above_tolerance_rejects_every_solver(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setattr(
        solver_module._GeodesicSystem, "dense_residual", lambda self, knots, values, slopes: 1.0
    )

    with pytest.raises(NoConvergence, match="Euler-Lagrange residual") as info:
        solve_geodesic(_grover_field(), [0.0], [1.0])
    assert "shooting" in str(info.value)
    assert "collocation" in str(info.value)


def test_geodesic_through_collapsed_gap_is_a_critical_point(monkeypatch: pytest.MonkeyPatch) -> None:
    original = solver_module.path_error_functional

    def _collapsing(source: Any, path: ControlPath, **kwargs: Any) -> Any:
        if path.label == "geodesic":
            raise GapCollapse("gap 0.0 at or below the floor")
        return original(source, path, **kwargs)

    monkeypatch.setattr(solver_module, "path_error_functional", _collapsing)

    with pytest.raises(CriticalPointOnPath, match="collapsed gap"):
        solve_geodesic(_grover_field(), [0.0], [1.0], GeodesicOptions(method="shooting"))


def test_singular_straight_line_only_skips_the_length_comparison(
    monkeypatch: pytest.MonkeyPatch,
) -> None:
    original = solver_module.path_error_functional

    def _collapsing(source: Any, path: ControlPath, **kwargs: Any) -> Any:
        if path.label == "linear":
            raise GapCollapse("gap 0.0 at or below the floor")
        return original(source, path, **kwargs)

    monkeypatch.setattr(solver_module, "path_error_functional", _collapsing)

    path = solve_geodesic(_grover_field(), [0.0], [1.0], GeodesicOptions(method="shooting"))
    assert path.metadata["length"] > 0.0
    assert "straight_length" not in path.metadata


@pytest.mark.parametrize(("excess", "accepted"), [(0.0, True), (5e-9, True), (5e-8, False)])
def test_length_comparison_allows_the_relative_quadrature_slack(
    monkeypatch: pytest.MonkeyPatch, excess: float, accepted: bool
) -> None:
    # straight length 1: the bound is 1 * (1 + path_rel_tol) + length_slack = 1 + 1.1e-8
    def _lengths(_source: Any, path: ControlPath, **_kwargs: Any) -> SimpleNamespace:
        return SimpleNamespace(total_length=1.0 + excess if path.label == "geodesic" else 1.0)

    monkeypatch.setattr(solver_module, "path_error_functional", _lengths)
    options = GeodesicOptions(method="shooting")

    if accepted:
        path = solve_geodesic(_grover_field(), [0.0], [1.0], options)
        assert path.metadata["straight_length"] == 1.0
        assert path.metadata["length"] == 1.0 + excess
    else:
        with pytest.raises(NoConvergence, match="longer than the straight line"):
            solve_geodesic(_grover_field(), [0.0], [1.0], options)


@pytest.mark.parametrize("overrides", [{"residual_tol": 0.0}, {"length_slack": -1e-9}])
def test_geodesic_options_reject_nonpositive_tolerances(overrides: dict[str, float]) -> None:
    with pytest.raises(ValueError, match="residual_tol"):
        GeodesicOptions(**overrides)  # type: ignore[arg-type]

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from adiageo.cli import main


def _summary(out: Path) -> dict[str, Any]:
    return json.loads((out / "summary.json").read_text(encoding="utf-8"))


def _rows(csv_path: Path) -> list[dict[str, str]]:
    with csv_path.open("r", encoding="utf-8", newline="") as handle:
        return list(csv.DictReader(handle))


def test_metric_of_balanced_deutsch_jozsa_is_flat(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(["metric", "--model", "dj", "--points", "5", "--out", str(tmp_path)])

    assert rc == 0
    assert "Completed : 5" in capsys.readouterr().out
    rows = _rows(tmp_path / "metric.csv")
    assert [float(row["x"]) for row in rows] == pytest.approx([0.0, 0.25, 0.5, 0.75, 1.0])
    for row in rows:
        assert float(row["g"]) == pytest.approx(np.pi**2 / 4, rel=1e-9)
        assert float(row["tr_dp2"]) == pytest.approx(np.pi**2 / 2, rel=1e-9)
        assert float(row["gap"]) == pytest.approx(1.0, rel=1e-9)
        assert row["g0"] == "1"
        assert "g_tilde" in row
    assert (tmp_path / "config.json").is_file()
    assert (tmp_path / "metric.json").is_file()
    assert _summary(tmp_path)["rows"] == 5


def test_metric_skips_excluded_critical_point(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(
        [
            "metric",
            "--model",
            "ising",
            "--param",
            "case=i",
            "--param",
            "limit=true",
            "--points",
            "11",
            "--exclude",
            "0.5",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    rows = _rows(tmp_path / "metric.csv")
    assert len(rows) == 10
    assert all(abs(float(row["x"]) - 0.5) > 1e-9 for row in rows)
    assert "g_tilde" not in rows[0]


def test_config_file_is_merged_with_flags(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = tmp_path / "metric.json"
    config.write_text(
        json.dumps({"command": "metric", "model": {"name": "dj", "params": {"n": 3}}, "grid": {"points": 3}}),
        encoding="utf-8",
    )
    out = tmp_path / "out"

    rc = main(["metric", "--config", str(config), "--points", "4", "--out", str(out)])

    assert rc == 0
    capsys.readouterr()
    assert len(_rows(out / "metric.csv")) == 4
    written = json.loads((out / "config.json").read_text(encoding="utf-8"))
    assert written["model"]["params"]["n"] == 3
    assert written["grid"]["points"] == 4


def test_geodesic_of_deutsch_jozsa_is_the_straight_line(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(["geodesic", "--model", "dj", "--mesh", "33", "--out", str(tmp_path)])

    assert rc == 0
    capsys.readouterr()
    rows = _rows(tmp_path / "path.csv")
    assert list(rows[0]) == ["s", "x", "v", "speed", "epsilon"]
    for row in rows:
        assert float(row["x"]) == pytest.approx(float(row["s"]), abs=1e-6)
    record = _summary(tmp_path)["paths"][0]
    assert record["sup_distance_closed_form"] < 1e-6
    sidecar = json.loads((tmp_path / "path.json").read_text(encoding="utf-8"))
    assert sidecar["metadata"]["method"] in ("shooting", "collocation")

    speeds = np.array([float(row["speed"]) for row in rows])
    epsilon = np.array([float(row["epsilon"]) for row in rows])
    assert np.all(np.isfinite(speeds))
    # constant speed along a geodesic
    np.testing.assert_allclose(speeds, speeds[0], rtol=1e-5)
    assert epsilon[0] == 0.0
    assert np.all(np.diff(epsilon) >= 0.0)
    assert epsilon[-1] == pytest.approx(sidecar["epsilon"], rel=1e-12)
    assert sidecar["singular_knots"] == 0


def test_projective_quadrature_geodesic_matches_closed_form(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    rc = main(
        [
            "geodesic",
            "--model",
            "grover",
            "--param",
            "dim=16",
            "--param",
            "analytic=true",
            "--path",
            "quadrature",
            "--knots",
            "41",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    assert _summary(tmp_path)["paths"][0]["sup_distance_closed_form"] < 1e-6
    assert len(_rows(tmp_path / "path.csv")) == 41


def test_ising_size_sweep_approaches_the_limit(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(
        [
            "geodesic",
            "--model",
            "ising",
            "--param",
            "case=ii",
            "--sweep-m",
            "10,1,4",
            "--path",
            "quadrature",
            "--knots",
            "101",
            "--workers",
            "2",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    summary = _summary(tmp_path)
    assert [record["m"] for record in summary["paths"]] == [1, 4, 10]
    assert summary["monotone_in_m"] is True
    assert summary["limit"] == "limit"
    for name in ("path_m1.csv", "path_m4.csv", "path_m10.csv", "limit.csv"):
        assert (tmp_path / name).is_file()
    for name in ("path_m4.csv", "limit.csv"):
        header = list(_rows(tmp_path / name)[0])
        assert header[-2:] == ["speed", "epsilon"]


def test_constant_hamiltonian_has_no_adiabatic_error(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(
        [
            "propagate",
            "--model",
            "projective",
            "--path",
            "constant",
            "--T",
            "5,10",
            "--record-knots",
            "33",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    summary = _summary(tmp_path)
    assert [run["T"] for run in summary["runs"]] == [5.0, 10.0]
    assert all(run["delta"] < 1e-10 for run in summary["runs"])
    assert summary["delta_slope"] is None
    assert (tmp_path / "path.csv").is_file()
    assert list(_rows(tmp_path / "path.csv")[0])[-2:] == ["speed", "epsilon"]


def test_ising_linear_schedule_respects_fidelity_bound(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(
        [
            "propagate",
            "--model",
            "ising",
            "--param",
            "m=1",
            "--param",
            "mode=full",
            "--path",
            "linear",
            "--T",
            "40",
            "--record-knots",
            "21",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    rows = _rows(tmp_path / "propagate_T40.csv")
    assert len(rows) == 21
    assert all(row["fidelity_bound"] == "true" for row in rows)
    assert max(float(row["intertwining"]) for row in rows) < 1e-7
    record = json.loads((tmp_path / "run_T40.json").read_text(encoding="utf-8"))
    assert record["fidelity_bound_holds"] is True
    assert record["dim"] == 8


@pytest.mark.slow
def test_grover_adiabatic_error_scales_inversely_with_time(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    rc = main(
        [
            "propagate",
            "--model",
            "grover",
            "--path",
            "linear",
            "--T",
            "25,50,100,200",
            "--record-knots",
            "65",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    slope = _summary(tmp_path)["delta_slope"]
    assert -1.3 <= slope["exponent"] <= -0.7


def test_fit_geodesic_exponent_at_ising_critical_point(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(["fit", "--model", "ising", "--kind", "geodesic_exponent", "--out", str(tmp_path)])

    assert rc == 0
    capsys.readouterr()
    report = _summary(tmp_path)["report"]
    assert report["exponent"] == pytest.approx(2.0, abs=0.02)
    assert report["theoretical"] == pytest.approx(2.0)
    assert len(_rows(tmp_path / "fit_series.csv")) == report["samples"]


def test_fit_metric_divergence_at_ising_critical_point(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(["fit", "--model", "ising", "--kind", "metric_divergence", "--out", str(tmp_path)])

    assert rc == 0
    capsys.readouterr()
    report = _summary(tmp_path)["report"]
    assert report["exponent"] == pytest.approx(-1.0, abs=0.05)
    assert report["theoretical"] == pytest.approx(-1.0)
    assert report["deviation"] < 0.05


def test_fit_synthetic_series_recovers_planted_exponent(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    rc = main(["fit", "--kind", "synthetic", "--seed", "7", "--out", str(tmp_path)])

    assert rc == 0
    capsys.readouterr()
    report = json.loads((tmp_path / "fit.json").read_text(encoding="utf-8"))["report"]
    assert report["exponent"] == pytest.approx(1.5, abs=0.05)
    assert report["theoretical"] == 1.5


def test_fit_series_from_csv_with_window(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    series = tmp_path / "series.csv"
    t = np.geomspace(1e-4, 1.0, 40)
    lines = ["time,value", *(f"{a!r},{3.0 * a**-0.5!r}" for a in t)]
    series.write_text("\n".join(lines) + "\n", encoding="utf-8")
    out = tmp_path / "out"

    rc = main(
        [
            "fit",
            "--kind",
            "series",
            "--input",
            str(series),
            "--t-column",
            "time",
            "--y-column",
            "value",
            "--window",
            "1e-3,1e-1",
            "--out",
            str(out),
        ]
    )

    assert rc == 0
    capsys.readouterr()
    report = _summary(out)["report"]
    assert report["exponent"] == pytest.approx(-0.5, abs=1e-10)
    assert report["prefactor"] == pytest.approx(3.0, rel=1e-8)
    assert report["window"] == [1e-3, 1e-1]


def test_fit_finite_size_reports_both_halves(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = main(["fit", "--model", "ising", "--kind", "finite_size", "--sizes", "5,10,20,40", "--out", str(tmp_path)])

    assert rc == 0
    capsys.readouterr()
    report = _summary(tmp_path)["report"]
    assert set(report) == {"overall", "small_sizes", "large_sizes", "theoretical_large_sizes"}
    assert report["theoretical_large_sizes"] == pytest.approx(1.0)


def test_identical_runs_write_identical_csv(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    argv = ["geodesic", "--model", "grover", "--path", "quadrature", "--knots", "33"]
    assert main([*argv, "--out", str(tmp_path / "a")]) == 0
    assert main([*argv, "--out", str(tmp_path / "b")]) == 0
    capsys.readouterr()

    assert (tmp_path / "a" / "path.csv").read_bytes() == (tmp_path / "b" / "path.csv").read_bytes()

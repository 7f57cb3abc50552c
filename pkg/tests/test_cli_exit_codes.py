from __future__ import annotations

import json
from pathlib import Path

import pytest

import adiageo.cli as cli_module
from adiabatic_engine.errors import StepLimitExceeded
from adiabatic_engine.journal import read_journal


def _error_document(capsys: pytest.CaptureFixture[str]) -> dict[str, object]:
    err = capsys.readouterr().err.strip().splitlines()
    return json.loads(err[-1])


def test_unknown_model_returns_2_with_error_json(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = cli_module.main(["metric", "--model", "heisenberg", "--out", str(tmp_path)])

    document = _error_document(capsys)
    assert rc == 2
    assert document["error"] == "ConfigError"
    assert document["exit_code"] == 2
    assert "Unknown model 'heisenberg'" in str(document["message"])


def test_config_for_another_command_returns_2(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    config = tmp_path / "fit.json"
    config.write_text(json.dumps({"command": "fit"}), encoding="utf-8")

    rc = cli_module.main(["metric", "--config", str(config), "--out", str(tmp_path / "out")])

    assert rc == 2
    assert "not 'metric'" in str(_error_document(capsys)["message"])


def test_grid_bounds_of_wrong_dimension_return_2(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = cli_module.main(["metric", "--model", "dj", "--lower", "0,0", "--upper", "1,1", "--out", str(tmp_path)])

    assert rc == 2
    assert "grid bounds need 1 coordinates" in str(_error_document(capsys)["message"])


def test_series_fit_without_input_returns_2(tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
    rc = cli_module.main(["fit", "--kind", "series", "--out", str(tmp_path)])

    assert rc == 2
    assert "needs fit.input" in str(_error_document(capsys)["message"])


def test_sparse_series_fit_returns_2_and_journals_failure(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    series = tmp_path / "series.csv"
    series.write_text("t,y\n0.01,1.0\n0.02,2.0\n", encoding="utf-8")
    out = tmp_path / "out"

    rc = cli_module.main(["fit", "--kind", "series", "--input", str(series), "--out", str(out)])

    assert rc == 2
    assert _error_document(capsys)["error"] == "InsufficientSamples"
    events = read_journal(out / "journal.jsonl")
    assert events[-1]["event"] == "item_failed"
    assert events[-1]["data"]["item"] == "series"


def test_degenerate_two_parameter_geodesic_is_a_partial_failure(
    tmp_path: Path, capsys: pytest.CaptureFixture[str]
) -> None:
    rc = cli_module.main(["geodesic", "--model", "ising", "--param", "m=2", "--mesh", "17", "--out", str(tmp_path)])

    assert rc == 1
    assert "Failed    : 1" in capsys.readouterr().out
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert summary["failed"] == 1
    assert summary["paths"] == []
    failures = [event for event in read_journal(tmp_path / "journal.jsonl") if event["event"] == "item_failed"]
    assert failures[0]["data"]["error"] == "SingularMetric"


def test_failed_total_time_keeps_other_runs(
    tmp_path: Path, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]
) -> None:
    import adiabatic_engine.runs.propagate_run as propagate_module

    original = propagate_module.run_propagation

    def _flaky(model, path, T, **kwargs):  # type: ignore[no-untyped-def]
        if T > 5.0:
            raise StepLimitExceeded(f"V at T={T}: too many steps")
        return original(model, path, T, **kwargs)

    monkeypatch.setattr(propagate_module, "run_propagation", _flaky)

    rc = cli_module.main(
        [
            "propagate",
            "--model",
            "projective",
            "--path",
            "linear",
            "--T",
            "2,8",
            "--record-knots",
            "17",
            "--out",
            str(tmp_path),
        ]
    )

    assert rc == 1
    capsys.readouterr()
    assert (tmp_path / "propagate_T2.csv").is_file()
    assert not (tmp_path / "propagate_T8.csv").exists()
    summary = json.loads((tmp_path / "summary.json").read_text(encoding="utf-8"))
    assert [run["T"] for run in summary["runs"]] == [2.0]
    assert summary["delta_slope"] is None


def test_bad_number_list_is_an_argparse_error(capsys: pytest.CaptureFixture[str]) -> None:
    with pytest.raises(SystemExit) as excinfo:
        cli_module.main(["propagate", "--T", "ten,twenty"])
    assert excinfo.value.code == 2
    assert "comma-separated numbers" in capsys.readouterr().err

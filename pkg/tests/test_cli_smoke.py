"""
CLI smoke tests.

These tests only check that the entrypoint is wired, that help output for the
root command and every subcommand does not crash, and that the model registry
prints.
"""

from __future__ import annotations

import json

import pytest

from adiageo.cli import main


def _run_help(argv: list[str]) -> None:
    """Run the CLI expecting argparse to exit cleanly with code 0 for --help."""
    with pytest.raises(SystemExit) as excinfo:
        main(argv)
    assert excinfo.value.code == 0


def test_cli_root_help(capsys: pytest.CaptureFixture[str]) -> None:
    _run_help(["--help"])
    captured = capsys.readouterr()
    assert "usage:" in captured.out.lower()
    assert "adiageo" in captured.out.lower()


@pytest.mark.parametrize("subcommand", ["metric", "geodesic", "propagate", "fit", "models"])
def test_cli_subcommand_help(subcommand: str, capsys: pytest.CaptureFixture[str]) -> None:
    _run_help([subcommand, "--help"])
    out = capsys.readouterr().out.lower()
    assert "usage:" in out
    assert subcommand in out


def test_cli_tolerance_flags_are_listed(capsys: pytest.CaptureFixture[str]) -> None:
    _run_help(["metric", "--help"])
    out = capsys.readouterr().out
    assert "--tol-gap-floor" in out
    assert "--tol-step-tol" in out


def test_cli_models_lists_registry(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["models"]) == 0
    out = capsys.readouterr().out
    for name in ("custom", "deutsch_jozsa", "ising", "projective"):
        assert name in out
    assert "grover" in out


def test_cli_models_json(capsys: pytest.CaptureFixture[str]) -> None:
    assert main(["models", "--json"]) == 0
    entries = json.loads(capsys.readouterr().out)
    names = [entry["name"] for entry in entries]
    assert names == sorted(names)
    ising = next(entry for entry in entries if entry["name"] == "ising")
    assert set(ising["parameters"]) == {"m", "mode", "case", "limit"}

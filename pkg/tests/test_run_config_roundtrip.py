from __future__ import annotations

from typing import Any

import pytest

from adiabatic_engine.errors import ConfigError
from adiabatic_engine.run_config import FitKind, PathKind, RunConfig


def test_minimal_document_takes_defaults() -> None:
    config = RunConfig.from_dict({"command": "metric"})

    assert config.model.name == "projective"
    assert config.grid.points == 11
    assert config.path.kind is PathKind.GEODESIC
    assert config.propagation.T == (10.0, 20.0, 40.0, 80.0)
    assert config.fit.kind is FitKind.GEODESIC_EXPONENT
    assert config.workers is None
    assert config.seed == 0


def test_roundtrip_is_lossless() -> None:
    payload: dict[str, Any] = {
        "command": "propagate",
        "model": {"name": "ising", "params": {"m": 3, "case": "ii"}},
        "path": {"kind": "linear", "start": [0.0], "end": [1.0]},
        "propagation": {"T": [5, 10], "holonomy": True, "dyson_depth": 2},
        "fit": {"kind": "synthetic", "window": [1e-4, 1e-1]},
        "tolerances": {"gap_floor": 1e-7},
        "out": "runs/a",
        "workers": 2,
        "seed": 7,
    }
    config = RunConfig.from_dict(payload)

    assert RunConfig.from_dict(config.to_dict()) == config
    assert config.propagation.T == (5.0, 10.0)
    assert config.tolerances.gap_floor == 1e-7


@pytest.mark.parametrize(
    ("payload", "message"),
    [
        ({}, "Missing required keys"),
        ({"command": "restore"}, "command must be one of"),
        ({"command": "metric", "extra": 1}, "Unknown keys in config: extra"),
        ({"command": "metric", "grid": {"pts": 3}}, "Unknown keys in grid: pts"),
        ({"command": "geodesic", "path": {"kind": "spline"}}, "unknown path.kind"),
        ({"command": "geodesic", "path": {"kind": "file"}}, "needs path.file"),
        ({"command": "propagate", "propagation": {"T": []}}, "non-empty list"),
        ({"command": "propagate", "propagation": {"dyson_depth": 9}}, "dyson_depth"),
        ({"command": "fit", "fit": {"kind": "series"}}, "needs fit.input"),
        ({"command": "fit", "fit": {"window": [0.1, 0.01]}}, "fit.window"),
        ({"command": "fit", "fit": {"samples": 3}}, "at least 5"),
        ({"command": "fit", "fit": {"sizes": [1.5]}}, "list of integers"),
        ({"command": "metric", "workers": 0}, "workers must be positive"),
        ({"command": "metric", "model": []}, "model must be an object"),
    ],
)
def test_invalid_documents_raise_config_error(payload: dict[str, Any], message: str) -> None:
    with pytest.raises(ConfigError, match=message):
        RunConfig.from_dict(payload)

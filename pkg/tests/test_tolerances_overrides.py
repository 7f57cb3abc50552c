from __future__ import annotations

import pytest

from adiabatic_engine.errors import ConfigError
from adiabatic_engine.tolerances import DEFAULT_TOLERANCES, Tolerances


def test_defaults_match_documented_values() -> None:
    tol = Tolerances()
    assert tol.degeneracy_rel == 1e-8
    assert tol.gap_floor == 1e-10
    assert tol.fd_rel_step == 1e-5
    assert tol.singular_condition == 1e12
    assert tol.polar_threshold == 1e-12


def test_with_overrides_replaces_only_named_fields() -> None:
    tol = DEFAULT_TOLERANCES.with_overrides({"gap_floor": 1e-6, "step_tol": 2})

    assert tol.gap_floor == 1e-6
    assert tol.step_tol == 2.0
    assert isinstance(tol.step_tol, float)
    assert tol.degeneracy_rel == DEFAULT_TOLERANCES.degeneracy_rel


def test_with_overrides_rejects_unknown_keys() -> None:
    with pytest.raises(ConfigError, match="Unknown tolerance keys: bogus"):
        DEFAULT_TOLERANCES.with_overrides({"bogus": 1.0})


@pytest.mark.parametrize("value", [0.0, -1e-3])
def test_non_positive_tolerance_is_rejected(value: float) -> None:
    with pytest.raises(ConfigError, match="positive float"):
        Tolerances(gap_floor=value)


def test_dict_roundtrip_is_lossless() -> None:
    tol = DEFAULT_TOLERANCES.with_overrides({"shooting_tol": 1e-10})
    assert Tolerances.from_dict(tol.to_dict()) == tol


def test_scaled_thresholds() -> None:
    tol = Tolerances()
    assert tol.degeneracy_tol(0.5) == pytest.approx(1e-8)
    assert tol.degeneracy_tol(100.0) == pytest.approx(1e-6)
    assert tol.fd_step(-20.0) == pytest.approx(2e-4)

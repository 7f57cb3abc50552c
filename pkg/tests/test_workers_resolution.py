from __future__ import annotations

import threading

import pytest

from adiabatic_engine.errors import ConfigError, GapCollapse
from adiabatic_engine.workers import WORKERS_ENV, map_ordered, resolve_workers


def test_flag_beats_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(WORKERS_ENV, "8")
    assert resolve_workers(3) == 3


def test_environment_beats_default(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv(WORKERS_ENV, "4")
    assert resolve_workers() == 4


def test_default_is_one_worker(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert resolve_workers() == 1


@pytest.mark.parametrize("raw", ["zero", "0", "-2"])
def test_bad_environment_value_is_rejected(monkeypatch: pytest.MonkeyPatch, raw: str) -> None:
    monkeypatch.setenv(WORKERS_ENV, raw)
    with pytest.raises(ConfigError, match=WORKERS_ENV):
        resolve_workers()


def test_map_ordered_keeps_input_order_with_threads() -> None:
    seen: set[str] = set()
    lock = threading.Lock()

    def square(value: int) -> int:
        with lock:
            seen.add(threading.current_thread().name)
        return value * value

    outcomes = map_ordered(square, list(range(20)), workers=4)

    assert [outcome.item for outcome in outcomes] == list(range(20))
    assert [outcome.value for outcome in outcomes] == [value * value for value in range(20)]
    assert all(outcome.ok for outcome in outcomes)


def test_map_ordered_captures_domain_errors_per_item() -> None:
    def fragile(value: int) -> int:
        if value == 2:
            raise GapCollapse("gap closed")
        return value

    outcomes = map_ordered(fragile, [1, 2, 3], workers=2)

    assert [outcome.ok for outcome in outcomes] == [True, False, True]
    assert isinstance(outcomes[1].error, GapCollapse)
    assert outcomes[2].value == 3


def test_map_ordered_propagates_programming_errors() -> None:
    def broken(value: int) -> int:
        raise KeyError(value)

    with pytest.raises(KeyError):
        map_ordered(broken, [1], workers=1)

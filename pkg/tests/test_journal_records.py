from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone
from pathlib import Path

import numpy as np

from adiabatic_engine.clock import FixedClock, SteppingClock
from adiabatic_engine.errors import GapCollapse
from adiabatic_engine.journal import RunJournal, read_journal


def test_journal_appends_jsonl_records(tmp_path: Path) -> None:
    journal_path = tmp_path / "journal.jsonl"
    clock = FixedClock(datetime(2024, 1, 1, 12, 0, tzinfo=timezone.utc))

    journal = RunJournal(journal_path, clock=clock)
    journal.append("event_one", {"a": 1})
    journal.append("event_two", {"b": "x"})

    lines = journal_path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 2

    first = json.loads(lines[0])
    assert first["ts"] == "2024-01-01T12:00:00+00:00"
    assert first["event"] == "event_one"
    assert first["data"] == {"a": 1}
    assert json.loads(lines[1])["data"] == {"b": "x"}


def test_journal_lifecycle_events(tmp_path: Path) -> None:
    clock = SteppingClock(datetime(2024, 1, 1), step=timedelta(seconds=2))
    journal = RunJournal(tmp_path / "journal.jsonl", clock=clock)

    journal.run_started("metric", {"command": "metric"})
    journal.item_completed("x=0.5", {"g": np.float64(0.25), "entries": np.arange(2)})
    journal.item_failed("x=0.75", GapCollapse("gap 1e-12 below floor"))
    journal.run_completed(completed=1, failed=1)

    records = read_journal(journal.path)
    assert [record["event"] for record in records] == [
        "run_started",
        "item_completed",
        "item_failed",
        "run_completed",
    ]
    assert records[0]["ts"] == "2024-01-01T00:00:00+00:00"
    assert records[3]["ts"] == "2024-01-01T00:00:06+00:00"
    assert records[1]["data"] == {"item": "x=0.5", "g": 0.25, "entries": [0, 1]}
    assert records[2]["data"] == {
        "item": "x=0.75",
        "error": "GapCollapse",
        "message": "gap 1e-12 below floor",
    }
    assert records[3]["data"] == {"completed": 1, "failed": 1}


def test_fixed_clock_reads_naive_time_as_utc() -> None:
    clock = FixedClock(datetime(2024, 5, 1, 8, 30))
    assert clock.now().tzinfo == timezone.utc

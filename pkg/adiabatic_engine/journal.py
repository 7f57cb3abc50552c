"""
Append-only JSONL run journal.

Each CLI command records ``run_started``, one ``item_completed`` or
``item_failed`` per sweep item, and ``run_completed``. The journal is the only
artifact that carries timestamps.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Mapping

from .artifacts import json_default
from .clock import Clock

RUN_STARTED = "run_started"
ITEM_COMPLETED = "item_completed"
ITEM_FAILED = "item_failed"
RUN_COMPLETED = "run_completed"


@dataclass(frozen=True, slots=True)
class JournalEvent:
    """
    One journal record.

    Attributes
    ----------
    timestamp:
        Event time (timezone-aware).
    event:
        Stable event identifier such as ``item_completed``.
    data:
        JSON-serializable payload.
    """

    timestamp: datetime
    event: str
    data: Mapping[str, Any]

    def to_line(self) -> str:
        return json.dumps(
            {"ts": self.timestamp.isoformat(), "event": self.event, "data": self.data},
            ensure_ascii=False,
            sort_keys=True,
            separators=(",", ":"),
            default=json_default,
        )


class RunJournal:
    """
    Append-only JSONL journal for one run directory.

    Notes
    -----
    Sweep workers report completions from several threads, so appends are
    serialized by a lock; each call writes exactly one line.
    """

    def __init__(self, journal_path: Path, *, clock: Clock) -> None:
        self._journal_path = journal_path
        self._clock = clock
        self._lock = threading.Lock()
        self._journal_path.parent.mkdir(parents=True, exist_ok=True)

    @property
    def path(self) -> Path:
        return self._journal_path

    def append(self, event: str, data: Mapping[str, Any]) -> JournalEvent:
        """
        Append one event record.

        Raises
        ------
        OSError
            If the journal cannot be written.
        TypeError
            If ``data`` is not JSON-serializable.
        """
        record = JournalEvent(timestamp=self._clock.now(), event=event, data=dict(data))
        line = record.to_line()
        with self._lock:
            with self._journal_path.open("a", encoding="utf-8", newline="\n") as handle:
                handle.write(line + "\n")
                handle.flush()
        return record

    def run_started(self, command: str, config: Mapping[str, Any]) -> JournalEvent:
        return self.append(RUN_STARTED, {"command": command, "config": config})

    def item_completed(self, item: str, data: Mapping[str, Any] | None = None) -> JournalEvent:
        return self.append(ITEM_COMPLETED, {"item": item, **dict(data or {})})

    def item_failed(self, item: str, error: BaseException) -> JournalEvent:
        return self.append(
            ITEM_FAILED, {"item": item, "error": type(error).__name__, "message": str(error)}
        )

    def run_completed(self, *, completed: int, failed: int) -> JournalEvent:
        return self.append(RUN_COMPLETED, {"completed": completed, "failed": failed})


def read_journal(journal_path: Path) -> list[dict[str, Any]]:
    """Parse every line of a journal file."""
    with journal_path.open("r", encoding="utf-8") as handle:
        return [json.loads(line) for line in handle if line.strip()]

"""
Shared plumbing for command services: output directory, journal, sweeps.

A command service creates a :class:`RunContext`, fans its sweep items out
through :meth:`RunContext.sweep`, writes artifacts, and returns the
:class:`RunReport` produced by :meth:`RunContext.finish`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence, TypeVar

from ..artifacts import write_json_atomic
from ..clock import Clock, SystemClock
from ..journal import RunJournal
from ..run_config import RunConfig
from ..workers import Outcome, map_ordered, resolve_workers
from .registry import BuiltModel, build_model

_LOGGER = logging.getLogger(__name__)

JOURNAL_NAME = "journal.jsonl"
CONFIG_NAME = "config.json"

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


@dataclass(frozen=True, slots=True)
class RunReport:
    """
    Outcome of one command.

    ``exit_code`` is 0 when every item converged and 1 when at least one
    item failed; partial results are on disk either way.
    """

    command: str
    out_dir: Path
    artifacts: tuple[Path, ...]
    completed: int
    failed: int
    summary: Mapping[str, Any] = field(default_factory=dict)

    @property
    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1


class RunContext:
    """Output directory, journal and worker pool for one command run."""

    def __init__(self, config: RunConfig, *, clock: Clock | None = None) -> None:
        self.config = config
        self.out_dir = Path(config.out).expanduser()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.journal = RunJournal(self.out_dir / JOURNAL_NAME, clock=clock or SystemClock())
        self.workers = resolve_workers(config.workers)
        self._artifacts: list[Path] = []
        self._completed = 0
        self._failed = 0
        write_json_atomic(self.out_dir / CONFIG_NAME, config.to_dict())
        self.journal.run_started(config.command, config.to_dict())
        _LOGGER.info("%s: writing to %s with %d worker(s)", config.command, self.out_dir, self.workers)

    def build_model(self, **overrides: Any) -> BuiltModel:
        """Build the selected model, with parameter overrides (e.g. ``m`` in a sweep)."""
        selection = self.config.model
        return build_model(
            selection.name, {**dict(selection.params), **overrides}, tolerances=self.config.tolerances
        )

    def artifact(self, name: str) -> Path:
        """Register and return an output path inside the run directory."""
        target = self.out_dir / name
        self._artifacts.append(target)
        return target

    def sweep(
        self,
        function: Callable[[ItemT], ResultT],
        items: Sequence[ItemT],
        *,
        label: Callable[[ItemT], str] = str,
        details: Callable[[ResultT], Mapping[str, Any]] | None = None,
    ) -> list[Outcome[ItemT, ResultT]]:
        """Run ``function`` over ``items`` and journal each outcome in input order."""
        outcomes = map_ordered(function, items, workers=self.workers)
        for outcome in outcomes:
            if outcome.error is not None:
                self._failed += 1
                self.journal.item_failed(label(outcome.item), outcome.error)
            else:
                self._completed += 1
                data = None
                if details is not None and outcome.value is not None:
                    data = details(outcome.value)
                self.journal.item_completed(label(outcome.item), data)
        return outcomes

    def record_success(self, item: str, data: Mapping[str, Any] | None = None) -> None:
        """Journal a completed item outside a sweep."""
        self._completed += 1
        self.journal.item_completed(item, data)

    def record_failure(self, item: str, error: BaseException) -> None:
        """Journal a failure outside a sweep (e.g. an aggregate step)."""
        self._failed += 1
        self.journal.item_failed(item, error)

    def finish(self, summary: Mapping[str, Any]) -> RunReport:
        """Write ``summary.json``, close the journal and build the report."""
        summary_path = self.artifact("summary.json")
        write_json_atomic(
            summary_path,
            {
                "command": self.config.command,
                "completed": self._completed,
                "failed": self._failed,
                **dict(summary),
            },
        )
        self.journal.run_completed(completed=self._completed, failed=self._failed)
        return RunReport(
            command=self.config.command,
            out_dir=self.out_dir,
            artifacts=tuple(self._artifacts),
            completed=self._completed,
            failed=self._failed,
            summary=dict(summary),
        )

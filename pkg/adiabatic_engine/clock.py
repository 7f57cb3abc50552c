"""
Time sources for run journals.

Notes
-----
Numerical code never reads the wall clock. Only the run journal records time,
and it receives a Clock so journal tests can pin timestamps. CSV artifacts
carry no timestamps at all.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from typing import Protocol


class Clock(Protocol):
    """Source of timezone-aware timestamps."""

    def now(self) -> datetime:
        """Return the current time (timezone-aware)."""
        ...


@dataclass(frozen=True, slots=True)
class SystemClock:
    """UTC wall clock."""

    def now(self) -> datetime:
        return datetime.now(timezone.utc)


@dataclass(frozen=True, slots=True)
class FixedClock:
    """Clock pinned to one instant; naive datetimes are read as UTC."""

    fixed_time: datetime

    def now(self) -> datetime:
        if self.fixed_time.tzinfo is None:
            return self.fixed_time.replace(tzinfo=timezone.utc)
        return self.fixed_time


@dataclass(slots=True)
class SteppingClock:
    """
    Clock that advances by a fixed increment on every call.

    Attributes
    ----------
    start:
        First returned instant.
    step:
        Increment added after each call.
    """

    start: datetime
    step: timedelta = timedelta(seconds=1)
    _calls: int = field(default=0, init=False, repr=False)

    def now(self) -> datetime:
        base = self.start if self.start.tzinfo is not None else self.start.replace(tzinfo=timezone.utc)
        current = base + self._calls * self.step
        self._calls += 1
        return current

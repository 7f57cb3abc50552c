"""
Worker pool for sweeps over grid points, sizes and total times.

Sweeps fan out with ``joblib.Parallel`` using the threading backend: the
heavy lifting happens inside NumPy/SciPy kernels that release the GIL, and
built models are immutable, so threads can share them. Results come back in
input order regardless of completion order.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from typing import Callable, Generic, Sequence, TypeVar

from joblib import Parallel, delayed

from .errors import AdiabaticEngineError, ConfigError

_LOGGER = logging.getLogger(__name__)

WORKERS_ENV = "ADIAGEO_WORKERS"

ItemT = TypeVar("ItemT")
ResultT = TypeVar("ResultT")


def resolve_workers(requested: int | None = None) -> int:
    """
    Resolve the worker count.

    Preference order
    ----------------
    1) ``requested`` (the ``--workers`` flag or config value)
    2) the ``ADIAGEO_WORKERS`` environment variable
    3) one worker

    Raises
    ------
    ConfigError
        If the chosen value is not a positive integer.
    """
    if requested is not None:
        if requested < 1:
            raise ConfigError(f"worker count must be positive, got {requested}")
        return requested
    raw = os.environ.get(WORKERS_ENV)
    if not raw:
        return 1
    try:
        value = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ConfigError(f"{WORKERS_ENV} must be positive, got {value}")
    return value


@dataclass(frozen=True, slots=True)
class Outcome(Generic[ItemT, ResultT]):
    """Result of one sweep item: a value or the domain error that stopped it."""

    item: ItemT
    value: ResultT | None = None
    error: AdiabaticEngineError | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _run_one(function: Callable[[ItemT], ResultT], item: ItemT) -> Outcome[ItemT, ResultT]:
    try:
        return Outcome(item=item, value=function(item))
    except AdiabaticEngineError as exc:
        _LOGGER.warning("sweep item %r failed: %s: %s", item, type(exc).__name__, exc)
        return Outcome(item=item, error=exc)


def map_ordered(
    function: Callable[[ItemT], ResultT],
    items: Sequence[ItemT],
    *,
    workers: int = 1,
) -> list[Outcome[ItemT, ResultT]]:
    """
    Apply ``function`` to every item; domain errors are captured per item.

    Errors outside the engine hierarchy (programming errors) propagate.
    """
    if workers <= 1 or len(items) <= 1:
        return [_run_one(function, item) for item in items]
    runner = Parallel(n_jobs=min(workers, len(items)), prefer="threads")
    return list(runner(delayed(_run_one)(function, item) for item in items))

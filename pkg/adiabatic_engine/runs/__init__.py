"""Command services behind the ``adiageo`` subcommands."""

from __future__ import annotations

from .context import RunContext, RunReport
from .fit_run import cmd_fit
from .geodesic_run import cmd_geodesic
from .metric_run import cmd_metric
from .propagate_run import cmd_propagate
from .registry import BuiltModel, build_model, list_models, resolve_model

__all__ = [
    "BuiltModel",
    "RunContext",
    "RunReport",
    "build_model",
    "cmd_fit",
    "cmd_geodesic",
    "cmd_metric",
    "cmd_propagate",
    "list_models",
    "resolve_model",
]

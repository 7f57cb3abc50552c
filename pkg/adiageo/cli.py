"""
Command-line interface for adiageo.

Notes
-----
The CLI is thin. It merges ``--config`` with the flags into a
:class:`~adiabatic_engine.run_config.RunConfig` and delegates to the command
services in ``adiabatic_engine.runs``.

Exit codes
----------
- 0: every requested computation converged.
- 1: the command ran, but at least one sweep item failed (partial results on disk).
- 2: invalid input or a domain error; a JSON error document goes to stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import fields
from pathlib import Path
from typing import Any, Callable

from adiabatic_engine.artifacts import read_json
from adiabatic_engine.errors import AdiabaticEngineError, ConfigError
from adiabatic_engine.run_config import FitKind, PathKind, RunConfig
from adiabatic_engine.runs import (
    RunReport,
    cmd_fit,
    cmd_geodesic,
    cmd_metric,
    cmd_propagate,
    list_models,
)
from adiabatic_engine.tolerances import DEFAULT_TOLERANCES, Tolerances

_LOGGER = logging.getLogger(__name__)

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

SERVICES: dict[str, Callable[[RunConfig], RunReport]] = {
    "metric": cmd_metric,
    "geodesic": cmd_geodesic,
    "propagate": cmd_propagate,
    "fit": cmd_fit,
}


def _floats(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _key_value(text: str) -> tuple[str, str]:
    key, separator, value = text.partition("=")
    if not separator or not key.strip():
        raise argparse.ArgumentTypeError(f"expected key=value, got {text!r}")
    return key.strip(), value.strip()


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, default=None, help="JSON run configuration.")
    common.add_argument("--model", default=None, help="Registered model name (see 'models').")
    common.add_argument(
        "--param",
        action="append",
        type=_key_value,
        default=[],
        metavar="KEY=VALUE",
        help="Structural model parameter, repeatable (e.g. --param m=30).",
    )
    common.add_argument("--out", default=None, help="Output directory.")
    common.add_argument(
        "--workers",
        type=int,
        default=None,
        help="Worker threads for sweeps (default: ADIAGEO_WORKERS, else 1).",
    )
    common.add_argument("--seed", type=int, default=None, help="Seed for randomized inputs.")
    common.add_argument(
        "--log-level",
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging level on stderr.",
    )
    for item in fields(Tolerances):
        common.add_argument(
            f"--tol-{item.name.replace('_', '-')}",
            dest=f"tol_{item.name}",
            type=float,
            default=None,
            help=f"Tolerance {item.name} (default {getattr(DEFAULT_TOLERANCES, item.name):g}).",
        )
    return common


def _add_path_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--path",
        dest="path_kind",
        choices=[kind.value for kind in PathKind],
        default=None,
        help="How the schedule is produced (default geodesic).",
    )
    parser.add_argument("--path-file", default=None, help="Path CSV for --path file.")
    parser.add_argument("--start", type=_floats, default=None, help="Start point, e.g. 1,0.")
    parser.add_argument("--end", type=_floats, default=None, help="End point, e.g. 1,0.5.")
    parser.add_argument("--mesh", type=int, default=None, help="Boundary-value solver knots.")
    parser.add_argument(
        "--method",
        choices=["auto", "shooting", "collocation"],
        default=None,
        help="Geodesic boundary-value method.",
    )
    parser.add_argument("--knots", type=int, default=None, help="Output knots of 1-D schedules.")
    parser.add_argument("--eta", type=float, default=None, help="Splice half-width around x_c.")


def _build_parser() -> argparse.ArgumentParser:
    """
    Build the CLI argument parser.

    Returns
    -------
    argparse.ArgumentParser
        Configured parser for the adiageo command-line interface.
    """
    parser = argparse.ArgumentParser(
        prog="adiageo",
        description="Riemannian geometry of adiabatic quantum evolution",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common_parser()

    metric_p = sub.add_parser(
        "metric", parents=[common], help="Sample the metric field over a grid."
    )
    metric_p.add_argument("--points", type=int, default=None, help="Points per grid axis.")
    metric_p.add_argument("--lower", type=_floats, default=None, help="Lower grid corner.")
    metric_p.add_argument("--upper", type=_floats, default=None, help="Upper grid corner.")
    metric_p.add_argument(
        "--exclude", type=_floats, default=None, help="Coordinate values to skip (e.g. 0.5)."
    )

    geodesic_p = sub.add_parser(
        "geodesic", parents=[common], help="Solve for an optimal schedule."
    )
    _add_path_arguments(geodesic_p)
    geodesic_p.add_argument(
        "--sweep-m", type=_ints, default=None, help="Ising sizes, e.g. 1,4,10,30,100."
    )

    propagate_p = sub.add_parser(
        "propagate", parents=[common], help="Propagate a schedule over a list of total times."
    )
    _add_path_arguments(propagate_p)
    propagate_p.add_argument("--T", dest="T", type=_floats, default=None, help="Total times.")
    propagate_p.add_argument("--record-knots", type=int, default=None, help="Stored knots.")
    propagate_p.add_argument("--steps", type=int, default=None, help="Initial Magnus steps.")
    propagate_p.add_argument(
        "--holonomy",
        action="store_true",
        default=None,
        help="Also compute the ground-space holonomy.",
    )
    propagate_p.add_argument("--holonomy-mesh", type=int, default=None, help="Holonomy knots.")
    propagate_p.add_argument("--dyson-depth", type=int, default=None, help="Dyson depth 0..4.")
    propagate_p.add_argument("--dyson-knots", type=int, default=None, help="Dyson mesh knots.")

    fit_p = sub.add_parser("fit", parents=[common], help="Fit a scaling exponent.")
    _add_path_arguments(fit_p)
    fit_p.add_argument(
        "--kind",
        choices=[kind.value for kind in FitKind],
        default=None,
        help="Series to fit (default geodesic_exponent).",
    )
    fit_p.add_argument("--input", default=None, help="CSV with the series.")
    fit_p.add_argument("--t-column", default=None, help="Abscissa column of --input.")
    fit_p.add_argument("--y-column", default=None, help="Ordinate column of --input.")
    fit_p.add_argument("--window", type=_floats, default=None, help="Fit window lower,upper.")
    fit_p.add_argument("--theoretical", type=float, default=None, help="Expected exponent.")
    fit_p.add_argument("--samples", type=int, default=None, help="Generated samples.")
    fit_p.add_argument("--side", choices=["below", "above"], default=None, help="Side of x_c.")
    fit_p.add_argument("--planted-exponent", type=float, default=None)
    fit_p.add_argument("--planted-prefactor", type=float, default=None)
    fit_p.add_argument("--noise", type=float, default=None, help="Relative synthetic noise.")
    fit_p.add_argument("--sizes", type=_ints, default=None, help="Ising sizes m.")

    models_p = sub.add_parser("models", help="List registered models and their parameters.")
    models_p.add_argument("--json", action="store_true", help="Print the registry as JSON.")

    return parser


_SECTION_FLAGS: dict[str, dict[str, str]] = {
    "grid": {"points": "points", "lower": "lower", "upper": "upper", "exclude": "exclude"},
    "path": {
        "path_kind": "kind",
        "path_file": "file",
        "start": "start",
        "end": "end",
        "mesh": "mesh",
        "method": "method",
        "knots": "knots",
        "eta": "eta",
        "sweep_m": "sweep_m",
    },
    "propagation": {
        "T": "T",
        "record_knots": "record_knots",
        "steps": "steps",
        "holonomy": "holonomy",
        "holonomy_mesh": "holonomy_mesh",
        "dyson_depth": "dyson_depth",
        "dyson_knots": "dyson_knots",
    },
    "fit": {
        "kind": "kind",
        "input": "input",
        "t_column": "t_column",
        "y_column": "y_column",
        "window": "window",
        "theoretical": "theoretical",
        "samples": "samples",
        "side": "side",
        "planted_exponent": "planted_exponent",
        "planted_prefactor": "planted_prefactor",
        "noise": "noise",
        "sizes": "sizes",
    },
}


def _section(payload: dict[str, Any], name: str) -> dict[str, Any]:
    current = payload.get(name)
    if current is None:
        current = {}
    elif not isinstance(current, dict):
        raise ConfigError(f"{name} must be an object")
    payload[name] = current
    return current


def build_config(args: argparse.Namespace) -> RunConfig:
    """
    Merge the ``--config`` document with the flags; flags win.

    Raises
    ------
    ConfigError
        If the document is invalid or names another command.
    """
    payload: dict[str, Any] = dict(read_json(args.config)) if args.config is not None else {}
    declared = payload.get("command")
    if declared is not None and declared != args.command:
        raise ConfigError(f"{args.config} is a {declared!r} config, not {args.command!r}")
    payload["command"] = args.command

    model = _section(payload, "model")
    if args.model is not None:
        model["name"] = args.model
    if args.param:
        params = dict(model.get("params") or {})
        params.update(dict(args.param))
        model["params"] = params

    options = vars(args)
    for section, flags in _SECTION_FLAGS.items():
        provided = {key: options[flag] for flag, key in flags.items() if options.get(flag) is not None}
        if provided:
            _section(payload, section).update(provided)

    overrides = {
        item.name: options[f"tol_{item.name}"]
        for item in fields(Tolerances)
        if options.get(f"tol_{item.name}") is not None
    }
    if overrides:
        _section(payload, "tolerances").update(overrides)

    for key in ("out", "workers", "seed"):
        if options.get(key) is not None:
            payload[key] = options[key]
    return RunConfig.from_dict(payload)


def _print_models(as_json: bool) -> None:
    entries = list_models()
    if as_json:
        print(json.dumps(entries, indent=2, sort_keys=True))
        return
    for entry in entries:
        aliases = f" (aliases: {', '.join(entry['aliases'])})" if entry["aliases"] else ""
        print(f"{entry['name']:<12}: {entry['description']}{aliases}")
        for key, text in entry["parameters"].items():
            print(f"    {key:<10}: {text}")


def _print_report(report: RunReport) -> None:
    print(f"Command   : {report.command}")
    print(f"Output    : {report.out_dir}")
    print(f"Completed : {report.completed}")
    print(f"Failed    : {report.failed}")


def _report_error(exc: BaseException) -> int:
    document = {"error": type(exc).__name__, "message": str(exc), "exit_code": 2}
    print(json.dumps(document, sort_keys=True), file=sys.stderr)
    return 2


def main(argv: list[str] | None = None) -> int:
    """
    Run the adiageo CLI.

    Parameters
    ----------
    argv:
        Optional argument vector. If None, arguments are read from sys.argv.

    Returns
    -------
    int
        Exit code (0 converged, 1 partial failure, 2 input or domain error).
    """
    parser = _build_parser()
    args = parser.parse_args(argv)

    if args.command == "models":
        _print_models(bool(args.json))
        return 0

    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)
    service = SERVICES.get(args.command)
    if service is None:
        raise AssertionError(f"Unhandled command: {args.command!r}")
    try:
        config = build_config(args)
        report = service(config)
    except (AdiabaticEngineError, ValueError) as exc:
        _LOGGER.debug("%s failed", args.command, exc_info=True)
        return _report_error(exc)
    _print_report(report)
    return report.exit_code


if __name__ == "__main__":
    raise SystemExit(main())

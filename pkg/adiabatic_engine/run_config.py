"""
Run configuration for the command-line services.

A :class:`RunConfig` holds everything one ``adiageo`` command needs: the model
selection, the grid or path, solver options, the T list, fit settings,
tolerances, output directory, worker count and seed. It is loaded from a JSON
document (``--config``) and then overridden by flags.

Design constraints
------------------
- ``from_dict`` is strict: unknown keys at any level raise ``ConfigError``.
- ``to_dict`` is lossless: ``RunConfig.from_dict(config.to_dict()) == config``.
- Every field has a default, so ``{"command": "metric"}`` is a valid document.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from enum import Enum
from typing import TYPE_CHECKING, Any, Mapping

if TYPE_CHECKING:
    from typing_extensions import Self

from .errors import ConfigError
from .tolerances import DEFAULT_TOLERANCES, Tolerances

COMMANDS = ("metric", "geodesic", "propagate", "fit")


def _reject_unknown(payload: Mapping[str, Any], cls: type[Any], *, context: str) -> None:
    known = {item.name for item in fields(cls)}
    unknown = sorted(set(payload).difference(known))
    if unknown:
        raise ConfigError(f"Unknown keys in {context}: {', '.join(unknown)}")


def _mapping(payload: Any, *, context: str) -> Mapping[str, Any]:
    if payload is None:
        return {}
    if not isinstance(payload, Mapping):
        raise ConfigError(f"{context} must be an object")
    return payload


def _floats(raw: Any, *, context: str) -> tuple[float, ...] | None:
    if raw is None:
        return None
    if not isinstance(raw, (list, tuple)):
        raise ConfigError(f"{context} must be a list of numbers")
    try:
        return tuple(float(value) for value in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{context} must be a list of numbers") from exc


def _ints(raw: Any, *, context: str) -> tuple[int, ...]:
    if not isinstance(raw, (list, tuple)) or any(
        isinstance(value, bool) or not isinstance(value, int) for value in raw
    ):
        raise ConfigError(f"{context} must be a list of integers")
    return tuple(int(value) for value in raw)


def _construct(cls: type[Any], values: Mapping[str, Any], *, context: str) -> Any:
    try:
        return cls(**values)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid {context}: {exc}") from exc


@dataclass(frozen=True, slots=True)
class ModelSelection:
    """Registry name plus structural parameters (``--model`` and ``--param``)."""

    name: str = "projective"
    params: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not isinstance(self.name, str) or not self.name.strip():
            raise ConfigError("model.name must be a non-empty string")

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "params": dict(self.params)}

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Self:
        _reject_unknown(payload, cls, context="model")
        params = _mapping(payload.get("params"), context="model.params")
        return _construct(
            cls,
            {"name": payload.get("name", "projective"), "params": dict(params)},
            context="model",
        )


@dataclass(frozen=True, slots=True)
class GridSpec:
    """
    Tensor grid over the box spanned by ``lower`` and ``upper``.

    Axes with equal bounds contribute one point. Missing bounds default to the
    model's endpoints. Points with a coordinate within 1e-12 of a value in
    ``exclude`` are skipped.
    """

    points: int = 11
    lower: tuple[float, ...] | None = None
    upper: tuple[float, ...] | None = None
    exclude: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.points < 1:
            raise ConfigError("grid.points must be positive")
        if self.lower is not None and self.upper is not None and len(self.lower) != len(self.upper):
            raise ConfigError("grid.lower and grid.upper must have the same length")

    def to_dict(self) -> dict[str, Any]:
        return {
            "points": self.points,
            "lower": None if self.lower is None else list(self.lower),
            "upper": None if self.upper is None else list(self.upper),
            "exclude": list(self.exclude),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Self:
        _reject_unknown(payload, cls, context="grid")
        return _construct(
            cls,
            {
                "points": int(payload.get("points", 11)),
                "lower": _floats(payload.get("lower"), context="grid.lower"),
                "upper": _floats(payload.get("upper"), context="grid.upper"),
                "exclude": _floats(payload.get("exclude", []), context="grid.exclude") or (),
            },
            context="grid",
        )


class PathKind(str, Enum):
    """Schedule used by geodesic and propagate commands."""

    GEODESIC = "geodesic"
    QUADRATURE = "quadrature"
    SPLICE = "splice"
    LINEAR = "linear"
    CLOSED_FORM = "closed_form"
    CONSTANT = "constant"
    FILE = "file"


@dataclass(frozen=True, slots=True)
class PathSpec:
    """
    Schedule selection and geodesic solver options.

    Attributes
    ----------
    kind:
        How the schedule is produced (see :class:`PathKind`).
    start, end:
        Endpoint overrides; the model defaults otherwise.
    file:
        Path CSV for ``kind="file"``.
    mesh:
        Output knots of the boundary-value solver.
    method:
        ``auto``, ``shooting`` or ``collocation``.
    knots:
        Output knots of 1-D quadrature geodesics.
    eta:
        Half-width of the quadrature window around a critical point (splice).
    sweep_m:
        Ising sizes for ``geodesic --sweep-m``.
    """

    kind: PathKind = PathKind.GEODESIC
    start: tuple[float, ...] | None = None
    end: tuple[float, ...] | None = None
    file: str | None = None
    mesh: int = 129
    method: str = "auto"
    knots: int = 201
    eta: float = 0.05
    sweep_m: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.kind is PathKind.FILE and not self.file:
            raise ConfigError("path.kind=file needs path.file")
        if self.method not in ("auto", "shooting", "collocation"):
            raise ConfigError(f"unknown geodesic method {self.method!r}")
        if self.mesh < 3 or self.knots < 3:
            raise ConfigError("path.mesh and path.knots need at least three knots")
        if not 0.0 < self.eta < 0.5:
            raise ConfigError("path.eta must lie in (0, 0.5)")
        if any(m < 1 for m in self.sweep_m):
            raise ConfigError("path.sweep_m entries must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "start": None if self.start is None else list(self.start),
            "end": None if self.end is None else list(self.end),
            "file": self.file,
            "mesh": self.mesh,
            "method": self.method,
            "knots": self.knots,
            "eta": self.eta,
            "sweep_m": list(self.sweep_m),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Self:
        _reject_unknown(payload, cls, context="path")
        try:
            kind = PathKind(payload.get("kind", PathKind.GEODESIC.value))
        except ValueError as exc:
            raise ConfigError(f"unknown path.kind {payload.get('kind')!r}") from exc
        return _construct(
            cls,
            {
                "kind": kind,
                "start": _floats(payload.get("start"), context="path.start"),
                "end": _floats(payload.get("end"), context="path.end"),
                "file": payload.get("file"),
                "mesh": int(payload.get("mesh", 129)),
                "method": str(payload.get("method", "auto")),
                "knots": int(payload.get("knots", 201)),
                "eta": float(payload.get("eta", 0.05)),
                "sweep_m": _ints(payload.get("sweep_m", []), context="path.sweep_m"),
            },
            context="path",
        )


@dataclass(frozen=True, slots=True)
class PropagationSpec:
    """
    Propagation experiment over a list of total times.

    ``dyson_depth = 0`` skips the Dyson ladder; ``holonomy`` adds the
    Wilczek-Zee comparison to every run record.
    """

    T: tuple[float, ...] = (10.0, 20.0, 40.0, 80.0)
    record_knots: int = 101
    steps: int | None = None
    holonomy: bool = False
    holonomy_mesh: int = 1025
    dyson_depth: int = 0
    dyson_knots: int = 2049

    def __post_init__(self) -> None:
        if not self.T or any(not value > 0.0 for value in self.T):
            raise ConfigError("propagation.T must be a non-empty list of positive times")
        if self.record_knots < 2:
            raise ConfigError("propagation.record_knots must be at least 2")
        if self.steps is not None and self.steps < 1:
            raise ConfigError("propagation.steps must be positive")
        if not 0 <= self.dyson_depth <= 4:
            raise ConfigError("propagation.dyson_depth must lie in [0, 4]")

    def to_dict(self) -> dict[str, Any]:
        return {
            "T": list(self.T),
            "record_knots": self.record_knots,
            "steps": self.steps,
            "holonomy": self.holonomy,
            "holonomy_mesh": self.holonomy_mesh,
            "dyson_depth": self.dyson_depth,
            "dyson_knots": self.dyson_knots,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Self:
        _reject_unknown(payload, cls, context="propagation")
        steps = payload.get("steps")
        return _construct(
            cls,
            {
                "T": _floats(payload.get("T", [10.0, 20.0, 40.0, 80.0]), context="propagation.T")
                or (),
                "record_knots": int(payload.get("record_knots", 101)),
                "steps": None if steps is None else int(steps),
                "holonomy": bool(payload.get("holonomy", False)),
                "holonomy_mesh": int(payload.get("holonomy_mesh", 1025)),
                "dyson_depth": int(payload.get("dyson_depth", 0)),
                "dyson_knots": int(payload.get("dyson_knots", 2049)),
            },
            context="propagation",
        )


class FitKind(str, Enum):
    """Series analysed by ``adiageo fit``."""

    GEODESIC_EXPONENT = "geodesic_exponent"
    METRIC_DIVERGENCE = "metric_divergence"
    FINITE_SIZE = "finite_size"
    SERIES = "series"
    SYNTHETIC = "synthetic"


@dataclass(frozen=True, slots=True)
class FitSpec:
    """
    Scaling-fit settings.

    Attributes
    ----------
    kind:
        Which series to fit (see :class:`FitKind`).
    input:
        CSV with the series (``series``; optional path CSV for ``geodesic_exponent``).
    t_column, y_column:
        Column names for ``series``.
    window:
        Fit window on t; the kind's default when omitted.
    theoretical:
        Expected exponent; derived from known exponents when omitted.
    samples:
        Log-spaced samples for generated series.
    side:
        ``below`` or ``above`` the critical coordinate (metric divergence).
    planted_exponent, planted_prefactor, noise:
        Synthetic series y = prefactor t^exponent (1 + noise * N(0, 1)).
    sizes:
        Ising sizes m for ``finite_size``.
    """

    kind: FitKind = FitKind.GEODESIC_EXPONENT
    input: str | None = None
    t_column: str = "t"
    y_column: str = "y"
    window: tuple[float, float] | None = None
    theoretical: float | None = None
    samples: int = 200
    side: str = "below"
    planted_exponent: float = 1.5
    planted_prefactor: float = 1.0
    noise: float = 0.01
    sizes: tuple[int, ...] = (10, 20, 30, 50, 100)

    def __post_init__(self) -> None:
        if self.kind is FitKind.SERIES and not self.input:
            raise ConfigError("fit.kind=series needs fit.input")
        if self.window is not None and (
            len(self.window) != 2 or not 0.0 < self.window[0] < self.window[1]
        ):
            raise ConfigError("fit.window must be [lower, upper] with 0 < lower < upper")
        if self.samples < 5:
            raise ConfigError("fit.samples must be at least 5")
        if self.side not in ("below", "above"):
            raise ConfigError("fit.side must be below or above")
        if self.noise < 0.0:
            raise ConfigError("fit.noise must be non-negative")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind.value,
            "input": self.input,
            "t_column": self.t_column,
            "y_column": self.y_column,
            "window": None if self.window is None else list(self.window),
            "theoretical": self.theoretical,
            "samples": self.samples,
            "side": self.side,
            "planted_exponent": self.planted_exponent,
            "planted_prefactor": self.planted_prefactor,
            "noise": self.noise,
            "sizes": list(self.sizes),
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Self:
        _reject_unknown(payload, cls, context="fit")
        try:
            kind = FitKind(payload.get("kind", FitKind.GEODESIC_EXPONENT.value))
        except ValueError as exc:
            raise ConfigError(f"unknown fit.kind {payload.get('kind')!r}") from exc
        window = _floats(payload.get("window"), context="fit.window")
        theoretical = payload.get("theoretical")
        return _construct(
            cls,
            {
                "kind": kind,
                "input": payload.get("input"),
                "t_column": str(payload.get("t_column", "t")),
                "y_column": str(payload.get("y_column", "y")),
                "window": None if window is None else tuple(window),
                "theoretical": None if theoretical is None else float(theoretical),
                "samples": int(payload.get("samples", 200)),
                "side": str(payload.get("side", "below")),
                "planted_exponent": float(payload.get("planted_exponent", 1.5)),
                "planted_prefactor": float(payload.get("planted_prefactor", 1.0)),
                "noise": float(payload.get("noise", 0.01)),
                "sizes": _ints(payload.get("sizes", [10, 20, 30, 50, 100]), context="fit.sizes"),
            },
            context="fit",
        )


@dataclass(frozen=True, slots=True)
class RunConfig:
    """
    One command invocation.

    Attributes
    ----------
    command:
        ``metric``, ``geodesic``, ``propagate`` or ``fit``.
    model, grid, path, propagation, fit:
        Per-concern settings; commands read the sections they need.
    tolerances:
        Numerical tolerances (``--tol-*`` flags).
    out:
        Output directory.
    workers:
        Worker count; ``None`` defers to ``ADIAGEO_WORKERS``.
    seed:
        Seed for randomized inputs (balanced oracles, synthetic series).
    """

    command: str
    model: ModelSelection = field(default_factory=ModelSelection)
    grid: GridSpec = field(default_factory=GridSpec)
    path: PathSpec = field(default_factory=PathSpec)
    propagation: PropagationSpec = field(default_factory=PropagationSpec)
    fit: FitSpec = field(default_factory=FitSpec)
    tolerances: Tolerances = DEFAULT_TOLERANCES
    out: str = "adiageo-out"
    workers: int | None = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ConfigError(f"command must be one of {', '.join(COMMANDS)}, got {self.command!r}")
        if self.workers is not None and self.workers < 1:
            raise ConfigError("workers must be positive")

    def to_dict(self) -> dict[str, Any]:
        return {
            "command": self.command,
            "model": self.model.to_dict(),
            "grid": self.grid.to_dict(),
            "path": self.path.to_dict(),
            "propagation": self.propagation.to_dict(),
            "fit": self.fit.to_dict(),
            "tolerances": self.tolerances.to_dict(),
            "out": self.out,
            "workers": self.workers,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Self:
        """
        Parse a configuration document.

        Raises
        ------
        ConfigError
            If a key is unknown or a value is invalid.
        """
        _reject_unknown(payload, cls, context="config")
        if "command" not in payload:
            raise ConfigError("Missing required keys in config: command")
        workers = payload.get("workers")
        return _construct(
            cls,
            {
                "command": str(payload["command"]),
                "model": ModelSelection.from_dict(_mapping(payload.get("model"), context="model")),
                "grid": GridSpec.from_dict(_mapping(payload.get("grid"), context="grid")),
                "path": PathSpec.from_dict(_mapping(payload.get("path"), context="path")),
                "propagation": PropagationSpec.from_dict(
                    _mapping(payload.get("propagation"), context="propagation")
                ),
                "fit": FitSpec.from_dict(_mapping(payload.get("fit"), context="fit")),
                "tolerances": Tolerances.from_dict(
                    _mapping(payload.get("tolerances"), context="tolerances")
                ),
                "out": str(payload.get("out", "adiageo-out")),
                "workers": None if workers is None else int(workers),
                "seed": int(payload.get("seed", 0)),
            },
            context="config",
        )

"""
Numerical tolerances shared by every engine module.

Notes
-----
There are no hidden constants in the engine: each threshold used by a module is
a field here, with the documented default. The CLI exposes every field as a
``--tol-<name>`` flag.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Mapping

from .errors import ConfigError


@dataclass(frozen=True, slots=True)
class Tolerances:
    """
    Numerical tolerances.

    Attributes
    ----------
    degeneracy_rel:
        Eigenvalues within ``degeneracy_rel * max(1, ||H||)`` of E0 join the
        ground cluster.
    gap_floor:
        Gaps at or below this value raise ``GapCollapse``.
    fd_rel_step:
        Central finite-difference step is ``fd_rel_step * max(1, |x_i|)``.
    hermiticity:
        Maximum entrywise ``|H - H^dagger|`` accepted from a model.
    singular_condition:
        Metric condition number above which ``SingularMetric`` is raised.
    path_rel_tol:
        Relative change of a path quadrature at which refinement stops.
    step_tol:
        Target for the step-doubling error estimate of propagators.
    shooting_tol:
        Endpoint residual accepted by the geodesic shooting solver.
    quadrature_abs:
        Absolute tolerance for adaptive quadrature (1-D geodesics, tau integrals).
    polar_threshold:
        Unitarity defect above which a propagator is re-projected onto U(N).
    """

    degeneracy_rel: float = 1e-8
    gap_floor: float = 1e-10
    fd_rel_step: float = 1e-5
    hermiticity: float = 1e-12
    singular_condition: float = 1e12
    path_rel_tol: float = 1e-8
    step_tol: float = 1e-9
    shooting_tol: float = 1e-8
    quadrature_abs: float = 1e-8
    polar_threshold: float = 1e-12

    def __post_init__(self) -> None:
        for item in fields(self):
            value = getattr(self, item.name)
            if not isinstance(value, float) or not value > 0.0:
                raise ConfigError(f"tolerance {item.name} must be a positive float, got {value!r}")

    def degeneracy_tol(self, spectral_norm: float) -> float:
        """Return the absolute clustering tolerance for a matrix of the given norm."""
        return self.degeneracy_rel * max(1.0, spectral_norm)

    def fd_step(self, coordinate: float) -> float:
        """Return the central-difference step for a control coordinate."""
        return self.fd_rel_step * max(1.0, abs(coordinate))

    def with_overrides(self, overrides: Mapping[str, float]) -> Tolerances:
        """Return a copy with the given fields replaced."""
        known = {item.name for item in fields(self)}
        unknown = sorted(set(overrides).difference(known))
        if unknown:
            raise ConfigError(f"Unknown tolerance keys: {', '.join(unknown)}")
        return replace(self, **{key: float(value) for key, value in overrides.items()})

    def to_dict(self) -> dict[str, Any]:
        """Convert to a JSON-serializable dict."""
        return asdict(self)

    @classmethod
    def from_dict(cls, payload: Mapping[str, Any]) -> Tolerances:
        """Construct from a mapping; absent keys keep their defaults."""
        return DEFAULT_TOLERANCES.with_overrides(payload)


DEFAULT_TOLERANCES = Tolerances()

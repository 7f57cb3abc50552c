"""adiageo engine: Hamiltonian families, metrics, geodesics, propagation and scaling."""

from .errors import AdiabaticEngineError
from .schedule import ControlPath
from .tolerances import DEFAULT_TOLERANCES, Tolerances

__all__ = ["DEFAULT_TOLERANCES", "AdiabaticEngineError", "ControlPath", "Tolerances"]

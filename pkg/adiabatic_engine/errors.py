"""
Domain exceptions for the adiabatic geometry engine.

Notes
-----
Engine code does not raise generic exceptions for expected numerical failure
modes. Every such mode maps to a class below, grouped by the stage that
detects it, so callers (and the CLI exit-code mapping) can react by category.
Library errors (``numpy.linalg.LinAlgError``, SciPy warnings) are wrapped with
``raise ... from exc``.
"""

from __future__ import annotations


class AdiabaticEngineError(RuntimeError):
    """Base exception for all engine failures."""


class ConfigError(AdiabaticEngineError, ValueError):
    """Raised when a run configuration or input document is invalid."""


class ModelError(AdiabaticEngineError):
    """Base exception for Hamiltonian model construction and evaluation."""


class InvalidModel(ModelError):
    """Raised when a model produces non-finite or non-Hermitian matrices."""


class DegenerateMode(ModelError):
    """Raised when an analytic mode formula hits a vanishing denominator."""


class SpectralError(AdiabaticEngineError):
    """Base exception for diagonalization and projector calculus."""


class NumericalFailure(SpectralError):
    """Raised when the eigensolver fails or its residual is out of tolerance."""


class GapCollapse(SpectralError):
    """
    Raised when the spectral gap is at or below the gap floor.

    Notes
    -----
    The reduced resolvent is undefined at a closing gap. This signals proximity
    to a critical point rather than a programming error.
    """


class DegenerateGround(SpectralError):
    """Raised when an operation requires a nondegenerate ground state."""


class RankMismatch(SpectralError):
    """Raised when two projectors are compared across different ranks."""


class FrameDegeneration(SpectralError):
    """Raised when a transported ground frame loses rank (level crossing)."""


class QuadratureError(AdiabaticEngineError):
    """Base exception for numerical integration failures."""


class QuadratureNotConverged(QuadratureError):
    """Raised when a quadrature error or tail estimate exceeds tolerance."""


class NonIntegrableSingularity(QuadratureError):
    """Raised when adaptive quadrature of a metric density does not converge."""


class MeshTooCoarse(QuadratureError):
    """Raised when nested-integral refinement does not settle on the mesh."""


class GeodesicError(AdiabaticEngineError):
    """Base exception for geodesic solvers."""


class SingularMetric(GeodesicError):
    """Raised when the metric is too ill-conditioned to invert."""


class NoConvergence(GeodesicError):
    """Raised when shooting and collocation both fail to converge."""


class CriticalPointOnPath(GeodesicError):
    """Raised when the gap collapses along a geodesic iterate."""


class PropagationError(AdiabaticEngineError):
    """Base exception for time-dependent propagation."""


class StepLimitExceeded(PropagationError):
    """Raised when step doubling cannot meet the error target within the step cap."""


class ScalingError(AdiabaticEngineError):
    """Base exception for scaling fits."""


class InsufficientSamples(ScalingError):
    """Raised when fewer than the minimum number of samples fall inside a fit window."""


class NonPositiveData(ScalingError):
    """Raised when a log-log fit receives non-positive abscissae or ordinates."""

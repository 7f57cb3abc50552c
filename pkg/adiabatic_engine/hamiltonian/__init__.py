"""Parametrized Hamiltonians, exact diagonalization and projector calculus."""

from __future__ import annotations

from .model import (
    AffineCoefficient,
    AffineModel,
    AffineRestriction,
    AffineTerm,
    CallableModel,
    ComplexMatrix,
    HamiltonianModel,
    RealVector,
    TraceShifted,
    central_difference_partial,
    check_hermitian,
    control_point,
    directional_partial,
    restrict_affine,
    restrict_line,
    shift_trace,
)
from .spectral import (
    SpectralData,
    commutator_norm_identity_check,
    diagonalize,
    energy_derivative,
    operator_norm,
    projector_derivative,
    projector_velocity,
    reduced_resolvent,
    require_gap,
    require_nondegenerate,
)

__all__ = [
    "AffineCoefficient",
    "AffineModel",
    "AffineRestriction",
    "AffineTerm",
    "CallableModel",
    "ComplexMatrix",
    "HamiltonianModel",
    "RealVector",
    "SpectralData",
    "TraceShifted",
    "central_difference_partial",
    "check_hermitian",
    "commutator_norm_identity_check",
    "control_point",
    "diagonalize",
    "directional_partial",
    "energy_derivative",
    "operator_norm",
    "projector_derivative",
    "projector_velocity",
    "reduced_resolvent",
    "require_gap",
    "require_nondegenerate",
    "restrict_affine",
    "restrict_line",
    "shift_trace",
]

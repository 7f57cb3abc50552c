"""Built-in Hamiltonian families with closed-form spectra, metrics and geodesics."""

from __future__ import annotations

from .deutsch_jozsa import (
    DeutschJozsaModel,
    DeutschJozsaSpec,
    dj_geodesic,
    dj_metric,
    dj_projector_trace,
    oracle_from_selector,
)
from .ising import (
    IsingCase,
    IsingChainModel,
    IsingMode,
    IsingSpec,
    ising_case_metric,
    ising_critical_point,
    ising_geodesic_closed_form,
    ising_ground_energy,
    ising_limit_scale,
    ising_metric,
    ising_p,
    ising_p_limit,
    ising_q,
    ising_q_limit,
    ising_theta,
    ising_theta_gradient,
    ising_thetas,
)
from .projective import (
    ProjectiveModel,
    ProjectiveSpec,
    projective_gap,
    projective_geodesic,
    projective_ground_projector,
    projective_metric_1d,
    projective_mixing_angle,
    projective_spectrum,
)

__all__ = [
    "DeutschJozsaModel",
    "DeutschJozsaSpec",
    "IsingCase",
    "IsingChainModel",
    "IsingMode",
    "IsingSpec",
    "ProjectiveModel",
    "ProjectiveSpec",
    "dj_geodesic",
    "dj_metric",
    "dj_projector_trace",
    "ising_case_metric",
    "ising_critical_point",
    "ising_geodesic_closed_form",
    "ising_ground_energy",
    "ising_limit_scale",
    "ising_metric",
    "ising_p",
    "ising_p_limit",
    "ising_q",
    "ising_q_limit",
    "ising_theta",
    "ising_theta_gradient",
    "ising_thetas",
    "oracle_from_selector",
    "projective_gap",
    "projective_geodesic",
    "projective_ground_projector",
    "projective_metric_1d",
    "projective_mixing_angle",
    "projective_spectrum",
]

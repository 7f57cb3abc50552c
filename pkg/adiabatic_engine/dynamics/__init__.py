"""Time-dependent propagation, Dyson iterates and the ground-state holonomy."""

from __future__ import annotations

from .analysis import (
    PropagationResult,
    adiabatic_error,
    dynamical_phase,
    fidelity_bound_check,
    ground_block,
    intertwining_residual,
    observable_deviation,
    operator_fidelity,
    run_propagation,
)
from .dyson import DysonLadder, dyson_ladder
from .generator import adiabatic_generator
from .holonomy import transport_frame, wilczek_zee_holonomy
from .propagator import (
    PropagationOptions,
    PropagatorSamples,
    adiabatic_hamiltonian,
    integrate_generator,
    magnus_step,
    propagate,
    propagate_adiabatic,
    unitarity_defect,
)

__all__ = [
    "DysonLadder",
    "PropagationOptions",
    "PropagationResult",
    "PropagatorSamples",
    "adiabatic_error",
    "adiabatic_generator",
    "adiabatic_hamiltonian",
    "dynamical_phase",
    "dyson_ladder",
    "fidelity_bound_check",
    "ground_block",
    "integrate_generator",
    "intertwining_residual",
    "magnus_step",
    "observable_deviation",
    "operator_fidelity",
    "propagate",
    "propagate_adiabatic",
    "run_propagation",
    "transport_frame",
    "unitarity_defect",
    "wilczek_zee_holonomy",
]

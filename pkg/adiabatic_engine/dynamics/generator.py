"""Parallel-transport generator J for a nondegenerate ground state."""

from __future__ import annotations

from numpy.typing import ArrayLike

from ..hamiltonian.model import ComplexMatrix, HamiltonianModel, control_point, directional_partial
from ..hamiltonian.spectral import diagonalize, reduced_resolvent, require_nondegenerate
from ..tolerances import DEFAULT_TOLERANCES, Tolerances


def adiabatic_generator(
    model: HamiltonianModel,
    x: ArrayLike,
    velocity: ArrayLike,
    T: float,
    *,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
) -> ComplexMatrix:
    """
    Return J = i (P0 dH R - R dH P0) / T with dH = sum_i v^i d_i H.

    J has no ground-ground or excited-excited blocks, satisfies
    P0 J + J P0 = i [dP0/ds, P0] / T and
    -i T <0|J|k> = <0|dH|k> / (E_k - E0).

    Raises
    ------
    DegenerateGround
        If the ground state is degenerate.
    GapCollapse
        If the gap is at or below the gap floor.
    """
    if not T > 0.0:
        raise ValueError(f"total time T must be positive, got {T}")
    point = control_point(x, model.param_dim)
    spectral = diagonalize(model, point, tolerances=tolerances)
    require_nondegenerate(spectral)
    resolvent = reduced_resolvent(spectral, tolerances=tolerances)
    derivative = directional_partial(model, point, velocity)
    projector = spectral.P0
    return 1j * (projector @ derivative @ resolvent - resolvent @ derivative @ projector) / T

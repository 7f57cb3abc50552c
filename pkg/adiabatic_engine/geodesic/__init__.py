"""Geodesic schedules: connection, boundary-value solver and 1-D quadrature."""

from __future__ import annotations

from .christoffel import ChristoffelField, check_condition, christoffel
from .quadrature import (
    CriticalSplice,
    path_length,
    quadrature_geodesic_1d,
    solve_geodesic_through_critical,
)
from .solver import GeodesicOptions, euler_lagrange_residual, solve_geodesic

__all__ = [
    "ChristoffelField",
    "CriticalSplice",
    "GeodesicOptions",
    "check_condition",
    "christoffel",
    "euler_lagrange_residual",
    "path_length",
    "quadrature_geodesic_1d",
    "solve_geodesic",
    "solve_geodesic_through_critical",
]

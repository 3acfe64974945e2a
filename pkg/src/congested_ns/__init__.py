"""Solver and diagnostics for a 1-D two-phase (congested/free) viscous flow.

The package simulates a free-boundary problem for compressible Navier-Stokes
in Lagrangian coordinates where the fluid is incompressible ("congested",
specific volume v = 1) on one side of a moving interface and pressureless
compressible on the other.  It provides:

* closed-form traveling-wave profiles and their defining relations,
* implicit finite-difference steppers for the two half-line parabolic
  equations obtained after shifting to the interface frame,
* the interface ODE and the fixed-point (Picard) coupling that produces
  the full solution,
* energy functionals, coercivity/trace identities and inequality checks
  used to certify the wave-stability theory numerically.
"""

from .core import Grid, PhysicalParams, ValidationError, derive_speed, make_grid
from .freeboundary import (
    BoundaryPath,
    InitialData,
    Trajectory,
    apply_boundary_map,
    assemble_solution,
    picard_solve,
    validate_hypotheses,
)
from .profiles import Profiles, effective_velocity, profile_residual, traveling_wave

__all__ = [
    "BoundaryPath",
    "Grid",
    "InitialData",
    "PhysicalParams",
    "Profiles",
    "Trajectory",
    "ValidationError",
    "apply_boundary_map",
    "validate_hypotheses",
    "assemble_solution",
    "derive_speed",
    "effective_velocity",
    "make_grid",
    "picard_solve",
    "profile_residual",
    "traveling_wave",
]

__version__ = "0.1.0"

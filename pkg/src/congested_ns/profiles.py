"""Closed-form traveling-wave profiles and their defining relations.

On the half line x >= 0 the front is the logistic profile

    v(x) = v_plus / (1 + (v_plus - 1) exp(-s v_plus x / mu)),
    u(x) = u_plus + s v_plus - s v(x),

anchored so v(0) = 1 (the shift ambiguity of the wave is fixed this way).
The effective velocity u - mu d/dx ln v is identically u_plus for x > 0 and
the congested-side pressure is p_minus = s^2 (v_plus - 1).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import Grid, PhysicalParams, ValidationError, as_field
from .discrete_ops import derivative, trace0


def wave_v(params: PhysicalParams, x: np.ndarray | float) -> np.ndarray | float:
    """Specific-volume profile v(x) for x >= 0."""
    vp = params.v_plus
    return vp / (1.0 + (vp - 1.0) * np.exp(-params.s * vp * np.asarray(x) / params.mu))


def wave_u(params: PhysicalParams, x: np.ndarray | float) -> np.ndarray | float:
    """Velocity profile u(x) = u_plus + s v_plus - s v(x)."""
    s = params.s
    return params.u_plus + s * params.v_plus - s * wave_v(params, x)


def wave_log_v(params: PhysicalParams, x: np.ndarray | float) -> np.ndarray | float:
    """ln v(x) evaluated in a cancellation-free form."""
    vp = params.v_plus
    return np.log(vp) - np.log1p((vp - 1.0) * np.exp(-params.s * vp * np.asarray(x) / params.mu))


def wave_dv(params: PhysicalParams, x: np.ndarray | float) -> np.ndarray | float:
    """Exact slope v'(x) = (s/mu) v (v_plus - v)."""
    v = wave_v(params, x)
    return params.s / params.mu * v * (params.v_plus - v)


@dataclass(frozen=True)
class Profiles:
    """Traveling-wave fields sampled on a grid.

    v_bar, u_bar  -- nodal samples of the profiles
    dv_bar        -- exact nodal slope of v_bar (from the closed form)
    w_bar_right   -- effective velocity on x > 0 (== u_plus)
    p_bar_left    -- congested-side pressure (== p_minus)
    """

    v_bar: np.ndarray = field(repr=False)
    u_bar: np.ndarray = field(repr=False)
    dv_bar: np.ndarray = field(repr=False)
    w_bar_right: float
    p_bar_left: float

    def __post_init__(self) -> None:
        for arr in (self.v_bar, self.u_bar, self.dv_bar):
            arr.setflags(write=False)


def traveling_wave(params: PhysicalParams, grid: Grid) -> Profiles:
    """Sample the traveling-wave profiles on `grid`."""
    v = np.asarray(wave_v(params, grid.x))
    u = np.asarray(wave_u(params, grid.x))
    dv = np.asarray(wave_dv(params, grid.x))
    return Profiles(
        v_bar=v,
        u_bar=u,
        dv_bar=dv,
        w_bar_right=params.u_plus,
        p_bar_left=params.p_minus,
    )


def profile_residual(profiles: Profiles, params: PhysicalParams, grid: Grid) -> dict:
    """Measure how well the sampled wave satisfies its defining relations.

    Returns the discrete L2 norm over interior nodes of the profile ODE
    s dv/dx + mu d2/dx2 ln v, the sup-norm of the algebraic velocity
    relation, and the one-sided slope of v at x = 0.
    """
    log_v = np.asarray(wave_log_v(params, grid.x))
    ode = params.s * derivative(profiles.v_bar, grid, 1) + params.mu * derivative(log_v, grid, 2)
    interior = ode[1:-1]
    ode_norm = float(np.sqrt(grid.dx * np.sum(interior**2)))
    algebraic = profiles.u_bar - (
        params.u_plus + params.s * params.v_plus - params.s * profiles.v_bar
    )
    return {
        "ode_residual_norm": ode_norm,
        "algebraic_residual_norm": float(np.max(np.abs(algebraic))),
        "slope0": trace0(profiles.v_bar, grid, 1),
    }


def effective_velocity(u: np.ndarray, v: np.ndarray, grid: Grid, mu: float) -> np.ndarray:
    """u - mu d/dx ln v, with one-sided stencils at both ends."""
    u = as_field(u, grid)
    v = as_field(v, grid)
    if np.any(v <= 0.0):
        raise ValidationError("effective velocity needs v > 0 everywhere")
    return u - mu * derivative(np.log(v), grid, 1)


def effective_velocity_about_wave(u: np.ndarray, v: np.ndarray, grid: Grid,
                                  params: PhysicalParams) -> np.ndarray:
    """u - mu d/dx ln v evaluated against the wave background.

    The wave part of the effective velocity is the exact constant u_plus, so
    only the deviation ln(v / vwave) = log1p((v - vwave)/vwave) is
    differenced numerically; for data near the wave this avoids losing the
    small perturbation in the finite differences of the O(1) background.
    """
    u = as_field(u, grid)
    v = as_field(v, grid)
    if np.any(v <= 0.0):
        raise ValidationError("effective velocity needs v > 0 everywhere")
    vbar = np.asarray(wave_v(params, grid.x))
    ubar = np.asarray(wave_u(params, grid.x))
    log_ratio = np.log1p((v - vbar) / vbar)
    return params.u_plus + (u - ubar) - params.mu * derivative(log_ratio, grid, 1)


def boundary_slope_constants(params: PhysicalParams) -> dict:
    """Exact one-sided derivatives of the wave profiles at x = 0+."""
    s, mu, vp = params.s, params.mu, params.v_plus
    dv = s * (vp - 1.0) / mu
    d2v = s**2 * (vp - 1.0) * (vp - 2.0) / mu**2
    return {"dv": dv, "d2v": d2v, "du": -s * dv, "d2u": -s * d2v}


def write_profile_columns(path, grid: Grid, profiles: Profiles, mu: float) -> None:
    """Write a plain-text snapshot with columns `x v u w` (one row per node)."""
    w = effective_velocity(profiles.u_bar, profiles.v_bar, grid, mu)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("x v u w\n")
        for xi, vi, ui, wi in zip(grid.x, profiles.v_bar, profiles.u_bar, w):
            fh.write(f"{xi:.17g} {vi:.17g} {ui:.17g} {wi:.17g}\n")

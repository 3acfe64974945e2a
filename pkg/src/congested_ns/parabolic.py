"""Implicit time-stepping for the two half-line parabolic problems.

The specific-volume equation has a logarithmic diffusion which is regularized
outside the physically reachable range [1/2, bar_c] so the implicit solves can
never degenerate; inside that range nothing is changed and the maximum
principle keeps the solution there anyway.  The velocity equation is linear
with variable diffusion mu / v and is advanced by a conservative-flux
implicit-Euler step.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .core import Grid, PhysicalParams, ValidationError, as_field
from .discrete_ops import derivative
from .profiles import wave_dv, wave_log_v, wave_u, wave_v


class NewtonDiverged(RuntimeError):
    """Newton iteration for the nonlinear step hit its iteration cap."""


class MaximumPrincipleViolated(RuntimeError):
    """A specific-volume iterate left the admissible range (1, bar_c]."""


class TridiagonalSolveError(RuntimeError):
    """The implicit linear system was singular."""


EPS_MAX_PRINCIPLE = 1e-9

DEFAULT_NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50


@dataclass(frozen=True)
class RegularizedLog:
    """C^1 surrogate for ln(x), linear-growth outside [1/2, bar_c].

    a(x) == ln(x) on [1/2, bar_c]; outside, quadratic matching pieces bend
    the slope to the clamp values and the function continues linearly, so
    nu <= a'(x) <= 1/nu everywhere.
    """

    bar_c: float
    nu: float

    def __post_init__(self) -> None:
        if not self.bar_c > 1.0:
            raise ValidationError(f"bar_c must exceed 1 (got {self.bar_c})")
        if not 0.0 < self.nu <= min(0.5, 1.0 / self.bar_c):
            raise ValidationError(
                f"nu must lie in (0, min(1/2, 1/bar_c)] (got {self.nu})"
            )

    def __call__(self, x: np.ndarray | float) -> tuple[np.ndarray, np.ndarray]:
        """Return (a(x), a'(x)) elementwise."""
        x = np.asarray(x, dtype=float)
        value = np.empty_like(x)
        slope = np.empty_like(x)

        inv_nu = 1.0 / self.nu
        # left bend: slope grows linearly from 2 at x=1/2 to 1/nu at x=1/4
        xl = 0.25
        kl = (inv_nu - 2.0) / (0.5 - xl)
        # right bend: slope falls linearly from 1/bar_c at bar_c to nu at 2*bar_c
        xr = 2.0 * self.bar_c
        kr = (1.0 / self.bar_c - self.nu) / (xr - self.bar_c)
        a_xl = np.log(0.5) - (2.0 * (0.5 - xl) + 0.5 * kl * (0.5 - xl) ** 2)
        a_xr = np.log(self.bar_c) + (1.0 / self.bar_c) * (xr - self.bar_c) - 0.5 * kr * (
            xr - self.bar_c
        ) ** 2

        core = (x >= 0.5) & (x <= self.bar_c)
        value[core] = np.log(x[core])
        slope[core] = 1.0 / x[core]

        bend_l = (x < 0.5) & (x >= xl)
        d = 0.5 - x[bend_l]
        value[bend_l] = np.log(0.5) - (2.0 * d + 0.5 * kl * d**2)
        slope[bend_l] = 2.0 + kl * d

        far_l = x < xl
        value[far_l] = a_xl + inv_nu * (x[far_l] - xl)
        slope[far_l] = inv_nu

        bend_r = (x > self.bar_c) & (x <= xr)
        d = x[bend_r] - self.bar_c
        value[bend_r] = np.log(self.bar_c) + (1.0 / self.bar_c) * d - 0.5 * kr * d**2
        slope[bend_r] = 1.0 / self.bar_c - kr * d

        far_r = x > xr
        value[far_r] = a_xr + self.nu * (x[far_r] - xr)
        slope[far_r] = self.nu

        return value, slope


def regularized_log(bar_c: float, nu: float | None = None) -> RegularizedLog:
    """Regularized log nonlinearity with the default slope floor 1/(2 bar_c)."""
    if nu is None:
        nu = 1.0 / (2.0 * bar_c)
    return RegularizedLog(bar_c=float(bar_c), nu=float(nu))


def regularized_a(x: np.ndarray | float, reg: RegularizedLog) -> tuple[np.ndarray, np.ndarray]:
    """Value and derivative of the regularized log at x."""
    return reg(x)


def truncation_mollifier(grid: Grid) -> np.ndarray:
    """C^2 cutoff: 1 for x <= R-2, 0 for x >= R-1, quintic blend between.

    Applied to initial data and source near the truncation boundary so the
    right Dirichlet value is compatible with the data at t = 0.
    """
    if grid.R > 3.0:
        lo, hi = grid.R - 2.0, grid.R - 1.0
    else:
        lo, hi = grid.R / 3.0, 2.0 * grid.R / 3.0
    theta = np.clip((grid.x - lo) / (hi - lo), 0.0, 1.0)
    smooth = 6.0 * theta**5 - 15.0 * theta**4 + 10.0 * theta**3
    return 1.0 - smooth


@dataclass
class LinearParabolicCoeffs:
    """Coefficients of d_t u + d_x(b u) + c u - d_x(a d_x u) = f.

    a (diffusion) must be bounded below by a positive constant; b, c, f may
    be scalars or nodal arrays.
    """

    a: np.ndarray | float
    b: np.ndarray | float = 0.0
    c: np.ndarray | float = 0.0
    f: np.ndarray | float = 0.0


def _nodal(value: np.ndarray | float, grid: Grid) -> np.ndarray:
    if np.isscalar(value) or np.asarray(value).ndim == 0:
        return np.full(grid.n, float(value))
    return as_field(value, grid)


def _solve_tridiagonal(lower: np.ndarray, diag: np.ndarray, upper: np.ndarray,
                       rhs: np.ndarray, dt: float, min_diffusion: float) -> np.ndarray:
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper[:-1]
    ab[1, :] = diag
    ab[2, :-1] = lower[1:]
    try:
        return solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:
        raise TridiagonalSolveError(
            f"singular implicit system (dt={dt:g}, min diffusion={min_diffusion:g})"
        ) from exc


def linear_parabolic_step(state: np.ndarray, coeffs: LinearParabolicCoeffs, grid: Grid,
                          dt: float, left_bc: float, right_bc: float) -> np.ndarray:
    """One implicit-Euler step with Dirichlet values at both ends.

    Interior fluxes b u - a d_x u are evaluated at cell faces with arithmetic
    means, giving a conservative second-order discretization.
    """
    state = as_field(state, grid)
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive (got {dt})")
    a = _nodal(coeffs.a, grid)
    b = _nodal(coeffs.b, grid)
    c = _nodal(coeffs.c, grid)
    f = _nodal(coeffs.f, grid)
    if np.min(a) <= 0.0:
        raise ValidationError(f"diffusion must be positive (min a = {np.min(a):g})")

    dx = grid.dx
    a_face = 0.5 * (a[:-1] + a[1:])   # a_{i+1/2}, length n-1
    b_face = 0.5 * (b[:-1] + b[1:])

    # row i (interior): coefficients of u_{i-1}, u_i, u_{i+1}
    lo = (-0.5 * b_face[:-1] - a_face[:-1] / dx) / dx
    hi = (0.5 * b_face[1:] - a_face[1:] / dx) / dx
    di = 1.0 / dt + c[1:-1] + (0.5 * b_face[1:] - 0.5 * b_face[:-1]
                               + (a_face[1:] + a_face[:-1]) / dx) / dx
    rhs = state[1:-1] / dt + f[1:-1]
    rhs[0] -= lo[0] * left_bc
    rhs[-1] -= hi[-1] * right_bc

    interior = _solve_tridiagonal(
        np.concatenate(([0.0], lo[1:])),
        di,
        np.concatenate((hi[:-1], [0.0])),
        rhs, dt, float(np.min(a)),
    )
    out = np.empty_like(state)
    out[0] = left_bc
    out[-1] = right_bc
    out[1:-1] = interior
    return out


def interior_flux_balance(state: np.ndarray, new: np.ndarray,
                          coeffs: LinearParabolicCoeffs, grid: Grid, dt: float) -> tuple[float, float]:
    """Mass change of the interior vs. net boundary flux for one step.

    With c = f = 0 the implicit step conserves sum(dx * u) up to the flux
    difference through the first and last faces; both numbers are returned
    so the telescoping can be asserted to roundoff.
    """
    a = _nodal(coeffs.a, grid)
    b = _nodal(coeffs.b, grid)
    dx = grid.dx
    a_face = 0.5 * (a[:-1] + a[1:])
    b_face = 0.5 * (b[:-1] + b[1:])
    flux = b_face * 0.5 * (new[:-1] + new[1:]) - a_face * (new[1:] - new[:-1]) / dx
    mass_change = float(np.sum(dx * (new[1:-1] - state[1:-1])))
    net_inflow = float(dt * (flux[0] - flux[-1]))
    return mass_change, net_inflow


def step_v(v: np.ndarray, ydot: float, source: np.ndarray | float, grid: Grid, dt: float,
           reg: RegularizedLog, params: PhysicalParams,
           newton_tol: float = DEFAULT_NEWTON_TOL,
           right_bc: float | None = None) -> np.ndarray:
    """One implicit-Euler step of d_t v - ydot d_x v - mu d_xx a(v) = source.

    Dirichlet values v(0) = 1 and v(R) = wave profile at R.  The update is
    computed on the deviation g = v - vwave, for which the wave terms cancel
    through the profile identity s d_x vwave + mu d_xx ln vwave = 0 (with
    ln vwave from the closed form); the exact wave is therefore a discrete
    steady state to roundoff, instead of drifting at the truncation level.
    The nonlinear system is solved by damped Newton iteration with the
    analytic tridiagonal Jacobian of the discretized a(v).
    """
    v = as_field(v, grid)
    if abs(v[0] - 1.0) > 1e-9:
        raise ValidationError(f"step_v requires v(0) = 1 on input (got {v[0]!r})")
    if np.min(v) <= 0.0:
        raise ValidationError("step_v requires v > 0 on input")
    if dt <= 0.0:
        raise ValidationError(f"dt must be positive (got {dt})")
    src = _nodal(source, grid)
    mu = params.mu
    dx = grid.dx
    vbar = np.asarray(wave_v(params, grid.x))
    ln_vbar = np.asarray(wave_log_v(params, grid.x))
    dvbar = np.asarray(wave_dv(params, grid.x))

    rhs = src[1:-1] + (ydot - params.s) * dvbar[1:-1]
    g_old = v - vbar
    g = g_old.copy()
    g[0] = 0.0
    g[-1] = 0.0 if right_bc is None else right_bc - vbar[-1]

    def residual(g: np.ndarray) -> np.ndarray:
        a_val, _ = reg(vbar + g)
        q = a_val - ln_vbar
        adv = ydot * (g[2:] - g[:-2]) / (2.0 * dx)
        dif = mu * (q[2:] - 2.0 * q[1:-1] + q[:-2]) / dx**2
        return g[1:-1] - g_old[1:-1] - dt * (adv + dif + rhs)

    res = residual(g)
    res_norm = float(np.max(np.abs(res)))
    for _ in range(NEWTON_MAX_ITER):
        if res_norm <= newton_tol:
            break
        _, a_slope = reg(vbar + g)
        lower = -dt * (-ydot / (2.0 * dx) + mu * a_slope[:-2] / dx**2)
        diag = 1.0 + 2.0 * dt * mu * a_slope[1:-1] / dx**2
        upper = -dt * (ydot / (2.0 * dx) + mu * a_slope[2:] / dx**2)
        delta = _solve_tridiagonal(lower, diag, upper, -res, dt, mu * reg.nu)

        # damped update: halve until the residual does not increase
        scale = 1.0
        for _ in range(30):
            trial = g.copy()
            trial[1:-1] += scale * delta
            trial_res = residual(trial)
            trial_norm = float(np.max(np.abs(trial_res)))
            if trial_norm <= res_norm or trial_norm <= newton_tol:
                break
            scale *= 0.5
        g = trial
        res = trial_res
        res_norm = trial_norm
    else:
        raise NewtonDiverged(
            f"Newton stalled at residual {res_norm:g} (tol {newton_tol:g}, dt={dt:g})"
        )

    w = vbar + g
    low, high = np.min(w), np.max(w)
    if low < 1.0 - EPS_MAX_PRINCIPLE or high > reg.bar_c + EPS_MAX_PRINCIPLE:
        raise MaximumPrincipleViolated(
            f"v left (1, bar_c]: range [{low:.12g}, {high:.12g}] vs bar_c = {reg.bar_c:g}"
        )
    return w


def step_u(u: np.ndarray, v: np.ndarray, ydot: float, grid: Grid, dt: float,
           params: PhysicalParams, right_bc: float | None = None) -> np.ndarray:
    """One implicit-Euler step of d_t u - ydot d_x u - mu d_x((1/v) d_x u) = 0.

    Dirichlet values u(0) = u_minus and u(R) = wave profile at R.  As in
    step_v the update is computed on the deviation h = u - uwave, whose
    equation has homogeneous boundary values and the source

        (ydot - s) d_x uwave + mu d_x((1/v - 1/vwave) d_x uwave),

    the wave terms cancelling analytically; it is advanced by
    linear_parabolic_step with a = mu/v, b = -ydot.
    """
    u = as_field(u, grid)
    v = as_field(v, grid)
    if np.min(v) < 1.0 - EPS_MAX_PRINCIPLE:
        raise ValidationError(f"step_u requires v >= 1 (min v = {np.min(v):g})")
    if abs(u[0] - params.u_minus) > 1e-9:
        raise ValidationError(
            f"step_u requires u(0) = u_minus on input (got {u[0]!r})"
        )
    vbar = np.asarray(wave_v(params, grid.x))
    ubar = np.asarray(wave_u(params, grid.x))
    dubar = -params.s * np.asarray(wave_dv(params, grid.x))

    coupling = (vbar - v) / (v * vbar) * dubar
    f = (ydot - params.s) * dubar + params.mu * derivative(coupling, grid, 1)
    coeffs = LinearParabolicCoeffs(a=params.mu / v, b=-ydot, c=0.0, f=f)
    h_right = 0.0 if right_bc is None else right_bc - float(ubar[-1])
    h = linear_parabolic_step(u - ubar, coeffs, grid, dt, left_bc=0.0, right_bc=h_right)
    return ubar + h

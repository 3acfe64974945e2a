"""Interface dynamics: hypothesis validation, the boundary ODE, and the
fixed-point coupling that produces the full two-phase solution.

The solution is built in the frame attached to the interface.  Given a trial
boundary path y(t), the specific volume and velocity are advanced on the half
line; the interface speed is then re-derived from the boundary trace

    y'(t) = -mu d_x u(t, 0) / (u_minus - w0(y(t))),

and the map "path in -> path out" is iterated (plain Picard) until the path
reproduces itself.  Long horizons are split into short windows on which the
map is a contraction, chaining the state from one window to the next.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from .core import Grid, PhysicalParams, ValidationError, as_field
from .discrete_ops import (
    NormKind,
    derivative,
    monotone_interpolator,
    norm,
    shift_sample,
    tail_integral,
    trace0,
)
from .parabolic import (
    DEFAULT_NEWTON_TOL,
    RegularizedLog,
    regularized_log,
    step_u,
    step_v,
    truncation_mollifier,
)
from .profiles import (
    boundary_slope_constants,
    effective_velocity_about_wave,
    traveling_wave,
)

DEFAULT_DENOM_FLOOR = 1e-8


class HypothesisViolated(ValidationError):
    """Initial data failed one or more admissibility hypotheses."""

    def __init__(self, failures: list[str]):
        self.failures = failures
        super().__init__("; ".join(failures))


class DenominatorTooSmall(RuntimeError):
    """u_minus - w0(y) fell below the non-degeneracy floor."""


class PicardStalled(RuntimeError):
    """Fixed-point iteration hit its iteration cap."""

    def __init__(self, message: str, last_ratio: float):
        self.last_ratio = last_ratio
        super().__init__(message)


@dataclass(frozen=True)
class BoundaryPath:
    """Interface position and speed on a uniform time mesh.

    y(0) = 0, ydot > 0 at every node, and y is the cumulative trapezoidal
    integral of ydot.
    """

    t: np.ndarray = field(repr=False)
    y: np.ndarray = field(repr=False)
    ydot: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        for arr in (self.t, self.y, self.ydot):
            arr.setflags(write=False)


def make_path(t: np.ndarray, ydot: np.ndarray) -> BoundaryPath:
    """Path from nodal speeds; position by cumulative trapezoid from y(0)=0."""
    t = np.asarray(t, float)
    ydot = np.asarray(ydot, float)
    if t.shape != ydot.shape or t.ndim != 1:
        raise ValidationError("path times and speeds must be 1-D arrays of equal length")
    if np.any(ydot <= 0.0):
        raise ValidationError(f"path speed must stay positive (min {np.min(ydot):g})")
    dt = np.diff(t)
    y = np.concatenate(([0.0], np.cumsum(0.5 * (ydot[:-1] + ydot[1:]) * dt)))
    return BoundaryPath(t=t, y=y, ydot=ydot)


def time_derivative(values: np.ndarray, dt: float) -> np.ndarray:
    """Second-order finite differences on a uniform time mesh."""
    values = np.asarray(values, float)
    out = np.empty_like(values)
    if values.size < 3:
        out[:] = (values[-1] - values[0]) / (dt * max(values.size - 1, 1))
        return out
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * dt)
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * dt)
    out[-1] = (3.0 * values[-1] - 4.0 * values[-2] + values[-3]) / (2.0 * dt)
    return out


def path_h1_norm(t: np.ndarray, f: np.ndarray) -> float:
    """Discrete H1(0,T) norm of nodal values on a uniform time mesh."""
    t = np.asarray(t, float)
    f = np.asarray(f, float)
    if t.size < 2:
        return float(abs(f[0]))
    dt = float(t[1] - t[0])
    df = time_derivative(f, dt)
    return float(np.sqrt(np.trapezoid(f**2, t) + np.trapezoid(df**2, t)))


def path_h2_distance(t: np.ndarray, ydot_a: np.ndarray, ydot_b: np.ndarray) -> float:
    """Discrete H2(0,T) distance between two paths given by nodal speeds.

    Logged alongside the H1 iteration metric: the discrete second derivative
    of the position is one order noisier, so convergence is gated on H1.
    """
    t = np.asarray(t, float)
    d_speed = np.asarray(ydot_a, float) - np.asarray(ydot_b, float)
    if t.size < 2:
        return float(abs(d_speed[0]))
    dt = float(t[1] - t[0])
    dy = np.concatenate(([0.0], np.cumsum(0.5 * (d_speed[:-1] + d_speed[1:]) * dt)))
    dacc = time_derivative(d_speed, dt)
    return float(np.sqrt(
        np.trapezoid(dy**2, t) + np.trapezoid(d_speed**2, t) + np.trapezoid(dacc**2, t)
    ))


@dataclass(frozen=True)
class InitialData:
    """Validated initial state plus derived quantities used by the solver.

    w0 is the initial effective velocity u0 - mu d_x ln v0 (transported
    rigidly by the interface motion), dxw0 its derivative, V0 and W0 the
    integrated tails of the volume and effective-velocity perturbations.
    """

    v0: np.ndarray = field(repr=False)
    u0: np.ndarray = field(repr=False)
    w0: np.ndarray = field(repr=False)
    dxw0: np.ndarray = field(repr=False)
    V0: np.ndarray = field(repr=False)
    W0: np.ndarray = field(repr=False)
    R: float
    w0_tail: float
    compat_speed: float
    hypothesis_report: dict

    def __post_init__(self) -> None:
        for arr in (self.v0, self.u0, self.w0, self.dxw0, self.V0, self.W0):
            arr.setflags(write=False)
        object.__setattr__(self, "_w0_interp", None)

    def w0_at(self, xi: float) -> float:
        """Pointwise w0(xi) by monotone cubic interpolation, tail past R."""
        if xi >= self.R:
            return float(self.w0_tail)
        interp = object.__getattribute__(self, "_w0_interp")
        if interp is None:
            interp = monotone_interpolator(np.linspace(0.0, self.R, self.w0.size), self.w0)
            object.__setattr__(self, "_w0_interp", interp)
        return float(interp(xi))


def validate_hypotheses(v0: np.ndarray, u0: np.ndarray, grid: Grid, params: PhysicalParams,
                        h3_tol: float | None = None, strict: bool = True) -> InitialData:
    """Check the admissibility hypotheses and assemble the derived data.

    Endpoint values, non-degeneracy signs, the second-order compatibility
    bracket at x = 0, and the decay/regularity norms are all evaluated; each
    gets a pass/fail entry with its residual.  With strict=True any failure
    raises HypothesisViolated listing every failed item.
    """
    v0 = as_field(v0, grid)
    u0 = as_field(u0, grid)
    if h3_tol is None:
        h3_tol = max(100.0 * grid.dx**2, 1e-8)

    mu = params.mu
    prof = traveling_wave(params, grid)
    w0 = effective_velocity_about_wave(u0, v0, grid, params)
    dxw0 = derivative(w0, grid, 1)
    V0 = tail_integral(v0 - prof.v_bar, grid)
    W0 = tail_integral(w0 - params.u_plus, grid)

    # one-sided traces: exact wave slopes plus stencils on the deviation only
    slopes = boundary_slope_constants(params)
    g0 = v0 - prof.v_bar
    h0 = u0 - prof.u_bar
    du0 = slopes["du"] + trace0(h0, grid, 1)
    dv0 = slopes["dv"] + trace0(g0, grid, 1)
    d2u0 = slopes["d2u"] + trace0(h0, grid, 2)

    report: dict[str, dict] = {}
    failures: list[str] = []

    def record(name: str, ok: bool, detail: dict) -> None:
        report[name] = {"pass": bool(ok), **detail}
        if not ok:
            failures.append(f"{name}: " + ", ".join(f"{k}={v:.6g}" for k, v in detail.items()))

    endpoint_v = abs(float(v0[0]) - 1.0)
    endpoint_u = abs(float(u0[0]) - params.u_minus)
    record("H1: congested endpoint values", endpoint_v <= 1e-9 and endpoint_u <= 1e-9,
           {"v0_at_0_minus_1": endpoint_v, "u0_at_0_minus_u_minus": endpoint_u})

    sqrtx_dw = norm(dxw0, grid, NormKind.WEIGHTED_SQRT_X)
    sqrtx_d2w = norm(derivative(w0, grid, 2), grid, NormKind.WEIGHTED_SQRT_X)
    record("H2: weighted regularity of w0", np.isfinite(sqrtx_dw) and np.isfinite(sqrtx_d2w),
           {"sqrtx_dxw0_L2": sqrtx_dw, "sqrtx_dx2w0_L2": sqrtx_d2w})

    h3 = -(du0**2) / dv0 - mu * dv0 * du0 + mu * d2u0 if dv0 != 0.0 else np.inf
    record("H3: compatibility bracket at 0", abs(h3) <= h3_tol,
           {"residual": float(h3), "tol": h3_tol})

    min_excess = float(np.min(v0[1:]) - 1.0)
    record("H4: non-degeneracy",
           dv0 > 0.0 and du0 < 0.0 and min_excess > -1e-12,
           {"dx_v0_at_0": dv0, "dx_u0_at_0": du0, "min_v0_minus_1_on_xpos": min_excess})

    V0_l2 = norm(V0, grid, NormKind.L2)
    W0_w = norm(W0, grid, NormKind.WEIGHTED_ONE_PLUS_SQRT_X)
    record("H5: decay of integrated tails", np.isfinite(V0_l2) and np.isfinite(W0_w),
           {"V0_L2": V0_l2, "one_plus_sqrtx_W0_L2": W0_w})

    if strict and failures:
        raise HypothesisViolated(failures)

    return InitialData(
        v0=v0.copy(), u0=u0.copy(), w0=w0, dxw0=dxw0, V0=V0, W0=W0,
        R=grid.R, w0_tail=params.u_plus,
        compat_speed=-du0 / dv0,
        hypothesis_report=report,
    )


def boundary_velocity(u: np.ndarray, w0_at_y: float, grid: Grid, params: PhysicalParams,
                      denom_floor: float = DEFAULT_DENOM_FLOOR) -> float:
    """Interface speed -mu d_x u(0) / (u_minus - w0(y))."""
    denom = params.u_minus - w0_at_y
    if denom < denom_floor:
        raise DenominatorTooSmall(
            f"u_minus - w0(y) = {denom:g} fell below the floor {denom_floor:g}"
        )
    return -params.mu * trace0(u, grid, 1) / denom


@dataclass
class WindowReport:
    """Per-window fixed-point iteration record.

    Distances are the H1 metric the stopping rule uses; the H2 distances of
    the same iterates are kept for inspection only.
    """

    t_start: float
    iterations: int
    distances: list[float]
    ratios: list[float]
    h2_distances: list[float]


@dataclass
class Trajectory:
    """Time history of the coupled solve.

    Scalars (t, y, ydot, p_s) are kept at every step; field snapshots at the
    configured stride (first and last step always included).
    """

    t: np.ndarray
    y: np.ndarray
    ydot: np.ndarray
    p_s: np.ndarray
    stored_idx: np.ndarray
    v: np.ndarray
    u: np.ndarray
    windows: list[WindowReport]
    grid: Grid
    params: PhysicalParams
    init: InitialData

    @property
    def path(self) -> BoundaryPath:
        return BoundaryPath(t=self.t.copy(), y=self.y.copy(), ydot=self.ydot.copy())

    @property
    def stored_times(self) -> np.ndarray:
        return self.t[self.stored_idx]

    def stored_index_at(self, t: float) -> int:
        """Index (into stored snapshots) of the latest stored time <= t."""
        times = self.stored_times
        k = int(np.searchsorted(times, t + 1e-12, side="right")) - 1
        return max(k, 0)


def _compat_speed(v: np.ndarray, u: np.ndarray, grid: Grid, params: PhysicalParams,
                  prof) -> float:
    """-d_x u(0) / d_x v(0) with the wave slopes taken analytically."""
    slopes = boundary_slope_constants(params)
    du = slopes["du"] + trace0(u - prof.u_bar, grid, 1)
    dv = slopes["dv"] + trace0(v - prof.v_bar, grid, 1)
    return -du / dv


def _march(v: np.ndarray, u: np.ndarray, ydot: np.ndarray, y: np.ndarray, y_offset: float,
           init: InitialData, grid: Grid, params: PhysicalParams, dt: float,
           reg: RegularizedLog, chi_dxw0: np.ndarray, newton_tol: float,
           denom_floor: float, t_start: float,
           keep_fields: bool) -> tuple[np.ndarray, list[np.ndarray], list[np.ndarray]]:
    """Advance the fields along a given local path; return re-derived speeds.

    The boundary trace of d_x u is evaluated as the exact wave slope plus a
    one-sided stencil on u - uwave, so the wave background contributes no
    stencil error to the interface speed.
    """
    prof = traveling_wave(params, grid)
    slopes = boundary_slope_constants(params)
    steps = ydot.size - 1
    zdot = np.empty(ydot.size)
    zdot[0] = _compat_speed(v, u, grid, params, prof)
    vs = [v.copy()] if keep_fields else []
    us = [u.copy()] if keep_fields else []

    # one interpolant for the whole march; the shift only moves the queries
    src_zero = not np.any(chi_dxw0)
    src_interp = None if src_zero else monotone_interpolator(grid.x, chi_dxw0)

    def sampled_source(y_glob: float) -> np.ndarray | float:
        if src_zero:
            return 0.0
        xq = grid.x + y_glob
        out = np.zeros(grid.n)
        inside = xq <= grid.R
        out[inside] = src_interp(xq[inside])
        return out

    for k in range(1, steps + 1):
        y_glob = y_offset + y[k]
        src = sampled_source(y_glob)
        try:
            v = step_v(v, ydot[k], src, grid, dt, reg, params, newton_tol)
            u = step_u(u, v, ydot[k], grid, dt, params)
        except RuntimeError as exc:
            raise type(exc)(f"{exc} (at t = {t_start + k * dt:g})") from exc
        denom = params.u_minus - init.w0_at(y_glob)
        if denom < denom_floor:
            raise DenominatorTooSmall(
                f"u_minus - w0(y) = {denom:g} fell below the floor {denom_floor:g} "
                f"(at t = {t_start + k * dt:g})"
            )
        du_trace = slopes["du"] + trace0(u - prof.u_bar, grid, 1)
        zdot[k] = -params.mu * du_trace / denom
        if keep_fields:
            vs.append(v.copy())
            us.append(u.copy())
    return zdot, vs, us


def apply_boundary_map(path_in: BoundaryPath, init: InitialData, grid: Grid,
                       params: PhysicalParams, dt: float,
                       reg: RegularizedLog | None = None,
                       newton_tol: float = DEFAULT_NEWTON_TOL,
                       denom_floor: float = DEFAULT_DENOM_FLOOR) -> BoundaryPath:
    """One application of the fixed-point map: solve v then u along path_in,
    then re-derive the interface path from the boundary trace of u."""
    if abs(path_in.y[0]) > 1e-12:
        raise ValidationError("input path must start at y(0) = 0")
    compat_tol = 10.0 * (grid.dx**2 + dt)
    if abs(path_in.ydot[0] - init.compat_speed) > compat_tol:
        raise ValidationError(
            f"input path speed at t=0 is {path_in.ydot[0]:g}, "
            f"expected the data-determined value {init.compat_speed:g} "
            f"within {compat_tol:g}"
        )
    if reg is None:
        reg = regularized_log(2.0 * float(np.max(init.v0)))
    chi_dxw0 = truncation_mollifier(grid) * init.dxw0
    zdot, _, _ = _march(
        init.v0.copy(), init.u0.copy(), path_in.ydot, path_in.y, 0.0,
        init, grid, params, dt, reg, chi_dxw0, newton_tol, denom_floor,
        t_start=float(path_in.t[0]), keep_fields=False,
    )
    return make_path(path_in.t, zdot)


def picard_solve(init: InitialData, grid: Grid, params: PhysicalParams, T_final: float,
                 dt: float, tol: float = 1e-8, max_iter: int = 25,
                 window: float | None = None, stride: int = 10,
                 newton_tol: float = DEFAULT_NEWTON_TOL,
                 denom_floor: float = DEFAULT_DENOM_FLOOR) -> Trajectory:
    """Fixed-point solve of the coupled interface/fields problem up to T_final.

    The horizon is split into windows of length `window` (default 0.25/s, on
    which the map contracts); within each window the path is iterated from a
    straight-line guess until the discrete H1 distance between successive
    speed iterates drops below `tol`, then the state is advanced along the
    converged path and the next window starts from it.
    """
    if window is None:
        window = 0.25 / params.s
    n_total = int(round(T_final / dt))
    if abs(n_total * dt - T_final) > 1e-9 * max(1.0, T_final):
        raise ValidationError(f"T_final={T_final:g} must be a multiple of dt={dt:g}")
    steps_per_window = max(1, int(round(window / dt)))

    reg = regularized_log(2.0 * float(np.max(init.v0)))
    chi = truncation_mollifier(grid)
    chi_dxw0 = chi * init.dxw0

    t_all = dt * np.arange(n_total + 1)
    y_all = np.zeros(n_total + 1)
    ydot_all = np.zeros(n_total + 1)
    p_all = np.zeros(n_total + 1)
    stored_idx = [0]
    vs_stored = [init.v0.copy()]
    us_stored = [init.u0.copy()]
    windows: list[WindowReport] = []

    prof = traveling_wave(params, grid)
    v = init.v0.copy()
    u = init.u0.copy()
    y_offset = 0.0
    k_done = 0
    ydot_all[0] = init.compat_speed
    p_all[0] = init.compat_speed * (params.u_minus - init.w0_at(0.0))

    while k_done < n_total:
        steps = min(steps_per_window, n_total - k_done)
        t_loc = dt * np.arange(steps + 1)
        t_start = k_done * dt
        speed0 = _compat_speed(v, u, grid, params, prof)
        ydot = np.full(steps + 1, speed0)
        y_loc = np.concatenate(([0.0], np.cumsum(0.5 * (ydot[:-1] + ydot[1:]) * dt)))

        distances: list[float] = []
        ratios: list[float] = []
        h2_distances: list[float] = []
        converged = False
        for _ in range(max_iter):
            zdot, _, _ = _march(v.copy(), u.copy(), ydot, y_loc, y_offset, init, grid,
                                params, dt, reg, chi_dxw0, newton_tol, denom_floor,
                                t_start, keep_fields=False)
            d = path_h1_norm(t_loc, zdot - ydot)
            if distances:
                ratios.append(d / distances[-1] if distances[-1] > 0 else 0.0)
            distances.append(d)
            h2_distances.append(path_h2_distance(t_loc, zdot, ydot))
            ydot = zdot
            y_loc = np.concatenate(([0.0], np.cumsum(0.5 * (ydot[:-1] + ydot[1:]) * dt)))
            if d <= tol:
                converged = True
                break
        if not converged:
            raise PicardStalled(
                f"no fixed point after {max_iter} iterations on window starting "
                f"t={t_start:g} (last distance {distances[-1]:g})",
                last_ratio=ratios[-1] if ratios else np.inf,
            )
        windows.append(WindowReport(t_start=t_start, iterations=len(distances),
                                    distances=distances, ratios=ratios,
                                    h2_distances=h2_distances))

        # definitive pass along the converged path, keeping fields
        zdot, vs, us = _march(v.copy(), u.copy(), ydot, y_loc, y_offset, init, grid,
                              params, dt, reg, chi_dxw0, newton_tol, denom_floor,
                              t_start, keep_fields=True)
        for k in range(1, steps + 1):
            idx = k_done + k
            y_all[idx] = y_offset + y_loc[k]
            ydot_all[idx] = ydot[k]
            p_all[idx] = ydot[k] * (params.u_minus - init.w0_at(y_all[idx]))
            if idx % stride == 0 or idx == n_total:
                stored_idx.append(idx)
                vs_stored.append(vs[k])
                us_stored.append(us[k])
        v = vs[-1]
        u = us[-1]
        y_offset += y_loc[-1]
        k_done += steps

    return Trajectory(
        t=t_all, y=y_all, ydot=ydot_all, p_s=p_all,
        stored_idx=np.asarray(stored_idx, dtype=int),
        v=np.asarray(vs_stored), u=np.asarray(us_stored),
        windows=windows, grid=grid, params=params, init=init,
    )


def invariant_set_check(path: BoundaryPath, M: float, params: PhysicalParams) -> dict:
    """Membership report for the admissible path set with constant M:
    speeds within [1/M, M] and H1 deviation of the speed from s at most M."""
    beta_h1 = path_h1_norm(path.t, path.ydot - params.s)
    ydot_min = float(np.min(path.ydot))
    ydot_max = float(np.max(path.ydot))
    lower_ok = ydot_min >= 1.0 / M
    upper_ok = ydot_max <= M
    norm_ok = beta_h1 <= M
    return {
        "ydot_min": ydot_min,
        "ydot_max": ydot_max,
        "beta_h1": beta_h1,
        "lower_ok": lower_ok,
        "upper_ok": upper_ok,
        "norm_ok": norm_ok,
        "pass": lower_ok and upper_ok and norm_ok,
    }


def assemble_solution(traj: Trajectory, grid: Grid, params: PhysicalParams,
                      t_index: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Full-line snapshot (x, v, u, p) in the original frame at a stored time.

    Left of the interface: the congested constants (1, u_minus, p_s(t));
    right of it: the shifted half-line fields with zero pressure.
    """
    if not 0 <= t_index < traj.stored_idx.size:
        raise ValidationError(
            f"t_index {t_index} outside stored range [0, {traj.stored_idx.size})"
        )
    step = int(traj.stored_idx[t_index])
    xt = traj.y[step]
    pt = traj.p_s[step]
    n_left = max(int(round(0.2 * grid.R / grid.dx)), 2)
    x_left = xt - grid.dx * np.arange(n_left, 0, -1)
    x = np.concatenate((x_left, xt + grid.x))
    v = np.concatenate((np.ones(n_left), traj.v[t_index]))
    u = np.concatenate((np.full(n_left, params.u_minus), traj.u[t_index]))
    p = np.concatenate((np.full(n_left, pt), np.zeros(grid.n)))
    return x, v, u, p


def reconstruction_residuals(traj: Trajectory, init: InitialData, grid: Grid,
                             params: PhysicalParams) -> np.ndarray:
    """L2 residual, per stored time, of the transport representation of the
    effective velocity: u - mu d_x ln v against w0 sampled at x + y(t).

    The modified system is equivalent to the original one exactly when this
    vanishes, so the residual certifies the reconstruction argument."""
    out = np.empty(traj.stored_idx.size)
    for i, step in enumerate(traj.stored_idx):
        w_s = effective_velocity_about_wave(traj.u[i], traj.v[i], grid, params)
        target = shift_sample(init.w0, grid, traj.y[step], init.w0_tail)
        out[i] = norm(w_s - target, grid, NormKind.L2)
    return out

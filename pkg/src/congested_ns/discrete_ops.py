"""Finite-difference operators, discrete norms, boundary traces, shifted sampling.

All stencils are at least second-order accurate and exact on polynomials of
degree <= 2.  Integrals use the composite trapezoidal rule, matching the
second-order spatial discretization used by the solvers.
"""

from __future__ import annotations

from enum import Enum

import numpy as np
from scipy.interpolate import PchipInterpolator

from .core import Grid, ValidationError, as_field


class NormKind(Enum):
    L2 = "L2"
    H1 = "H1"
    H2 = "H2"
    H3 = "H3"
    LINF = "Linf"
    L1 = "L1"
    WEIGHTED_SQRT_X = "WeightedSqrtX"
    WEIGHTED_ONE_PLUS_SQRT_X = "WeightedOnePlusSqrtX"


def derivative(f: np.ndarray, grid: Grid, order: int) -> np.ndarray:
    """Discrete d^k f / dx^k for k in {1, 2}.

    Central differences in the interior, one-sided second-order stencils at
    both ends.
    """
    f = as_field(f, grid)
    if grid.n < 5:
        raise ValidationError("derivative stencils need at least 5 nodes")
    dx = grid.dx
    out = np.empty_like(f)
    if order == 1:
        out[1:-1] = (f[2:] - f[:-2]) / (2.0 * dx)
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * dx)
        out[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * dx)
    elif order == 2:
        out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / dx**2
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / dx**2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / dx**2
    else:
        raise ValidationError(f"unsupported derivative order {order} (use 1 or 2)")
    return out


def norm(f: np.ndarray, grid: Grid, kind: NormKind) -> float:
    """Discrete norm of a field by trapezoidal quadrature.

    Sobolev norms stack squared L2 norms of repeated discrete derivatives:
    ||f||_Hk^2 = sum_{j<=k} ||D^j f||_L2^2.
    """
    f = as_field(f, grid)
    x = grid.x
    if kind is NormKind.LINF:
        return float(np.max(np.abs(f)))
    if kind is NormKind.L1:
        return float(np.trapezoid(np.abs(f), x))
    if kind is NormKind.L2:
        return float(np.sqrt(np.trapezoid(f**2, x)))
    if kind is NormKind.WEIGHTED_SQRT_X:
        return float(np.sqrt(np.trapezoid(x * f**2, x)))
    if kind is NormKind.WEIGHTED_ONE_PLUS_SQRT_X:
        return float(np.sqrt(np.trapezoid((1.0 + np.sqrt(x)) ** 2 * f**2, x)))
    if kind in (NormKind.H1, NormKind.H2, NormKind.H3):
        k = {NormKind.H1: 1, NormKind.H2: 2, NormKind.H3: 3}[kind]
        total = np.trapezoid(f**2, x)
        d1 = derivative(f, grid, 1)
        total += np.trapezoid(d1**2, x)
        if k >= 2:
            d2 = derivative(f, grid, 2)
            total += np.trapezoid(d2**2, x)
        if k >= 3:
            d3 = derivative(d2, grid, 1)
            total += np.trapezoid(d3**2, x)
        return float(np.sqrt(total))
    raise ValidationError(f"unknown norm kind {kind!r}")


def trace0(f: np.ndarray, grid: Grid, order: int = 0) -> float:
    """Boundary value or one-sided derivative estimate at x = 0.

    order 0 returns f(0); orders 1 and 2 use one-sided stencils that are
    exact on cubics (the interface speed and the trace identities are
    sensitive enough to boundary-slope error that plain three-point
    stencils would eat most of their tolerance budget).
    """
    f = as_field(f, grid)
    if grid.n < 5:
        raise ValidationError("trace stencils need at least 5 nodes")
    dx = grid.dx
    if order == 0:
        return float(f[0])
    if order == 1:
        return float((-11.0 * f[0] + 18.0 * f[1] - 9.0 * f[2] + 2.0 * f[3]) / (6.0 * dx))
    if order == 2:
        return float(
            (35.0 * f[0] - 104.0 * f[1] + 114.0 * f[2] - 56.0 * f[3] + 11.0 * f[4])
            / (12.0 * dx**2)
        )
    raise ValidationError(f"unsupported trace order {order} (use 0, 1 or 2)")


def monotone_interpolator(x: np.ndarray, values: np.ndarray) -> PchipInterpolator:
    """Shape-preserving cubic interpolant; silences the harmless division
    warnings its slope formula emits on locally flat data."""
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        return PchipInterpolator(x, values, extrapolate=False)


def tail_integral(f: np.ndarray, grid: Grid) -> np.ndarray:
    """-integral of f from x to R, by reversed cumulative trapezoid.

    Truncation surrogate for -int_x^inf f dz when f decays before R: the
    committed error is the neglected tail beyond R.
    """
    f = as_field(f, grid)
    cum = np.concatenate(([0.0], np.cumsum(0.5 * (f[1:] + f[:-1]) * grid.dx)))
    return cum - cum[-1]


def shift_sample(f0: np.ndarray, grid: Grid, y: float, tail: float) -> np.ndarray:
    """Sample x -> f0(x + y) on the grid by monotone cubic interpolation.

    `f0` holds nodal values on [0, R]; `tail` is the declared value of f0
    past the right end, used wherever x + y > R.  Negative shifts are
    rejected: the interface only ever moves right.
    """
    f0 = as_field(f0, grid)
    if y < 0.0:
        raise ValidationError(f"shift offset must be nonnegative (got {y})")
    if y == 0.0:
        return f0.copy()
    xq = grid.x + y
    inside = xq <= grid.R
    out = np.full(grid.n, float(tail))
    if np.any(inside):
        out[inside] = monotone_interpolator(grid.x, f0)(xq[inside])
    return out

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

from congested_ns.core import make_grid
from congested_ns.discrete_ops import (
    NormKind,
    derivative,
    monotone_interpolator,
    norm,
    shift_sample,
    tail_integral,
    trace0,
)


@pytest.fixture(scope="module")
def g10():
    return make_grid(10.0, 501)


coeffs = st.floats(-3.0, 3.0)


@given(a=coeffs, b=coeffs, c=coeffs)
@settings(max_examples=50, deadline=None)
def test_derivative_exact_on_quadratics(a, b, c):
    g = make_grid(4.0, 33)
    f = a * g.x**2 + b * g.x + c
    np.testing.assert_allclose(derivative(f, g, 1), 2 * a * g.x + b, rtol=0, atol=1e-10)
    np.testing.assert_allclose(derivative(f, g, 2), 2 * a, rtol=0, atol=1e-9)


def test_derivative_refinement_order_on_sine():
    errs = []
    for n in (101, 201, 401):
        g = make_grid(np.pi, n)
        err = np.max(np.abs(derivative(np.sin(g.x), g, 1) - np.cos(g.x)))
        errs.append(err)
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.25)
    assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.25)


def test_derivative_rejects_unsupported_order(g10):
    with pytest.raises(Exception, match="order"):
        derivative(np.zeros(g10.n), g10, 3)


def test_norm_zero_field(g10):
    for kind in NormKind:
        assert norm(np.zeros(g10.n), g10, kind) == 0.0


def test_norm_constant_l2(g10):
    assert norm(np.ones(g10.n), g10, NormKind.L2) == pytest.approx(np.sqrt(10.0), rel=1e-14)


def test_weighted_sqrtx_norm_against_quadrature():
    g = make_grid(40.0, 4001)
    f = np.exp(-g.x)
    # oracle: independent adaptive quadrature of int x e^{-2x}
    expected = np.sqrt(quad(lambda x: x * np.exp(-2 * x), 0, np.inf)[0])
    assert expected == pytest.approx(0.5, rel=1e-10)
    assert norm(f, g, NormKind.WEIGHTED_SQRT_X) == pytest.approx(expected, rel=5e-5)


def test_weighted_one_plus_sqrtx_norm_against_quadrature():
    g = make_grid(40.0, 4001)
    f = np.exp(-g.x)
    expected = np.sqrt(quad(lambda x: (1 + np.sqrt(x)) ** 2 * np.exp(-2 * x), 0, np.inf)[0])
    # the sqrt-weight kink at 0 costs half an order locally
    assert norm(f, g, NormKind.WEIGHTED_ONE_PLUS_SQRT_X) == pytest.approx(expected, rel=5e-4)


def test_l1_and_linf_norms(g10):
    f = np.sin(g10.x)
    assert norm(f, g10, NormKind.LINF) == pytest.approx(np.max(np.abs(f)))
    oracle = quad(lambda x: abs(np.sin(x)), 0, 10.0, limit=200)[0]
    assert norm(f, g10, NormKind.L1) == pytest.approx(oracle, rel=1e-4)


def test_sobolev_pythagoras(g10, rng):
    f = np.sin(g10.x) * np.exp(-0.3 * g10.x) + 0.1 * rng.normal(size=g10.n)
    h1 = norm(f, g10, NormKind.H1)
    l2 = norm(f, g10, NormKind.L2)
    dl2 = norm(derivative(f, g10, 1), g10, NormKind.L2)
    assert h1**2 == pytest.approx(l2**2 + dl2**2, rel=1e-13)


def test_h3_norm_stacks_three_derivatives(g10):
    f = np.exp(-g10.x) * np.sin(g10.x)
    total = norm(f, g10, NormKind.L2) ** 2
    d1 = derivative(f, g10, 1)
    d2 = derivative(f, g10, 2)
    d3 = derivative(d2, g10, 1)
    for d in (d1, d2, d3):
        total += norm(d, g10, NormKind.L2) ** 2
    assert norm(f, g10, NormKind.H3) == pytest.approx(np.sqrt(total), rel=1e-13)


def test_trace_exact_on_linear_and_quadratic():
    g = make_grid(5.0, 51)
    f = 3.0 + 2.0 * g.x
    assert trace0(f, g, 1) == pytest.approx(2.0, abs=1e-12)
    assert trace0(g.x**2, g, 2) == pytest.approx(2.0, abs=1e-9)
    assert trace0(f, g, 0) == 3.0


def test_trace_exact_on_cubic():
    g = make_grid(5.0, 51)
    f = g.x**3 - 2.0 * g.x**2 + 4.0
    assert trace0(f, g, 1) == pytest.approx(0.0, abs=1e-10)
    assert trace0(f, g, 2) == pytest.approx(-4.0, abs=1e-8)


def test_trace_of_wave_slope(params, grid, wave):
    expected = params.s * (params.v_plus - 1.0) / params.mu
    assert trace0(wave.v_bar, grid, 1) == pytest.approx(expected, abs=2e-5)


def test_trace_rejects_unsupported_order(g10):
    with pytest.raises(Exception, match="order"):
        trace0(np.zeros(g10.n), g10, 3)


def test_shift_identity(g10):
    f = np.cos(g10.x)
    np.testing.assert_array_equal(shift_sample(f, g10, 0.0, 0.0), f)


def test_shift_constant(g10):
    f = np.full(g10.n, 2.5)
    np.testing.assert_allclose(shift_sample(f, g10, 3.7, 2.5), 2.5, rtol=0, atol=1e-14)


def test_shift_exponential_oracle():
    g = make_grid(10.0, 1001)  # dx = 1e-2
    f = np.exp(-g.x)
    for y in (0.3775, 1.005):
        shifted = shift_sample(f, g, y, 0.0)
        inside = g.x + y <= g.R
        exact = np.exp(-(g.x + y)[inside])
        assert np.max(np.abs(shifted[inside] - exact)) <= 1e-6


def test_shift_uses_tail_beyond_domain(g10):
    f = np.exp(-g10.x)
    shifted = shift_sample(f, g10, 8.0, -1.0)
    assert np.all(shifted[g10.x + 8.0 > g10.R] == -1.0)


def test_shift_rejects_negative_offset(g10):
    with pytest.raises(Exception, match="nonnegative"):
        shift_sample(np.zeros(g10.n), g10, -0.5, 0.0)


@given(seed=st.integers(0, 10_000), y=st.floats(0.0, 5.0))
@settings(max_examples=40, deadline=None)
def test_shift_preserves_monotonicity(seed, y):
    g = make_grid(10.0, 201)
    r = np.random.default_rng(seed)
    f = np.cumsum(r.uniform(0.0, 1.0, g.n))  # nondecreasing data
    shifted = shift_sample(f, g, y, float(f[-1]))
    assert np.all(np.diff(shifted) >= -1e-12)


def test_tail_integral_matches_exponential():
    g = make_grid(40.0, 4001)
    f = np.exp(-g.x)
    # -int_x^inf e^{-z} dz = -e^{-x}
    np.testing.assert_allclose(tail_integral(f, g), -np.exp(-g.x), rtol=0, atol=2e-5)
    assert tail_integral(f, g)[-1] == 0.0


def test_tail_integral_inverts_derivative(g10):
    f = np.exp(-((g10.x - 4.0) ** 2))
    V = tail_integral(f, g10)
    np.testing.assert_allclose(derivative(V, g10, 1)[1:-1], f[1:-1], rtol=0, atol=1e-3)


def test_monotone_interpolator_flat_data_is_silent():
    x = np.linspace(0.0, 1.0, 11)
    vals = np.ones(11)
    with np.errstate(all="raise"):
        interp = monotone_interpolator(x, vals)
    assert float(interp(0.55)) == pytest.approx(1.0)

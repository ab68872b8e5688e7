import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardpulse.errors import AliasingError, BoundStateOnBoundary, DegenerateBoundState
from hardpulse.spectral import (BlaschkeProduct, CircleGrid, LaurentSeries, analytic_completion,
                                analytic_series, blaschke, circle_points, h1_norm,
                                outer_from_log_modulus, project_minus, project_minus_tilde,
                                project_plus, project_plus_tilde, sample, unsample)

cplx = st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False)


@st.composite
def series(draw, max_len=12):
    off = draw(st.integers(-8, 8))
    coeffs = draw(st.lists(cplx, min_size=0, max_size=max_len))
    return LaurentSeries(off, coeffs)


def test_coef_and_support():
    f = LaurentSeries(-2, [0, 3, 0, 5, 0])
    assert f.coef(-1) == 3 and f.coef(1) == 5 and f.coef(7) == 0
    assert f.support == (-1, 1)
    assert f.width == 3
    assert LaurentSeries.zero().support is None
    assert f.trim() == LaurentSeries(-1, [3, 0, 5])


def test_eval_matches_direct_sum():
    f = LaurentSeries(-3, [1, 2j, -1, 0.5])
    w = np.array([0.3 + 0.1j, 1.0, np.exp(0.7j)])
    direct = sum(c * w ** (k - 3) for k, c in enumerate(f.coeffs))
    assert np.allclose(f(w), direct, rtol=0, atol=1e-13)


@given(series(), series())
def test_product_is_pointwise(f, g):
    w = circle_points(32)
    assert np.allclose((f * g)(w), f(w) * g(w), atol=1e-9 * (1 + np.abs(f(w) * g(w)).max()))


@given(series(), series())
def test_sum_is_pointwise(f, g):
    w = circle_points(16)
    assert np.allclose((f + g)(w), f(w) + g(w), atol=1e-10)
    assert np.allclose((f - g)(w), f(w) - g(w), atol=1e-10)


@given(series())
def test_circle_conjugate(f):
    w = circle_points(16)
    assert np.allclose(f.conj()(w), np.conj(f(w)), atol=1e-10)


def test_derivative_and_shift():
    f = LaurentSeries(-1, [2, 1, 3])  # 2/w + 1 + 3w
    assert f.derivative() == LaurentSeries(-2, [-2, 0, 3])
    assert f.shift(2) == LaurentSeries(1, [2, 1, 3])


@given(series(max_len=20))
def test_sample_unsample_roundtrip(f):
    g = sample(f, 64)
    back = unsample(g, -32, 32)
    assert back.max_abs_diff(f) < 1e-12 * (1 + np.abs(f.coeffs).max(initial=0))


def test_sample_rejects_aliasing_and_bad_sizes():
    with pytest.raises(AliasingError):
        sample(LaurentSeries(0, np.ones(17)), 16)
    with pytest.raises(ValueError):
        sample(LaurentSeries.const(1), 12)
    with pytest.raises(ValueError):
        CircleGrid(10, np.zeros(10))


@given(series())
def test_projections_split(f):
    total = project_plus(f) + project_minus(f) + f.coef(0)
    assert total.max_abs_diff(f) == 0
    tilde = project_plus_tilde(f) + project_minus_tilde(f)
    assert tilde.max_abs_diff(f) < 1e-15 * (1 + np.abs(f.coeffs).max(initial=0))
    assert project_plus(f).offset >= 1 or project_plus(f).support is None


def test_h1_norm_by_hand():
    f = LaurentSeries(-1, [1, 0, 2])
    assert h1_norm(f) == pytest.approx(np.sqrt(2 * 1 + 2 * 4))


@given(st.lists(st.tuples(st.floats(0.05, 0.95), st.floats(0, 2 * np.pi)), min_size=1, max_size=4))
def test_blaschke_unimodular_and_zeros(zs):
    e = [r * np.exp(1j * t) for r, t in zs]
    bp = BlaschkeProduct(e)
    w = circle_points(64)
    assert np.allclose(np.abs(bp(w)), 1, atol=1e-12)
    assert np.allclose(bp(np.asarray(e)), 0, atol=1e-12)
    if len(set(np.round(e, 6))) == len(e):
        assert bp(0.0).real > 0 and abs(bp(0.0).imag) < 1e-12


def test_blaschke_derivative_by_finite_difference():
    bp = BlaschkeProduct([0.5 + 0.2j, -0.3j])
    h = 1e-6
    for k, wk in enumerate(bp.energies):
        fd = (bp(wk + h) - bp(wk - h)) / (2 * h)
        assert abs(bp.derivative_at_zero(k) - fd) < 1e-8


def test_blaschke_rejects_bad_energies():
    with pytest.raises(BoundStateOnBoundary):
        BlaschkeProduct([0.9999999])
    with pytest.raises(DegenerateBoundState):
        BlaschkeProduct([0.0])
    g, bp = blaschke([0.4], 32)
    assert np.allclose(g.values, bp(circle_points(32)))


def test_analytic_completion_of_known_function():
    # u = Re(1 + 2w + w²/3) has completion 1 + 2w + w²/3
    w = circle_points(64)
    F = 1 + 2 * w + w ** 2 / 3
    assert np.allclose(analytic_completion(F.real), F, atol=1e-13)


def test_outer_function_matches_zero_free_polynomial():
    # p(w) = 2 − w has no disk zeros, so it is its own outer part
    w = circle_points(256)
    p = 2 - w
    g = outer_from_log_modulus(np.log(np.abs(p)))
    assert np.allclose(g.values, p, atol=1e-12)
    coef = analytic_series(g.values)
    assert abs(coef.coef(0) - 2) < 1e-12 and abs(coef.coef(1) + 1) < 1e-12

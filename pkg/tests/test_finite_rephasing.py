import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardpulse.dist import dist_invert
from hardpulse.errors import FactorizationSingular, NotUnitary
from hardpulse.finite_rephasing import (RationalR, SlrPair, frt_invert, polynomial_from_json,
                                        polynomial_to_json, slr_design_B, slr_invert,
                                        slr_pair_from_pulse, spectral_factor_A_from_B)
from hardpulse.forward import find_bound_states, forward_scatter, norming_constants
from hardpulse.pulse import HardPulse
from hardpulse.spectral import circle_points

W = circle_points(512)

pulses = st.builds(
    lambda start, amps, ph: HardPulse(1.0, start, np.array(amps) * np.exp(1j * np.array(ph[:len(amps)]))),
    st.integers(-5, 5), st.lists(st.floats(0.01, 1.5), min_size=1, max_size=12),
    st.lists(st.floats(0, 2 * np.pi), min_size=12, max_size=12))


def test_rational_validation_and_eval():
    with pytest.raises(ValueError):
        RationalR([1.0, 0.2], [1.0])
    with pytest.raises(ValueError):
        RationalR([0, 0.2], [0, 1.0])
    rr = RationalR([0, 0.3], [1, -0.5], 2)
    w = np.array([0.3 + 0.1j, np.exp(0.4j)])
    assert np.allclose(rr(w), w ** -2 * 0.3 * w / (1 - 0.5 * w))
    assert np.allclose(rr.poles(), [2.0])
    assert RationalR.from_json(rr.to_json()).rho == 2


def contour_residue(fn, center, radius=1e-3, m=256):
    z = center + radius * circle_points(m)
    return np.mean(fn(z) * (z - center))


def test_bound_state_constants_by_contour_residue():
    rr = RationalR([0, 0.3, 0.1j], [1, -0.5 / 0.7 + 0.2j, 0.05], 1)
    for wk, ck in rr.bound_states():
        res = contour_residue(rr.r0, wk)
        assert abs(ck - res * wk ** (-rr.rho - 1)) < 1e-10


@pytest.mark.parametrize("rho", [0, 1, 3])
@pytest.mark.parametrize("PQ", [([0, 0.3], [1, -1 / 0.6]),
                                ([0, 0.2, 0.1j], [1, -0.5 / 0.7 + 0.2j, 0.05]),
                                ([0, 0.4, -0.1], [1, 0.3])])
def test_frt_agrees_with_dist_and_forward(rho, PQ):
    rr = RationalR(*PQ, rho)
    q = frt_invert(rr)
    assert q.stop <= rho
    d = forward_scatter(q)
    assert np.max(np.abs(d.b(W) / d.a(W) - rr(W))) < 1e-9
    p = dist_invert(rr.reduced_data(4096))
    js = range(max(p.start, q.start), rho)
    assert max(abs(p.omega(j) - q.omega(j)) for j in js) < 1e-9
    # disk poles of r₀ are the bound states of the pulse
    got = norming_constants(d.a, find_bound_states(q))
    want = rr.bound_states()
    assert len(got) == len(want)
    for (w1, c1), (w2, c2) in zip(got, want):
        assert abs(w1 - w2) < 1e-8 and abs(c1 - c2) < 1e-6 * max(1, abs(c2))


def test_frt_fixed_window():
    # r = 0.3/w is a single impulse at j = 1; the window runs on down to j = −4
    rr = RationalR([0, 0.3], [1.0], 2)
    q, info = frt_invert(rr, j_min=-4, return_info=True)
    assert info.j_last == -4 and info.steps == 6
    assert q.start == 1 and len(q) == 1


@given(pulses)
def test_slr_roundtrip_of_finite_pulse(p):
    pair = slr_pair_from_pulse(p)
    assert pair.unitarity_error() < 1e-12
    q = slr_invert(pair, delta=p.delta)
    assert q.start == p.start and len(q) == len(p)
    assert np.max(np.abs(q.omegas - p.omegas)) < 1e-9


def test_slr_pair_json_and_accessors():
    pair = slr_pair_from_pulse(HardPulse(1.0, 2, [0.3, 0.2j]))
    assert pair.degree == 1 and pair.rho == 4
    assert set(pair.to_json()) == {"A", "B", "rho"}
    d = forward_scatter(HardPulse(1.0, 2, [0.3, 0.2j]))
    assert np.allclose(pair.a(W), d.a(W)) and np.allclose(pair.b(W), d.b(W))


def test_slr_rejects_non_unitary():
    with pytest.raises(NotUnitary):
        slr_invert(SlrPair([1.0, 0.5], [0.5, 0.0], 1))


def test_spectral_factor_recovers_zero_free_a():
    # a of a small pulse has no disk zeros, so it is the minimum-phase factor
    p = HardPulse(1.0, 0, [0.3, 0.5j, -0.2, 0.4])
    pair = slr_pair_from_pulse(p)
    A = spectral_factor_A_from_B(pair.B)
    assert np.allclose(A, pair.A, atol=1e-10)


@given(st.integers(0, 30), st.floats(0.1, 0.95), st.integers(0, 2 ** 31))
def test_spectral_factor_properties(T, peak, seed):
    rng = np.random.default_rng(seed)
    B = rng.normal(size=T + 1) + 1j * rng.normal(size=T + 1)
    B *= peak / np.abs(np.polyval(B[::-1], W)).max()
    A = spectral_factor_A_from_B(B)
    assert SlrPair(A, B).unitarity_error() < 1e-9
    assert A[0].real > 0 and abs(A[0].imag) < 1e-12
    if T:
        assert np.min(np.abs(np.roots(A[::-1]))) > 1


def test_spectral_factor_singular():
    with pytest.raises(FactorizationSingular):
        spectral_factor_A_from_B([0.0, 1.0])


def test_slr_design_linear_phase():
    sd = slr_design_B(0.0, 20, band=(-0.4, 0.4), tau=0.4, delta2=0.01)
    assert np.allclose(sd.B, sd.B[::-1])
    assert sd.achieved_delta2 == pytest.approx(0.01, rel=1e-6)
    assert sd.alternations >= 12
    pair = sd.pair()
    assert pair.rho == 11 and pair.unitarity_error() < 1e-10
    with pytest.raises(ValueError):
        slr_design_B(0.0, 7, band=(-0.4, 0.4), tau=0.4)
    flat = slr_design_B(0.0, 4)
    assert np.allclose(flat.B, [0, 0, np.sqrt(0.5), 0, 0])


def test_polynomial_json():
    c = np.array([1, 2j, -0.5])
    assert np.array_equal(polynomial_from_json(polynomial_to_json(c)), c)

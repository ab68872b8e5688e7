import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hardpulse.dist import (build_fg, dist_invert, dist_invert_full, f_values, kernel_rj,
                            marchenko_gammas, marchenko_matrix, marchenko_solve, roundtrip_error,
                            workspace)
from hardpulse.design import ab_from_r, left_data
from hardpulse.errors import BoundStateRangeOverflow, TruncationInsufficient
from hardpulse.forward import ReducedScatteringData, find_bound_states, reduced_data
from hardpulse.pulse import HardPulse, scattering_gammas
from hardpulse.spectral import LaurentSeries, circle_points


def lobe(area, L=24, phase=0.3):
    t = np.arange(L) - (L - 1) / 2
    shape = np.exp(-(t / (0.25 * L)) ** 2)
    return HardPulse(1.0, -L // 2, shape * area / shape.sum() * np.exp(1j * phase))


def geometric_kernel_oracle(data, ms, n=4096):
    """f(−m) as FFT coefficients of r(w) − Σ c_k w/(w − w_k) on the circle."""
    w = circle_points(n)
    vals = data.r(w) - sum(c * w / (w - wk) for wk, c in data.bound_states)
    coef = np.fft.fft(vals) / n
    return coef[(-np.asarray(ms)) % n]


def test_kernel_sequence_against_fft_oracle():
    data = ReducedScatteringData(LaurentSeries(-3, [0.1, 0.2j, -0.1, 0.05]),
                                 ((0.5 + 0.2j, 0.3 - 0.1j), (-0.6j, 0.2)))
    ms = np.arange(0, 40)
    direct = f_values(data.r, data.energies, data.constants, -ms)
    assert np.allclose(direct, geometric_kernel_oracle(data, ms), atol=1e-13)
    rj = kernel_rj(data, 2, 10)
    assert rj.offset == -10
    assert np.allclose([rj.coef(-k) for k in range(1, 11)], f_values(data.r, data.energies,
                       data.constants, -np.arange(1, 11) - 1))


def test_bound_sum_overflow_guard():
    data = ReducedScatteringData(LaurentSeries.zero(), ((0.1, 1.0),))
    with pytest.raises(BoundStateRangeOverflow):
        f_values(data.r, data.energies, data.constants, np.arange(0, 40))


def test_one_by_one_marchenko_by_hand():
    # r_j = ρ₁/w + ρ₂/w²: with N = 1, (1 + |ρ₂|²) h₁ = −ρ₁*
    rho1, rho2 = 0.3 - 0.2j, 0.1 + 0.4j
    rj = LaurentSeries(-2, [rho2, rho1])
    h = marchenko_solve(rj, 1)
    assert h.coef(1) == pytest.approx(-np.conj(rho1) / (1 + abs(rho2) ** 2))


def test_single_term_kernel():
    # r_j = c/w: the product r_j h has no negative part, so h = −c* w exactly
    c = 0.4 - 0.7j
    h = marchenko_solve(LaurentSeries(-1, [c]), 1)
    assert h.coef(1) == pytest.approx(-np.conj(c))


@given(st.lists(st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
                min_size=2, max_size=12))
def test_marchenko_operator_positive_and_contractive(cs):
    N = len(cs) // 2
    rj = LaurentSeries(-len(cs), cs)
    H, rho = marchenko_matrix(rj, N)
    S = np.eye(N) + H.conj().T @ H
    assert np.linalg.eigvalsh(S).min() >= 1 - 1e-12
    h = marchenko_solve(rj, N)
    # (1 + H*H)⁻¹ has norm <= 1, so h is no larger than the right-hand side
    assert np.linalg.norm(h.coeffs) <= np.linalg.norm(rho[1:N + 1]) * (1 + 1e-12)


@pytest.mark.parametrize("area", [0.6 * np.pi, 1.8 * np.pi, 3.2 * np.pi])
def test_recovers_known_pulse(area):
    p = lobe(area)
    rd = reduced_data(p)
    res = dist_invert_full(rd)
    q = res.pulse
    assert res.gamma0_gap < 1e-10
    assert q.start <= p.start and q.stop >= p.stop
    ref = np.array([p.omega(j) for j in range(q.start, q.stop)])
    assert np.max(np.abs(q.omegas - ref)) < 1e-9
    assert res.diagnostics["roundtrip_error"] < 1e-9
    assert res.diagnostics["energy_residual"] < 1e-9


def test_marchenko_gammas_match_pulse():
    p = lobe(3.2 * np.pi)
    rd = reduced_data(p)
    gam = scattering_gammas(p)
    mg = marchenko_gammas(rd, range(-3, 15), 64)
    for j, g in mg.items():
        ref = gam[j - p.start] if p.start <= j < p.stop else 0
        assert abs(g - ref) < 1e-9


def test_zero_data_gives_zero_pulse():
    p = dist_invert(ReducedScatteringData(LaurentSeries.zero()))
    assert np.all(np.abs(p.omegas) < 1e-15)


def test_bound_state_only_data():
    # a pure soliton: r = 0 with one bound state
    data = ReducedScatteringData(LaurentSeries.zero(), ((0.5j, 0.4),))
    res = dist_invert_full(data)
    assert res.gamma0_gap < 1e-10
    # the soliton has infinite support; the error is set by the kernel tail cut-off
    assert res.diagnostics["roundtrip_error"] < 1e-8
    (bs,) = find_bound_states(res.pulse)
    assert abs(bs.w - 0.5j) < 1e-8


def test_truncation_too_short_raises():
    rd = reduced_data(lobe(1.8 * np.pi))
    with pytest.raises(TruncationInsufficient):
        dist_invert(rd, M_plus=2, M_minus=2, max_doublings=0)


def test_workspace_kernels():
    rd = reduced_data(lobe(1.8 * np.pi))
    ws, ab, left, n = workspace(rd)
    fr, gl = build_fg(rd, left_data(rd, ab_from_r(rd, n)), ws.M_plus, ws.M_minus)
    assert np.allclose(fr, ws.fr) and np.allclose(gl, ws.gl)
    assert ws.tail_plus < 1e-10 and ws.tail_minus < 1e-10


def test_roundtrip_error_of_exact_pulse():
    p = lobe(0.8 * np.pi)
    assert roundtrip_error(p, reduced_data(p)) < 1e-12

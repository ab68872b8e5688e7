import numpy as np
import pytest
from scipy.integrate import quad

from hardpulse.bridge import (ContinuumScatteringData, continuum_energy, discretize,
                              r_hat_from_xi)
from hardpulse.dist import dist_invert
from hardpulse.errors import EnergyNotInUpperHalfPlane
from hardpulse.pulse import hard_energy


def r_bump(xi):
    return 0.8 * np.exp(-xi ** 2)


def r_hat_bump(t):
    return 0.8 * np.sqrt(np.pi) * np.exp(-t ** 2 / 4)


def test_transform_of_gaussian():
    xi = np.linspace(-12, 12, 4001)
    t = np.array([0.0, 0.5, 2.0])
    got = r_hat_from_xi(xi, r_bump(xi), t, window=False)
    assert np.allclose(got, r_hat_bump(t), atol=1e-10)


def test_sampling_and_trim():
    cd = ContinuumScatteringData.from_function(r_hat_bump, 0.1)
    assert cd.start < 0 and cd.start + len(cd.r_hat) - 1 == -cd.start
    assert np.abs(cd.r_hat).min() >= 1e-13
    assert np.allclose(cd.times, 0.2 * (cd.start + np.arange(len(cd.r_hat))))
    back = ContinuumScatteringData.from_json(cd.to_json())
    assert back.start == cd.start and np.array_equal(back.r_hat, cd.r_hat)


def test_discretized_series_reproduces_r():
    d = 0.05
    cd = ContinuumScatteringData.from_function(r_hat_bump, d, [1j], [1.0])
    rd = discretize(cd)
    xi = np.array([0.0, 0.4, 1.3])
    w = np.exp(2j * xi * d)
    assert np.allclose(rd.r(w), w * r_bump(xi), atol=1e-10)
    (wk, ck), = rd.bound_states
    assert wk == pytest.approx(np.exp(-2 * d))
    assert ck == pytest.approx(2j * d * wk)


def test_energy_formula():
    xi = np.linspace(-10, 10, 20001)
    cd = ContinuumScatteringData(np.zeros(1), 0.1, [1j, 0.5 + 0.25j], [1.0, 1.0])
    e = continuum_energy(cd, xi, r_bump(xi))
    ref = 4 / np.pi * quad(lambda x: np.log1p(r_bump(x) ** 2), -np.inf, np.inf)[0] + 16 * 1.25
    assert e == pytest.approx(ref, rel=1e-10)


def test_energy_convergence_from_below():
    ref = 4 / np.pi * quad(lambda x: np.log1p(r_bump(x) ** 2), -np.inf, np.inf)[0] + 16
    gaps = []
    for d in (0.2, 0.1):
        cd = ContinuumScatteringData.from_function(r_hat_bump, d, [1j], [1.0])
        gaps.append(ref - hard_energy(dist_invert(discretize(cd), delta=d)))
    assert 0 < gaps[1] < gaps[0]


def test_rejects_lower_half_plane():
    cd = ContinuumScatteringData(np.ones(3), 0.1, [-0.5j], [1.0])
    with pytest.raises(EnergyNotInUpperHalfPlane):
        discretize(cd)
    with pytest.raises(ValueError):
        ContinuumScatteringData(np.ones(3), 0.1, [1j], [])

"""Continuum reduced scattering data → discrete reduced data, and the continuum energy.

The continuum transform is r̂(t) = ∫ r(ξ) e^{−itξ} dξ.  With step Δ the data
(r; ξ_k; C_k) is replaced by

    r̃(w) = (Δ/π) w Σ_n r̂(2nΔ) wⁿ,    w_k = e^{2iξ_kΔ},    c_k = 2Δi w_k C_k,

which approximates w·r(ξ) near w = 1 (w = e^{2iξΔ}).  Only right-side data is
produced; the left data must be derived afterwards by `design.left_data`.
"""

from dataclasses import dataclass

import numpy as np
from scipy.integrate import trapezoid

from .errors import EnergyNotInUpperHalfPlane
from .forward import ReducedScatteringData
from .spectral import LaurentSeries


@dataclass(frozen=True)
class ContinuumScatteringData:
    """r̂ sampled at t = 2nΔ for n = start, start+1, ..., plus bound states (ξ_k, C_k)."""

    r_hat: np.ndarray
    delta: float
    energies: tuple = ()
    constants: tuple = ()
    start: int = 0

    def __post_init__(self):
        object.__setattr__(self, "r_hat", np.asarray(self.r_hat, dtype=complex).ravel())
        object.__setattr__(self, "energies", tuple(complex(x) for x in self.energies))
        object.__setattr__(self, "constants", tuple(complex(x) for x in self.constants))
        if len(self.energies) != len(self.constants):
            raise ValueError("one constant per energy is required")
        if self.delta <= 0:
            raise ValueError("delta must be positive")

    @property
    def times(self):
        return 2 * self.delta * (self.start + np.arange(len(self.r_hat)))

    @classmethod
    def from_function(cls, r_hat_fn, delta, energies=(), constants=(), tol=1e-13, max_n=1 << 16):
        """Sample a callable r̂ on {2nΔ}, symmetric about 0, until it falls below tol at both ends."""
        n = 16
        while True:
            idx = np.arange(-n, n + 1)
            vals = np.asarray(r_hat_fn(2 * delta * idx), dtype=complex)
            if max(abs(vals[0]), abs(vals[-1])) < tol or n >= max_n:
                break
            n *= 2
        nz = np.flatnonzero(np.abs(vals) >= tol)
        if nz.size == 0:
            return cls(np.zeros(0), delta, energies, constants, 0)
        return cls(vals[nz[0]:nz[-1] + 1], delta, energies, constants, int(idx[nz[0]]))

    def to_json(self):
        return {"delta": self.delta, "r_hat": [[v.real, v.imag] for v in self.r_hat],
                "r_hat_start_index": self.start,
                "energies": [[e.real, e.imag] for e in self.energies],
                "constants": [[c.real, c.imag] for c in self.constants]}

    @classmethod
    def from_json(cls, d):
        return cls([complex(*x) for x in d["r_hat"]], float(d["delta"]),
                   [complex(*x) for x in d.get("energies", [])],
                   [complex(*x) for x in d.get("constants", [])], int(d.get("r_hat_start_index", 0)))


def r_hat_from_xi(xi, r, times, window=True):
    """r̂(t) = ∫ r(ξ) e^{−itξ} dξ from samples on a uniform ξ grid (Hann taper at the ends)."""
    xi = np.asarray(xi, dtype=float)
    r = np.asarray(r, dtype=complex)
    if window:
        r = r * np.hanning(len(xi))
    dxi = xi[1] - xi[0]
    return np.exp(-1j * np.outer(np.asarray(times, dtype=float), xi)) @ r * dxi


def discretize(data):
    """Discrete reduced data (r̃; w_k; c_k) for continuum data."""
    for xi in data.energies:
        if xi.imag <= 0:
            raise EnergyNotInUpperHalfPlane(f"bound state ξ = {xi} is not in the upper half plane")
    d = data.delta
    r = LaurentSeries(data.start + 1, d / np.pi * data.r_hat).trim()
    w = [np.exp(2j * xi * d) for xi in data.energies]
    c = [2j * d * wk * C for wk, C in zip(w, data.constants)]
    return ReducedScatteringData(r, tuple(zip(w, c)))


def continuum_energy(data, xi=None, r=None):
    """(4/π)∫ log(1+|r(ξ)|²) dξ + 16 Σ Im ξ_k, the integral by the trapezoid rule."""
    e = 16 * sum(x.imag for x in data.energies)
    if xi is not None and r is not None and len(xi):
        e += 4 / np.pi * trapezoid(np.log1p(np.abs(np.asarray(r)) ** 2), np.asarray(xi, dtype=float))
    return float(e)

"""Hard and softened RF pulses, the ω ↔ μ ↔ γ conversions, and Bloch simulators.

Sign chain used throughout the package (checked against the Bloch equation
dM/dt = M × [Re ω, Im ω, z]):

    γ_j = i (ω_j*/|ω_j|) tan(|ω_j|/2),      ω_j = 2i (γ_j*/|γ_j|) arctan|γ_j|

and the profile at frequency z is read off the reflection coefficient at
w = exp(-iΔz).  `to_potential` returns the Zakharov-Shabat potential
μ_j = -(i/2)ω_j*; in those terms γ_j = -gamma_of_mu(μ_j).
"""

from dataclasses import dataclass

import numpy as np

from .errors import FlipAngleOverflow


@dataclass(frozen=True, eq=False)
class HardPulse:
    """Impulses ω_j at times jΔ for j = start, start+1, ...; zero ends are trimmed."""

    delta: float
    start: int
    omegas: np.ndarray

    def __post_init__(self):
        om = np.array(self.omegas, dtype=complex).ravel()
        nz = np.flatnonzero(om)
        start = int(self.start)
        if nz.size == 0:
            om, start = om[:0], 0
        else:
            start, om = start + int(nz[0]), om[nz[0]:nz[-1] + 1]
        om.setflags(write=False)
        object.__setattr__(self, "omegas", om)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "delta", float(self.delta))

    @classmethod
    def zero(cls, delta=1.0):
        return cls(delta, 0, [])

    def __len__(self):
        return len(self.omegas)

    @property
    def stop(self):
        """One past the last stored impulse."""
        return self.start + len(self.omegas)

    @property
    def rho(self):
        """Rephasing steps: smallest ρ with ω_j = 0 for all j >= ρ."""
        return self.stop if len(self.omegas) else None

    @property
    def duration(self):
        return len(self.omegas) - 1 if len(self.omegas) else 0

    def omega(self, j):
        i = j - self.start
        return self.omegas[i] if 0 <= i < len(self.omegas) else 0j

    @property
    def times(self):
        return self.delta * (self.start + np.arange(len(self.omegas)))

    def to_json(self):
        return {"delta": self.delta, "start": self.start,
                "omegas": [[float(w.real), float(w.imag)] for w in self.omegas]}

    @classmethod
    def from_json(cls, d):
        return cls(float(d["delta"]), int(d["start"]),
                   [complex(re, im) for re, im in d["omegas"]])


@dataclass(frozen=True, eq=False)
class SoftPulse:
    """Piecewise-constant amplitude ω_j/Δ on [jΔ, (j+1)Δ)."""

    delta: float
    start: int
    amplitudes: np.ndarray

    @property
    def stop(self):
        return self.start + len(self.amplitudes)


@dataclass(frozen=True, eq=False)
class MagnetizationProfile:
    freqs: np.ndarray
    vecs: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.freqs, dtype=float).ravel()
        v = np.asarray(self.vecs, dtype=float).reshape(len(z), 3)
        order = np.argsort(z, kind="stable")
        object.__setattr__(self, "freqs", z[order])
        object.__setattr__(self, "vecs", v[order])

    @property
    def mx(self):
        return self.vecs[:, 0]

    @property
    def my(self):
        return self.vecs[:, 1]

    @property
    def mz(self):
        return self.vecs[:, 2]

    @property
    def mxy(self):
        return self.vecs[:, 0] + 1j * self.vecs[:, 1]


def w_of_z(z, delta):
    return np.exp(-1j * delta * np.asarray(z, dtype=float))


def z_of_w(w, delta):
    return -np.angle(w) / delta


def grid_freqs(n, delta):
    """Frequencies z matching the n-point circle grid, in grid order."""
    return z_of_w(np.exp(2j * np.pi * np.arange(n) / n), delta)


def to_potential(p):
    return -0.5j * np.conj(p.omegas)


def _phase(x):
    x = np.asarray(x, dtype=complex)
    a = np.abs(x)
    out = np.zeros_like(x)
    nz = a > 0
    out[nz] = x[nz] / a[nz]
    return out, a


def gamma_of_mu(mu):
    u, a = _phase(mu)
    if np.any(a >= np.pi / 2):
        raise FlipAngleOverflow("|μ| >= π/2 cannot be a single hard impulse")
    out = u * np.tan(a)
    return out if np.ndim(mu) else complex(out)


def mu_of_gamma(gamma):
    u, a = _phase(gamma)
    out = u * np.arctan(a)
    return out if np.ndim(gamma) else complex(out)


def gammas_from_omegas(omegas):
    """Recursion coefficients γ_j for impulses ω_j."""
    u, a = _phase(omegas)
    if np.any(a >= np.pi):
        raise FlipAngleOverflow("flip angle of a single impulse must be below π")
    return 1j * np.conj(u) * np.tan(a / 2)


def omegas_from_gammas(gammas):
    u, a = _phase(gammas)
    return 2j * np.conj(u) * np.arctan(a)


def pulse_from_gammas(gammas, start, delta=1.0):
    return HardPulse(delta, start, omegas_from_gammas(gammas))


def scattering_gammas(p):
    return gammas_from_omegas(p.omegas)


def soften(p):
    return SoftPulse(p.delta, p.start, np.asarray(p.omegas) / p.delta)


def soft_energy(s):
    return float(np.sum(np.abs(s.amplitudes) ** 2) * s.delta)


def hard_energy(p):
    """Energy of the softened version of p, Δ⁻¹Σ|ω_j|²."""
    return soft_energy(soften(p))


def _cross_field(mx, my, mz, ox, oy, oz):
    # M × Ω
    return my * oz - mz * oy, mz * ox - mx * oz, mx * oy - my * ox


def bloch_simulate(s, zs, substeps=64, return_drift=False):
    """RK4 integration of dM/dt = M × [Re ω, Im ω, z] from [0,0,1], then derotation."""
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    mx = np.zeros_like(zs)
    my = np.zeros_like(zs)
    mz = np.ones_like(zs)
    h = s.delta / substeps
    for amp in s.amplitudes:
        ox, oy = amp.real, amp.imag
        for _ in range(substeps):
            k1 = _cross_field(mx, my, mz, ox, oy, zs)
            k2 = _cross_field(mx + h / 2 * k1[0], my + h / 2 * k1[1], mz + h / 2 * k1[2], ox, oy, zs)
            k3 = _cross_field(mx + h / 2 * k2[0], my + h / 2 * k2[1], mz + h / 2 * k2[2], ox, oy, zs)
            k4 = _cross_field(mx + h * k3[0], my + h * k3[1], mz + h * k3[2], ox, oy, zs)
            mx = mx + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            my = my + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
            mz = mz + h / 6 * (k1[2] + 2 * k2[2] + 2 * k3[2] + k4[2])
    norm = np.sqrt(mx ** 2 + my ** 2 + mz ** 2)
    drift = float(np.max(np.abs(norm - 1))) if len(zs) else 0.0
    m = (mx + 1j * my) * np.exp(1j * zs * s.delta * s.stop) / norm
    prof = MagnetizationProfile(zs, np.column_stack([m.real, m.imag, mz / norm]))
    return (prof, drift) if return_drift else prof


def rotation_matrix(axis, angle):
    """Rotation generated by dM/dt = M × axis for time angle/|axis| (left-handed sense)."""
    axis = np.asarray(axis, dtype=float)
    n = axis / np.linalg.norm(axis)
    K = np.array([[0, -n[2], n[1]], [n[2], 0, -n[0]], [-n[1], n[0], 0]])
    t = -angle
    return np.eye(3) + np.sin(t) * K + (1 - np.cos(t)) * K @ K


def hard_simulate(p, zs):
    """Exact SO(3) hard-pulse recursion: impulse rotation, then free precession over Δ."""
    zs = np.atleast_1d(np.asarray(zs, dtype=float))
    M = np.zeros((len(zs), 3))
    M[:, 2] = 1.0
    prec = np.exp(-1j * p.delta * zs)
    for om in p.omegas:
        if om != 0:
            M = M @ rotation_matrix([om.real, om.imag, 0.0], abs(om)).T
        m = (M[:, 0] + 1j * M[:, 1]) * prec
        M[:, 0], M[:, 1] = m.real, m.imag
    m = (M[:, 0] + 1j * M[:, 1]) * np.exp(1j * zs * p.delta * p.stop)
    return MagnetizationProfile(zs, np.column_stack([m.real, m.imag, M[:, 2]]))


def softening_error_bound(p, z):
    return 0.5 * p.delta * abs(z) * float(np.sum(np.abs(p.omegas)))


def geodesic_distance(u, v):
    """Great-circle distance between unit vectors (row-wise)."""
    u = np.atleast_2d(u)
    v = np.atleast_2d(v)
    c = np.linalg.norm(np.cross(u, v), axis=1)
    d = np.sum(u * v, axis=1)
    return np.arctan2(c, d)

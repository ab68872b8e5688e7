"""Reflection coefficients and (a, b) pairs from design goals.

Covers the stereographic map between profiles and r, the factorization
a = Blaschke · outer, the left data (s, c̃), the equiripple (Remez) design of
real r, the ripple conversion formulas, and the self-refocused and half-pulse
recipes.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import FullInversionUnrepresentable, IllConditionedBoundState, InfeasibleHalfPulse
from .forward import BoundState, DiscreteScatteringData, ReducedScatteringData
from .pulse import MagnetizationProfile
from .remez import remez_cosine
from .spectral import (BlaschkeProduct, CircleGrid, LaurentSeries, analytic_completion,
                       analytic_series, circle_points, sample, unsample)


@dataclass(frozen=True)
class IdealProfileSpec:
    theta0: float
    z0: float = 0.0
    c0: float = 1.0


def ideal_profile(spec, zs):
    """Rotation by theta0 about x inside |z − z0| <= c0, equilibrium elsewhere."""
    zs = np.asarray(zs, dtype=float)
    inside = np.abs(zs - spec.z0) <= spec.c0
    v = np.zeros((len(zs), 3))
    v[:, 2] = 1
    v[inside] = [0, np.sin(spec.theta0), np.cos(spec.theta0)]
    return MagnetizationProfile(zs, v)


def r_from_profile(M, tol=1e-9):
    v = M.vecs if isinstance(M, MagnetizationProfile) else np.atleast_2d(M)
    if np.any(v[:, 2] <= -1 + tol):
        raise FullInversionUnrepresentable("M_z = -1 has no finite reflection coefficient")
    return (v[:, 0] + 1j * v[:, 1]) / (1 + v[:, 2])


def _grid_values(r, n):
    if isinstance(r, LaurentSeries):
        return sample(r, n).values
    if isinstance(r, CircleGrid):
        return r.values
    return np.asarray(r, dtype=complex)


@dataclass
class ABFactor:
    """a = Blaschke · outer and b = r·a on an n-point grid, with disk evaluators."""

    n: int
    r: np.ndarray
    a: CircleGrid
    b: CircleGrid
    outer: LaurentSeries
    blaschke: BlaschkeProduct
    bound_states: tuple = ()

    def a_at(self, w):
        return self.blaschke(w) * self.outer(w)

    def a_prime(self, k):
        return self.blaschke.derivative_at_zero(k) * self.outer(self.blaschke.energies[k])

    def scattering_data(self):
        a = analytic_series(self.a.values).trim(1e-17)
        b = unsample(self.b).trim(1e-17)
        bs = tuple(BoundState(w, c * w * self.a_prime(k))
                   for k, (w, c) in enumerate(self.bound_states))
        return DiscreteScatteringData(a, b, bs)


def ab_from_r(data, n=4096):
    """Scattering pair from reduced data: |a|² = 1/(1+|r|²), a zero exactly at each w_k."""
    if not isinstance(data, ReducedScatteringData):
        data = ReducedScatteringData(data if isinstance(data, LaurentSeries) else
                                     unsample(CircleGrid(len(data), np.asarray(data))), ())
    r = _grid_values(data.r, n)
    bp = BlaschkeProduct(data.energies)
    logmod = -0.5 * np.log1p(np.abs(r) ** 2)
    og = np.exp(analytic_completion(logmod))
    a = bp(circle_points(n)) * og
    return ABFactor(n, r, CircleGrid(n, a), CircleGrid(n, r * a), analytic_series(og), bp,
                    data.bound_states)


@dataclass
class LeftData:
    """s = −b*/a on the grid, its Laurent coefficients, and the left constants c̃_k."""

    s: CircleGrid
    s_series: LaurentSeries
    bound_states: tuple = field(default=())

    @property
    def energies(self):
        return np.array([w for w, _ in self.bound_states], dtype=complex)

    @property
    def constants(self):
        return np.array([c for _, c in self.bound_states], dtype=complex)


def left_data(data, ab=None, n=4096):
    """Left reduced data: s = −b*/a and c̃_k = −w_k⁻¹ / (c_k a′(w_k)²)."""
    if ab is None:
        ab = ab_from_r(data, n)
    s = -np.conj(ab.b.values) / ab.a.values
    bs = []
    for k, (w, c) in enumerate(data.bound_states):
        da = ab.a_prime(k)
        if abs(da) < 1e-12:
            raise IllConditionedBoundState(f"a'(w_k) = {abs(da):.2e} at w_k = {w}")
        bs.append((w, -1 / (w * c * da ** 2)))
    return LeftData(CircleGrid(ab.n, s), unsample(CircleGrid(ab.n, s)), tuple(bs))


# ---------------------------------------------------------------- ripple relations

def delta2_trans(d):
    """Out-of-slice transverse ripple of an IST design with |r| <= d."""
    d = np.asarray(d, dtype=float)
    return 2 * d / (1 + d ** 2)


def delta2_trans_slr(d):
    d = np.asarray(d, dtype=float)
    return 2 * d * np.sqrt(1 - d ** 2)


def delta1_long(d):
    """In-slice |M_z| for a 90° IST design with |r − 1| <= d."""
    d = np.asarray(d, dtype=float)
    u = d - d ** 2 / 2
    return u / (1 - u)


def delta1_long_slr(d):
    d = np.asarray(d, dtype=float)
    return 2 * np.sqrt(2) * d + 2 * d ** 2


def delta2_ist_for_trans(t):
    """Inverse of delta2_trans on [0, 1)."""
    return t / (1 + np.sqrt(1 - t ** 2))


def delta2_slr_for_trans(t):
    """Inverse of delta2_trans_slr on the branch d < 2^{-1/2}."""
    return np.sqrt(t ** 2 / (2 * (1 + np.sqrt(1 - t ** 2))))


# ---------------------------------------------------------------- equiripple

@dataclass(frozen=True)
class EquirippleSpec:
    """Real equiripple r with rho rephasing steps (cosine degree rho − 1).

    band is the passband [lo, hi] in θ; tau the transition width.  One of
    delta1/delta2 may be None and is then reported rather than imposed; with
    both present their ratio sets the weights.
    """

    rho: int
    tau: float
    band: tuple
    delta1: float = None
    delta2: float = None
    flip: float = np.pi / 2


@dataclass
class EquirippleResult:
    r: LaurentSeries
    achieved_delta1: float
    achieved_delta2: float
    alternations: int
    degree: int
    iterations: int = 0

    def report(self):
        return {"achieved_delta1": self.achieved_delta1, "achieved_delta2": self.achieved_delta2,
                "alternations": self.alternations}


def _band_geometry(band):
    lo, hi = band
    return 0.5 * (lo + hi), 0.5 * (hi - lo)


def cosine_to_series(coeffs, center=0.0):
    """Laurent coefficients of θ ↦ Σ a_k cos k(θ − center)."""
    n = len(coeffs) - 1
    k = np.arange(-n, n + 1)
    c = np.zeros(2 * n + 1, dtype=complex)
    c[n] = coeffs[0]
    c[n + 1:] = 0.5 * np.asarray(coeffs[1:])
    c[:n] = 0.5 * np.asarray(coeffs[1:])[::-1]
    return LaurentSeries(-n, c * np.exp(-1j * k * center))


def weighted_remez(n, passband_hw, tau, pass_value, delta1=None, delta2=None):
    """Two-band Remez where one ripple is imposed by tuning the stopband weight."""
    pass_edge = min(passband_hw, np.pi)
    stop_edge = passband_hw + tau
    bands = [(0.0, pass_edge), (stop_edge, np.pi)]

    def run(K):
        return remez_cosine(n, bands, [pass_value, 0.0], [1.0, K])

    if delta1 is not None and delta2 is not None:
        return run(delta1 / delta2)
    if delta1 is None and delta2 is None:
        return run(1.0)
    if delta2 is not None:
        fn = lambda lk: np.log(run(np.exp(lk)).band_errors[1] / delta2)
    else:
        fn = lambda lk: np.log(run(np.exp(lk)).band_errors[0] / delta1)
    lo, hi = -12.0, 12.0
    flo, fhi = fn(lo), fn(hi)
    if flo * fhi > 0:
        # target outside the reachable range: return the closer end
        return run(np.exp(lo if abs(flo) < abs(fhi) else hi))
    return run(np.exp(brentq(fn, lo, hi, xtol=1e-10)))


def equiripple_r(spec, n=4096):
    """Equiripple real r approximating tan(flip/2)·χ_band, support [−(ρ−1), ρ−1]."""
    center, hw = _band_geometry(spec.band)
    value = np.tan(spec.flip / 2)
    deg = spec.rho - 1
    if hw <= 0 or value == 0:
        return EquirippleResult(LaurentSeries.zero(), 0.0, 0.0, 0, deg)
    if hw + spec.tau >= np.pi or deg == 0:
        r = LaurentSeries.const(value)
        return EquirippleResult(r, 0.0, value, 0, deg)
    res = weighted_remez(deg, hw, spec.tau, value, spec.delta1, spec.delta2)
    r = cosine_to_series(res.coeffs, center)
    r = LaurentSeries(r.offset, r.coeffs)
    return EquirippleResult(r, res.band_errors[0], res.band_errors[1], res.alternations, deg,
                            res.iterations)


# ---------------------------------------------------------------- self-refocused and half pulses

def _distance_outside(theta, band):
    """Circular distance from θ to the interval band (0 inside)."""
    center, hw = _band_geometry(band)
    d = np.abs(np.angle(np.exp(1j * (theta - center))))
    return np.maximum(d - hw, 0.0)


def raised_cosine_log_modulus(theta, k1, k2, tau, band):
    d = _distance_outside(theta, band)
    ramp = np.where(d >= tau, 1.0, 0.5 * (1 - np.cos(np.pi * np.minimum(d, tau) / tau)))
    return k1 - (k1 + k2) * ramp


def _winding(fn, radius, m=4096):
    w = radius * circle_points(m)
    v = fn(w)
    ph = np.unwrap(np.angle(np.append(v, v[0])))
    return int(np.round((ph[-1] - ph[0]) / (2 * np.pi)))


def _newton(fn, dfn, z, iters=50, tol=1e-14):
    for _ in range(iters):
        step = fn(z) / dfn(z)
        z = z - step
        if abs(step) < tol:
            break
    return z


def zeros_in_disk(fn, dfn, radii=None, m=4096):
    """Zeros of an analytic fn inside the largest of the given circles.

    Winding numbers on the nested circles count the zeros; the power sums
    (1/2πi)∮ zᵖ f′/f dz on the outer circle give them through Newton's
    identities, and each one is polished by Newton's method.
    """
    if radii is None:
        radii = [0.1 * k for k in range(1, 10)] + [0.95, 0.99]
    counts = [_winding(fn, rr, m) for rr in radii]
    total = counts[-1]
    if total <= 0:
        return np.array([], dtype=complex), dict(zip(radii, counts))
    z = radii[-1] * circle_points(m)
    q = z * dfn(z) / fn(z)
    s = np.array([np.mean(q * z ** p) for p in range(1, total + 1)])
    # elementary symmetric polynomials from power sums
    e = np.zeros(total + 1, dtype=complex)
    e[0] = 1
    for k in range(1, total + 1):
        e[k] = sum((-1) ** (i - 1) * e[k - i] * s[i - 1] for i in range(1, k + 1)) / k
    poly = e * (-1.0) ** np.arange(total + 1)
    found = np.array([_newton(fn, dfn, r0) for r0 in np.roots(poly)], dtype=complex)
    return found, dict(zip(radii, counts))


@dataclass
class SelfRefocused:
    r: CircleGrid
    R: LaurentSeries
    constant: complex
    poles: np.ndarray
    residues: np.ndarray
    winding: dict

    def reduced_data(self):
        """(r; w_k, c_k) with c_k = Res(r, w_k)/w_k."""
        bs = tuple((w, res / w) for w, res in zip(self.poles, self.residues))
        return ReducedScatteringData(unsample(self.r).trim(1e-16), bs)


def self_refocused_r(k1, k2, tau, band, n=4096, constant="offband"):
    """r = e^R/(1+e^R) − const with Re R a raised-cosine plateau (k1 in band, −k2 outside).

    constant="offband" subtracts the mean of e^R/(1+e^R) beyond band+tau, a
    number of order e^{−k2}.  constant="origin" subtracts its value at w = 0,
    σ(mean Re R), which makes r vanish at the origin so the inverted pulse is
    zero for j >= 0 exactly; that constant grows with the band's share of the circle.
    """
    theta = 2 * np.pi * np.arange(n) / n
    u = raised_cosine_log_modulus(theta, k1, k2, tau, band)
    Rg = analytic_completion(u)
    Rs = analytic_series(Rg)
    dRs = Rs.derivative()
    sig = 1 / (1 + np.exp(-Rg))
    if constant == "origin":
        const = complex(1 / (1 + np.exp(-np.mean(u))))
    elif constant == "offband":
        off = _distance_outside(theta, band) >= tau
        const = complex(np.mean(sig[off])) if off.any() else 0j
    else:
        raise ValueError(f"unknown constant rule {constant!r}")
    fn = lambda w: 1 + np.exp(Rs(w))
    dfn = lambda w: dRs(w) * np.exp(Rs(w))
    with np.errstate(over="ignore", invalid="ignore"):
        poles, winding = zeros_in_disk(fn, dfn)
    residues = np.array([1 / dRs(p) for p in poles], dtype=complex)
    return SelfRefocused(CircleGrid(n, sig - const), Rs, const, poles, residues, winding)


@dataclass
class HalfPulse:
    r: CircleGrid
    R: CircleGrid


def half_pulse_r(Mx):
    """r = (1−R)/(1+R) with R outer and |R| = √((1−Mx)/(1+Mx)), so Re-part maps to Mx."""
    v = Mx.values if isinstance(Mx, CircleGrid) else np.asarray(Mx, dtype=float)
    v = np.real(v)
    if np.any(np.abs(v) >= 1):
        raise InfeasibleHalfPulse("|Mx| must stay below 1")
    R = np.exp(analytic_completion(0.5 * (np.log1p(-v) - np.log1p(v))))
    n = len(v)
    return HalfPulse(CircleGrid(n, (1 - R) / (1 + R)), CircleGrid(n, R))


# ---------------------------------------------------------------- desk-scale slice setups

@dataclass(frozen=True)
class DeskSetup:
    """A continuum slice spec (band ξ ∈ [−1, 1]) mapped to step Δ.

    With w = e^{2iξΔ} the band becomes θ ∈ [−2Δ, 2Δ], the transition τ becomes
    2Δτ, and a rephasing time ρ becomes N = ρ/Δ steps of support on each side.
    """

    rho_c: float
    tau_c: float
    delta2_trans: float
    delta: float = 0.1
    flip: float = np.pi / 2

    @property
    def N(self):
        return int(round(self.rho_c / self.delta))

    @property
    def band(self):
        return (-2 * self.delta, 2 * self.delta)

    @property
    def tau(self):
        return 2 * self.delta * self.tau_c

    def equiripple_spec(self):
        return EquirippleSpec(rho=self.N + 1, tau=self.tau, band=self.band,
                              delta2=float(delta2_ist_for_trans(self.delta2_trans)), flip=self.flip)

    def slr_delta2(self):
        return float(delta2_slr_for_trans(self.delta2_trans))

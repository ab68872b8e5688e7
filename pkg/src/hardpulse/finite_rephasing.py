"""Direct recursions for reflection data with finite rephasing time.

For r = w^{−ρ} r₀ with r₀ = P/Q and P(0) = 0, peeling one impulse off the end
of the pulse maps R = P/Q to

    (γ* + w⁻¹R) / (1 − γ w⁻¹R),      γ = −conj(P̂(1)/Q̂(0)),

which again vanishes at the origin.  On polynomials this is
P ← γ*Q + P/w and Q ← Q − γP/w, so degrees never grow.  The SLR algorithm
is the same map on a unitary pair (A, B) with r₀ = wB/A, where the degrees drop
by one per step and the pulse ends after T+1 impulses.
"""

import logging
from dataclasses import dataclass

import numpy as np

from .errors import FactorizationSingular, FrtBreakdown, NotUnitary
from .forward import ReducedScatteringData
from .pulse import HardPulse, omegas_from_gammas
from .spectral import CircleGrid, LaurentSeries, analytic_completion, circle_points, unsample

log = logging.getLogger(__name__)


def _pv(c, w):
    return np.polyval(np.asarray(c)[::-1], w)


def _trim_top(c, rel=1e-13):
    c = np.asarray(c, dtype=complex)
    scale = np.max(np.abs(c)) if len(c) else 0.0
    nz = np.flatnonzero(np.abs(c) > rel * scale)
    return c[:nz[-1] + 1] if nz.size else c[:1] * 0


@dataclass(frozen=True)
class RationalR:
    """r = w^{−ρ} P/Q with ascending coefficient arrays P, Q and P(0) = 0."""

    P: np.ndarray
    Q: np.ndarray
    rho: int = 0

    def __post_init__(self):
        P = np.atleast_1d(np.asarray(self.P, dtype=complex))
        Q = np.atleast_1d(np.asarray(self.Q, dtype=complex))
        if abs(P[0]) > 1e-14 * max(1.0, np.max(np.abs(P))):
            raise ValueError("P must vanish at the origin")
        if abs(Q[0]) == 0:
            raise ValueError("Q must not vanish at the origin")
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "rho", int(self.rho))
        if len(P) > 1 and len(Q) > 1 and np.any(P[1:]):
            rp, rq = np.roots(_trim_top(P)[::-1]), np.roots(_trim_top(Q)[::-1])
            rp = rp[np.abs(rp) > 1e-12]
            if rp.size and rq.size and np.min(np.abs(rp[:, None] - rq[None, :])) < 1e-8:
                log.warning("P and Q share a root to 1e-8; the rational form is not reduced")

    def r0(self, w):
        return _pv(self.P, w) / _pv(self.Q, w)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        return w ** (-self.rho) * self.r0(w)

    def poles(self):
        q = _trim_top(self.Q)
        return np.roots(q[::-1]) if len(q) > 1 else np.array([], dtype=complex)

    def bound_states(self):
        """Disk poles w_k of r₀ with c_k = Res(r₀, w_k) w_k^{−ρ−1}."""
        dq = np.polyder(_trim_top(self.Q)[::-1])
        out = []
        for wk in self.poles():
            if abs(wk) < 1:
                res = _pv(self.P, wk) / np.polyval(dq, wk)
                out.append((complex(wk), complex(res * wk ** (-self.rho - 1))))
        return tuple(sorted(out, key=lambda x: -abs(x[0])))

    def reduced_data(self, n=4096):
        return ReducedScatteringData(unsample(CircleGrid(n, self(circle_points(n)))),
                                     self.bound_states())

    def to_json(self):
        return {"P": [[c.real, c.imag] for c in self.P], "Q": [[c.real, c.imag] for c in self.Q],
                "rho": self.rho}

    @classmethod
    def from_json(cls, d):
        return cls([complex(*x) for x in d["P"]], [complex(*x) for x in d["Q"]], d.get("rho", 0))


@dataclass
class FrtInfo:
    j_last: int
    tail_estimate: float
    steps: int


def frt_invert(data, j_min=None, delta=1.0, quiet_steps=16, small=1e-12, max_steps=100000,
               return_info=False):
    """Pulse for rational r, built from j = ρ−1 downward.

    Stops at j_min if given, otherwise after quiet_steps consecutive |γ_j| < small.
    """
    P = _trim_top(data.P)
    Q = _trim_top(data.Q)
    P = P.copy()
    P[0] = 0
    gam = []
    quiet = 0
    j = data.rho - 1
    while True:
        if j_min is not None and j < j_min:
            break
        if len(gam) >= max_steps:
            log.warning("frt_invert stopped after %d steps with |γ| = %.2e", max_steps, abs(gam[-1]))
            break
        q0 = Q[0]
        if abs(q0) < 1e-14 * max(1.0, np.max(np.abs(Q))):
            raise FrtBreakdown("denominator vanishes at the origin", j)
        P, Q = P / q0, Q / q0
        p1 = P[1] if len(P) > 1 else 0j
        g = -np.conj(p1)
        gam.append(g)
        # R ← (γ* + R/w) / (1 − γ R/w)
        Pw = P[1:] if len(P) > 1 else np.zeros(1, dtype=complex)
        n = max(len(Q), len(Pw))
        Pn = np.zeros(n, dtype=complex)
        Qn = np.zeros(n, dtype=complex)
        Pn[:len(Q)] += np.conj(g) * Q
        Pn[:len(Pw)] += Pw
        Qn[:len(Q)] += Q
        Qn[:len(Pw)] -= g * Pw
        Pn[0] = 0
        P, Q = _trim_top(Pn), _trim_top(Qn)
        j -= 1
        if j_min is None:
            quiet = quiet + 1 if abs(g) < small else 0
            if quiet >= quiet_steps or not np.any(P):
                break
    gam = np.array(gam[::-1], dtype=complex)
    start = j + 1
    pulse = HardPulse(delta, start, omegas_from_gammas(gam))
    if not return_info:
        return pulse
    tail = float(np.sum(np.abs(gam[:quiet_steps]))) if len(gam) else 0.0
    return pulse, FrtInfo(start, tail, len(gam))


# ---------------------------------------------------------------- SLR

@dataclass(frozen=True)
class SlrPair:
    """Polynomials A, B (ascending, degree T) with |A|²+|B|² = 1; a = A, b = w^{1−ρ}B."""

    A: np.ndarray
    B: np.ndarray
    rho: int = 0

    def __post_init__(self):
        A = np.atleast_1d(np.asarray(self.A, dtype=complex))
        B = np.atleast_1d(np.asarray(self.B, dtype=complex))
        n = max(len(A), len(B))
        A = np.concatenate((A, np.zeros(n - len(A))))
        B = np.concatenate((B, np.zeros(n - len(B))))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "rho", int(self.rho))

    @property
    def degree(self):
        return len(self.A) - 1

    def unitarity_error(self, n=None):
        n = n or max(256, 4 * len(self.A))
        w = circle_points(n)
        return float(np.max(np.abs(np.abs(_pv(self.A, w)) ** 2 + np.abs(_pv(self.B, w)) ** 2 - 1)))

    @property
    def a(self):
        return LaurentSeries(0, self.A)

    @property
    def b(self):
        return LaurentSeries(1 - self.rho, self.B)

    def to_json(self):
        return {"A": [[c.real, c.imag] for c in self.A], "B": [[c.real, c.imag] for c in self.B],
                "rho": self.rho}


def slr_invert(pair, delta=1.0, tol=1e-6, check_steps=True):
    """The T+1 impulses (j = ρ−T−1 … ρ−1) of a unitary polynomial pair."""
    err = pair.unitarity_error()
    if err > tol:
        raise NotUnitary(f"|A|²+|B|² deviates from 1 by {err:.2e}")
    A = pair.A.copy()
    B = pair.B.copy()
    T = pair.degree
    gam = []
    for step in range(T + 1):
        g = -np.conj(B[0] / A[0])
        c = 1 / np.sqrt(1 + abs(g) ** 2)
        An = c * (A - g * B)
        Bn = c * (np.conj(g) * A + B)
        # An's top coefficient and Bn's constant term vanish for a unitary pair
        A, B = An[:-1], Bn[1:]
        gam.append(g)
        if check_steps and len(A):
            e = SlrPair(A, B).unitarity_error()
            if e > 1e-10:
                log.warning("unitarity drift %.2e after SLR step %d", e, step)
    gam = np.array(gam[::-1], dtype=complex)
    return HardPulse(delta, pair.rho - T - 1, omegas_from_gammas(gam))


def slr_pair_from_pulse(p):
    """(A, B, ρ) for a finite pulse: A = a, B = w^{ρ−1} b with ρ = p.stop."""
    from .forward import forward_scatter
    d = forward_scatter(p)
    T = len(p) - 1
    A = d.a.coef_range(0, T + 1)
    B = d.b.shift(p.stop - 1).coef_range(0, T + 1)
    return SlrPair(A, B, p.stop)


def _cepstral_factor(B, n):
    w = circle_points(n)
    m = 1 - np.abs(_pv(B, w)) ** 2
    A = np.exp(analytic_completion(0.5 * np.log(m)))
    return np.fft.fft(A)[:len(B)] / n


def _unitarity(A, B, w):
    return float(np.max(np.abs(np.abs(_pv(A, w)) ** 2 + np.abs(_pv(B, w)) ** 2 - 1)))


def spectral_factor_A_from_B(B, cluster_tol=1e-6, n=None):
    """Minimum-phase A with |A|² = 1 − |B|² on the circle and A(0) > 0."""
    B = np.atleast_1d(np.asarray(B, dtype=complex))
    n = n or max(1024, 16 * len(B))
    w = circle_points(n)
    bmax = float(np.max(np.abs(_pv(B, w))))
    if bmax >= 1 - 1e-9:
        raise FactorizationSingular(f"max |B| = {bmax:.12f} leaves no room for A")
    Bt = _trim_top(B)
    T = len(B) - 1
    if not np.any(Bt):
        A = np.zeros(T + 1, dtype=complex)
        A[0] = 1
        return A
    # w^T (1 − B B★), a polynomial of degree 2T
    prod = -np.convolve(B, np.conj(B[::-1]))
    prod[T] += 1
    prod = _trim_top(prod)
    A = None
    lead_shift = len(prod) - 1
    if lead_shift > 0:
        rts = np.roots(prod[::-1])
        out = rts[np.abs(rts) > 1]
        if len(out) == lead_shift // 2 and np.min(np.abs(np.abs(rts) - 1)) > cluster_tol:
            A = np.poly(out)[::-1].astype(complex)
    if A is not None:
        scale = np.sqrt(np.mean(1 - np.abs(_pv(B, w)) ** 2) / np.mean(np.abs(_pv(A, w)) ** 2))
        A = A * scale
        if _unitarity(A, B, w) > 1e-12:
            # high-degree roots lose accuracy; keep whichever factor is closer
            C = _cepstral_factor(B, max(n, 2 ** 16))
            if _unitarity(C, B, w) < _unitarity(A, B, w):
                A = C
    else:
        log.info("spectral factor: roots cluster near the circle, using the cepstral method")
        A = _cepstral_factor(B, max(n, 2 ** 16))
    A = A * np.exp(-1j * np.angle(A[0]))
    out = np.zeros(T + 1, dtype=complex)
    out[:min(len(A), T + 1)] = A[:T + 1]
    return out


@dataclass
class SlrDesign:
    B: np.ndarray
    achieved_delta1: float
    achieved_delta2: float
    alternations: int

    def pair(self, rho=None):
        A = spectral_factor_A_from_B(self.B)
        T = len(self.B) - 1
        return SlrPair(A, self.B, T // 2 + 1 if rho is None else rho)


def slr_design_B(mz, T, band=None, tau=None, delta1=None, delta2=None):
    """Linear-phase B of even degree T with |B| ≈ √((1 − mz)/2) in band, 0 outside.

    With band None the target is the constant √((1 − mz)/2) everywhere.  The
    magnitude is designed as a real cosine polynomial of degree T/2 by the same
    weighted Remez exchange as the equiripple reflection coefficient.
    """
    from .design import cosine_to_series, weighted_remez
    if T % 2:
        raise ValueError("linear-phase design needs an even degree")
    target = float(np.sqrt(max(0.0, (1 - mz) / 2)))
    B = np.zeros(T + 1, dtype=complex)
    if target == 0:
        return SlrDesign(B, 0.0, 0.0, 0)
    if band is None:
        B[T // 2] = target
        return SlrDesign(B, 0.0, 0.0, 0)
    lo, hi = band
    center, hw = 0.5 * (lo + hi), 0.5 * (hi - lo)
    res = weighted_remez(T // 2, hw, tau, target, delta1, delta2)
    ser = cosine_to_series(res.coeffs, center)
    B[:] = ser.coef_range(-(T // 2), T // 2 + 1)
    return SlrDesign(B, res.band_errors[0], res.band_errors[1], res.alternations)


def polynomial_to_json(c):
    return {"coeffs": [[float(x.real), float(x.imag)] for x in np.asarray(c, dtype=complex)]}


def polynomial_from_json(d):
    return np.array([complex(*x) for x in d["coeffs"]], dtype=complex)

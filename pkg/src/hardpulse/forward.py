"""Forward discrete scattering: pulse → Jost solutions → (a, b), r = b/a, bound states.

The left Jost pair obeys

    [A; B]_{j+1} = (1+|γ_j|²)^{-1/2} [[1, γ_j], [-γ_j* w, w]] [A; B]_j,   (A, B)_{-∞} = (1, 0)

so a = A₋ past the pulse and b = w^{-j} B₋,j there.  The right pair runs the
inverse step backwards from (1, 0) at +∞.
"""

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import NonSimpleZero
from .pulse import MagnetizationProfile, grid_freqs, scattering_gammas
from .spectral import TOL_BOUNDARY, CircleGrid, LaurentSeries, circle_points, fourier_coeffs

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class JostPair:
    side: str
    j: int
    A: LaurentSeries
    B: LaurentSeries


@dataclass(frozen=True)
class BoundState:
    w: complex
    c_prime: complex


@dataclass(frozen=True)
class DiscreteScatteringData:
    a: LaurentSeries
    b: LaurentSeries
    bound_states: tuple = ()
    trail: tuple = field(default=(), repr=False, compare=False)

    @property
    def r(self):
        return lambda w: self.b(w) / self.a(w)

    def to_json(self):
        return {"a": self.a.to_json(), "b": self.b.to_json(),
                "bound_states": [{"w": [bs.w.real, bs.w.imag],
                                  "c_prime": [bs.c_prime.real, bs.c_prime.imag]}
                                 for bs in self.bound_states]}

    @classmethod
    def from_json(cls, d):
        bs = tuple(BoundState(complex(*x["w"]), complex(*x["c_prime"]))
                   for x in d.get("bound_states", []))
        return cls(LaurentSeries.from_json(d["a"]), LaurentSeries.from_json(d["b"]), bs)


@dataclass(frozen=True)
class ReducedScatteringData:
    """Reflection coefficient r (as Laurent coefficients) and bound states (w_k, c_k)."""

    r: LaurentSeries
    bound_states: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "bound_states",
                           tuple((complex(w), complex(c)) for w, c in self.bound_states))

    @property
    def energies(self):
        return np.array([w for w, _ in self.bound_states], dtype=complex)

    @property
    def constants(self):
        return np.array([c for _, c in self.bound_states], dtype=complex)

    def to_json(self):
        return {"r": self.r.to_json(),
                "bound_states": [{"w": [w.real, w.imag], "c": [c.real, c.imag]}
                                 for w, c in self.bound_states]}

    @classmethod
    def from_json(cls, d):
        return cls(LaurentSeries.from_json(d["r"]),
                   tuple((complex(*x["w"]), complex(*x["c"])) for x in d.get("bound_states", [])))


def _left_step(A, B, g):
    # arrays indexed by power of w, same length, with a spare top slot
    c = 1 / np.sqrt(1 + abs(g) ** 2)
    tmp = B - np.conj(g) * A
    A = c * (A + g * B)
    B = np.concatenate(([0j], c * tmp[:-1]))
    return A, B


def _left_arrays(gammas):
    n = len(gammas)
    A = np.zeros(n + 1, dtype=complex)
    B = np.zeros(n + 1, dtype=complex)
    A[0] = 1
    trail = []
    for g in gammas:
        A, B = _left_step(A, B, g)
        trail.append((A, B))
    return A, B, trail


def forward_scatter(p, keep_trail=False):
    """Scattering data (a, b) of a finite hard pulse as exact polynomials."""
    gam = scattering_gammas(p)
    A, B, trail = _left_arrays(gam)
    a = LaurentSeries(0, A).trim()
    b = LaurentSeries(-p.stop, B).trim()
    if not len(p):
        a, b = LaurentSeries.const(1.0), LaurentSeries.zero()
    jt = ()
    if keep_trail:
        jt = tuple(JostPair("minus", p.start + i + 1, LaurentSeries(0, x), LaurentSeries(0, y))
                   for i, (x, y) in enumerate(trail))
    return DiscreteScatteringData(a, b, (), jt)


def jost_minus(p, j):
    """(A₋,j, B₋,j) for any integer j."""
    gam = scattering_gammas(p)
    k = min(max(j - p.start, 0), len(gam))
    A, B, _ = _left_arrays(gam[:k])
    extra = j - p.start - k if j > p.start else 0
    return JostPair("minus", j, LaurentSeries(0, A), LaurentSeries(extra, B))


def _right_conj(gam, start, j):
    """K = A*₊,j and L = w·B*₊,j (both analytic) by the backward recursion."""
    stop = start + len(gam)
    K = np.array([1 + 0j])
    L = np.array([0j])
    jj = stop
    while jj > j:
        jj -= 1
        i = jj - start
        g = gam[i] if 0 <= i < len(gam) else 0j
        c = 1 / np.sqrt(1 + abs(g) ** 2)
        n = max(len(K), len(L)) + 1
        Kn = np.zeros(n, dtype=complex)
        Ln = np.zeros(n, dtype=complex)
        Kn[:len(K)] += K
        Kn[:len(L)] -= np.conj(g) * L
        Ln[1:len(K) + 1] += g * K
        Ln[1:len(L) + 1] += L
        K, L = c * Kn, c * Ln
        if g == 0 and jj < start:
            # outside the support the step is a pure shift; skip ahead
            L = np.concatenate((np.zeros(jj - j, dtype=complex), L))
            K = np.concatenate((K, np.zeros(jj - j, dtype=complex)))
            break
    return K, L


def jost_plus(p, j):
    """(A₊,j, B₊,j); A₊ and B₊ carry only nonpositive powers of w."""
    K, L = _right_conj(scattering_gammas(p), p.start, j)
    A = LaurentSeries(0, K).conj()
    B = LaurentSeries(-1, L).conj()
    return JostPair("plus", j, A.trim(), B.trim())


def mrd(r):
    """Unit vectors [2Re r, 2Im r, 1-|r|²]/(1+|r|²), one row per sample."""
    r = np.asarray(r, dtype=complex)
    d = 1 + np.abs(r) ** 2
    return np.column_stack([2 * r.real / d, 2 * r.imag / d, (1 - np.abs(r) ** 2) / d])


def profile_from_r(r, zs=None, delta=1.0):
    """Magnetization from reflection-coefficient samples.

    With a CircleGrid (or plain grid-ordered samples) the frequencies default
    to those of the grid points for step delta.
    """
    vals = r.values if isinstance(r, CircleGrid) else np.asarray(r, dtype=complex)
    if zs is None:
        zs = grid_freqs(len(vals), delta)
    return MagnetizationProfile(zs, mrd(vals))


def profile_of_pulse(p, zs):
    """Profile of p at frequencies zs computed from r = b/a."""
    from .pulse import w_of_z
    d = forward_scatter(p)
    w = w_of_z(zs, p.delta)
    return MagnetizationProfile(zs, mrd(d.b(w) / d.a(w)))


def _polish(coeffs_desc, z, iters=4):
    """A few Newton steps on all roots at once; non-finite steps are skipped."""
    d = np.polyder(coeffs_desc)
    z = np.array(z, dtype=complex)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            dz = np.polyval(coeffs_desc, z) / np.polyval(d, z)
            z = np.where(np.isfinite(dz), z - dz, z)
    return z


def disk_roots(a, tol=TOL_BOUNDARY, polish=True):
    """Zeros of the polynomial a inside the disk; returns (inside, near_boundary)."""
    a = a.trim()
    if a.offset < 0:
        raise ValueError("a must be a polynomial in w")
    desc = np.concatenate((a.coeffs[::-1], np.zeros(a.offset)))
    rts = np.roots(desc) if len(desc) > 1 else np.array([], dtype=complex)
    if polish and len(rts):
        rts = _polish(desc, rts)
    mod = np.abs(rts)
    inside = rts[mod < 1 - tol]
    near = rts[(mod >= 1 - tol) & (mod <= 1)]
    return inside, near


def find_bound_states(p, check_tol=1e-6):
    """Zeros w_k of a in the disk with c′_k = A₋,j(w_k)/(−B*₊,j(w_k) w_kʲ).

    c′_k does not depend on j; it is evaluated at j = 0 and cross-checked at
    j = 1, moving both inside the pulse support when B₊,j vanishes there.
    """
    d = forward_scatter(p)
    inside, near = disk_roots(d.a)
    if len(near):
        log.warning("roots of a within %g of the unit circle ignored: %s", TOL_BOUNDARY, near)
    if len(inside) > 1:
        dist = np.abs(inside[:, None] - inside[None, :]) + np.eye(len(inside))
        if dist.min() < 1e-6:
            raise NonSimpleZero("a has a multiple zero in the disk")
    if not len(inside):
        return ()
    j0 = min(max(0, p.start), p.stop - 1)
    j1 = j0 + 1 if j0 + 1 < p.stop else j0 - 1
    cps = []
    for j in (j0, j1):
        Am = jost_minus(p, j).A
        K, L = _right_conj(scattering_gammas(p), p.start, j)
        Bps = LaurentSeries(-1, L)
        cps.append(Am(inside) / (-Bps(inside) * inside ** j))
    gap = np.max(np.abs(cps[0] - cps[1]) / np.maximum(1, np.abs(cps[0])))
    if gap > check_tol:
        log.warning("norming constants differ between j=%d and j=%d by %.3g", j0, j1, gap)
    order = np.argsort(-np.abs(inside))
    return tuple(BoundState(complex(inside[k]), complex(cps[0][k])) for k in order)


def norming_constants(a, bound_states):
    """Reduced constants c_k = c′_k / (w_k a′(w_k)) for a polynomial a."""
    da = a.derivative()
    return tuple((bs.w, bs.c_prime / (bs.w * da(bs.w))) for bs in bound_states)


def r_series(a, b, n=4096, tol=1e-15, max_n=2 ** 20):
    """Laurent coefficients of b/a on the circle, growing the grid until the tails vanish."""
    while True:
        w = circle_points(n)
        c = fourier_coeffs(b(w) / a(w))
        edge = np.abs(c[n // 2 - n // 16: n // 2 + n // 16]).max()
        if edge <= tol * max(1.0, np.abs(c).max()) or n >= max_n:
            idx = np.arange(-(n // 2), n // 2)
            return LaurentSeries(-(n // 2), c[idx % n]).trim(tol * 1e-3)
        n *= 2


def reduced_data(p, n=4096):
    """Reduced scattering data (r; w_k, c_k) of a finite pulse."""
    d = forward_scatter(p)
    bs = find_bound_states(p)
    return ReducedScatteringData(r_series(d.a, d.b, n), norming_constants(d.a, bs))


def _quad_grid(a, n):
    a = a.trim()
    rts = np.array([])
    if a.width > 1:
        desc = a.coeffs[::-1]
        rts = _polish(desc, np.roots(desc))
    if len(rts):
        mod = np.abs(rts)
        q = np.max(np.minimum(mod, 1 / np.maximum(mod, 1e-300)))
        if q < 1:
            need = 36 / max(-np.log(q), 1e-12)
            while n < need and n < 2 ** 22:
                n *= 2
    return n, rts


def energy_terms(p, data=None, n=4096):
    """(LHS, RHS) of Σ log(1+tan²(|ω_j|/2)) = (1/2π)∫log(1+|r|²) − 2Σ log|w_k|."""
    if data is None:
        data = forward_scatter(p)
    lhs = float(-2 * np.sum(np.log(np.cos(np.abs(p.omegas) / 2))))
    n, rts = _quad_grid(data.a, n)
    w = circle_points(n)
    av, bv = data.a(w), data.b(w)
    integral = float(np.mean(np.log(np.abs(av) ** 2 + np.abs(bv) ** 2) - np.log(np.abs(av) ** 2)))
    inside = rts[np.abs(rts) < 1] if len(rts) else rts
    rhs = integral - 2 * float(np.sum(np.log(np.abs(inside))))
    return lhs, rhs


def energy_residual(p, data=None, n=4096):
    lhs, rhs = energy_terms(p, data, n)
    return abs(lhs - rhs)


def unitarity_error(data, n=4096):
    w = circle_points(n)
    return float(np.max(np.abs(np.abs(data.a(w)) ** 2 + np.abs(data.b(w)) ** 2 - 1)))

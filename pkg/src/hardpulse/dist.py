"""Discrete inverse scattering: reduced data (r; w_k, c_k) → hard pulse.

The right recursion runs j = M₊−1 … 0 on the pair K = A*₊,j+1, L = wB*₊,j+1
and reads the sequence f(n) = r̂(n) − Σ c_k w_k^{−n}.  The left recursion runs
j = −M₋ … 0 on (A₋,j, B₋,j) and reads g(n) = ŝ(n) − Σ c̃_k w_k^{−n−1}, where
s = −b*/a and c̃_k come from the factorization in `design`.  The truncated
Marchenko system is an independent route to each γ_j.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .design import ab_from_r, left_data
from .errors import BoundStateRangeOverflow, DistBreakdown, TruncationInsufficient
from .forward import ReducedScatteringData, energy_residual, forward_scatter
from .pulse import HardPulse, omegas_from_gammas
from .spectral import LaurentSeries, circle_points, unsample

log = logging.getLogger(__name__)

TAIL_TOL = 1e-10
GAP_TOL = 1e-6
RANGE_LIMIT = 1e12


def _bound_sum(energies, consts, idx, extra=0):
    """Σ_k c_k w_k^{−n−extra} for each n in idx, guarding against blow-up."""
    idx = np.asarray(idx)
    out = np.zeros(len(idx), dtype=complex)
    for w, c in zip(energies, consts):
        e = -(idx + extra)
        if e.size and np.abs(w) ** float(e.min()) > RANGE_LIMIT:
            raise BoundStateRangeOverflow(
                f"w_k^(-n) exceeds {RANGE_LIMIT:g} on the requested index range (|w_k| = {abs(w):.3g})")
        out += c * w ** e.astype(float)
    return out


def f_values(r, energies, consts, idx):
    """f(n) = r̂(n) − Σ c_k w_k^{−n} at the integers idx."""
    idx = np.asarray(idx, dtype=int)
    rh = np.array([r.coef(int(n)) for n in idx], dtype=complex) if len(idx) else np.zeros(0, complex)
    return rh - _bound_sum(energies, consts, idx)


def g_values(s, energies, consts, idx):
    """g(n) = ŝ(n) − Σ c̃_k w_k^{−n−1} at the integers idx."""
    idx = np.asarray(idx, dtype=int)
    sh = np.array([s.coef(int(n)) for n in idx], dtype=complex) if len(idx) else np.zeros(0, complex)
    return sh - _bound_sum(energies, consts, idx, extra=1)


def _tail_index(seq, tol):
    """Smallest M with Σ_{m >= M} |seq[m]| < tol (seq indexed by m >= 0)."""
    tails = np.cumsum(np.abs(seq)[::-1])[::-1]
    bad = np.flatnonzero(tails >= tol)
    return int(bad[-1]) + 1 if bad.size else 0


def _geometric_reach(energies, consts, tol):
    """Index beyond which every |c_k| |w_k|^m tail sum is below tol."""
    m = 0
    for w, c in zip(energies, consts):
        q = abs(w)
        if abs(c) > 0 and q > 0:
            m = max(m, int(np.ceil(np.log(tol * (1 - q) / abs(c)) / np.log(q))) + 1)
    return max(m, 0)


@dataclass
class DistWorkspace:
    """Kernel sequences read by the recursions.

    fr[m] = f(−m) and gl[m] = g(−m) for m = 0, 1, ...; the right recursion
    reads fr[0 : M_plus], the left one gl[0 : M_minus + 1].
    """

    fr: np.ndarray
    gl: np.ndarray
    M_plus: int
    M_minus: int
    gammas_right: dict = field(default_factory=dict)
    gammas_left: dict = field(default_factory=dict)

    @property
    def tail_plus(self):
        return float(np.sum(np.abs(self.fr[self.M_plus:])))

    @property
    def tail_minus(self):
        return float(np.sum(np.abs(self.gl[self.M_minus + 1:])))


def build_fg(data, left, m_plus, m_minus):
    """f(−m) for 0 <= m <= m_plus and g(−m) for 0 <= m <= m_minus."""
    fr = f_values(data.r, data.energies, data.constants, -np.arange(m_plus + 1))
    gl = g_values(left.s_series, left.energies, left.constants, -np.arange(m_minus + 1))
    return fr, gl


def kernel_rj(data, j, N):
    """r_j as the Laurent series Σ_{n=1}^{N} f(−n−j+1) w^{−n}."""
    n = np.arange(1, N + 1)
    rho = f_values(data.r, data.energies, data.constants, -n - j + 1)
    return LaurentSeries(-N, rho[::-1])


def _step_right(K, L, g):
    c = 1 / np.sqrt(1 + abs(g) ** 2)
    Kn = np.empty(len(K) + 1, dtype=complex)
    Ln = np.empty(len(K) + 1, dtype=complex)
    Kn[:-1] = K - np.conj(g) * L
    Kn[-1] = 0
    Ln[0] = 0
    Ln[1:] = g * K + L
    return c * Kn, c * Ln


def dist_right(ws, stop=0):
    """γ_j for j = M₊−1 down to stop from the right kernel."""
    fr = ws.fr
    K = np.array([1 + 0j])
    L = np.array([0j])
    out = {}
    for j in range(ws.M_plus - 1, stop - 1, -1):
        fv = fr[j:j + len(K)]
        if len(fv) < len(K):
            fv = np.concatenate((fv, np.zeros(len(K) - len(fv), dtype=complex)))
        num = np.dot(fv, K)
        den = K[0] - np.dot(fv[1:], L[1:])
        if abs(den) < 1e-14:
            raise DistBreakdown(f"right recursion denominator {abs(den):.2e}", j)
        g = -np.conj(num / den)
        out[j] = g
        K, L = _step_right(K, L, g)
    ws.gammas_right = out
    return out


def _step_left(A, B, g):
    c = 1 / np.sqrt(1 + abs(g) ** 2)
    An = np.empty(len(A) + 1, dtype=complex)
    Bn = np.empty(len(A) + 1, dtype=complex)
    An[:-1] = A + g * B
    An[-1] = 0
    Bn[0] = 0
    Bn[1:] = B - np.conj(g) * A
    return c * An, c * Bn


def dist_left(ws, stop=0):
    """γ_j for j = −M₋ up to stop from the left kernel."""
    gl = ws.gl
    A = np.array([1 + 0j])
    B = np.array([0j])
    out = {}
    for j in range(-ws.M_minus, stop + 1):
        gv = gl[-j:-j + len(A)]
        if len(gv) < len(A):
            gv = np.concatenate((gv, np.zeros(len(A) - len(gv), dtype=complex)))
        num = np.dot(gv, A)
        den = A[0] - np.dot(gv[1:], B[1:])
        if abs(den) < 1e-14:
            raise DistBreakdown(f"left recursion denominator {abs(den):.2e}", j)
        g = num / den
        out[j] = g
        A, B = _step_left(A, B, g)
    ws.gammas_left = out
    return out


def _s_grid(data, n):
    """Left data on a grid large enough that ŝ has decayed at ±n/2."""
    width = data.r.width
    while n < 4 * width:
        n *= 2
    while True:
        ab = ab_from_r(data, n)
        left = left_data(data, ab)
        c = np.abs(left.s_series.coeffs)
        edge = c[: n // 16].max() + c[-n // 16:].max()
        if edge < 1e-15 * max(1.0, c.max()) or n >= 2 ** 20:
            return ab, left, n
        n *= 2


def workspace(data, M_plus=None, M_minus=None, n=4096, tail_tol=TAIL_TOL):
    """Build the kernels and pick M± by the tail rule unless given."""
    ab, left, n = _s_grid(data, n)
    r_reach = max(-(data.r.support[0]) + 1 if data.r.support else 0, 0)
    reach_p = max(r_reach, _geometric_reach(data.energies, data.constants, tail_tol)) + 1
    reach_m = max(n // 2 - 1, 1)
    fr_full, gl_full = build_fg(data, left, reach_p, reach_m)
    if M_plus is None:
        M_plus = max(_tail_index(fr_full, tail_tol), 1)
    if M_minus is None:
        M_minus = max(_tail_index(gl_full[1:], tail_tol), 0)
    return _sized(data, left, M_plus, M_minus, n), ab, left, n


def _sized(data, left, M_plus, M_minus, n):
    if M_minus > n // 2 - 1:
        raise TruncationInsufficient(f"M_minus = {M_minus} exceeds the grid half-width {n // 2}")
    fr, gl = build_fg(data, left, M_plus, M_minus)
    return DistWorkspace(fr, gl, M_plus, M_minus)


@dataclass
class DistResult:
    pulse: HardPulse
    gammas: np.ndarray
    start: int
    M_plus: int
    M_minus: int
    gamma0_gap: float
    grid: int
    doublings: int = 0
    diagnostics: dict = field(default_factory=dict)


def _invert(data, M_plus, M_minus, delta, n, tail_tol, max_doublings):
    if not isinstance(data, ReducedScatteringData):
        data = ReducedScatteringData(data, ())
    ws, ab, left, n = workspace(data, M_plus, M_minus, n, tail_tol)
    doublings = 0
    while True:
        right = dist_right(ws)
        lft = dist_left(ws)
        gap = abs(right[0] - lft[0])
        if gap <= GAP_TOL:
            break
        if doublings >= max_doublings:
            raise TruncationInsufficient(
                f"left/right γ₀ differ by {gap:.2e} after {doublings} doublings "
                f"(M+ = {ws.M_plus}, M- = {ws.M_minus})")
        doublings += 1
        log.info("γ₀ gap %.2e, doubling M± to %d, %d", gap, 2 * ws.M_plus, 2 * ws.M_minus)
        ws = _sized(data, left, 2 * ws.M_plus, max(2 * ws.M_minus, 1), n)
    gam = np.array([lft[j] for j in range(-ws.M_minus, 0)] +
                   [right[j] for j in range(0, ws.M_plus)], dtype=complex)
    pulse = HardPulse(delta, -ws.M_minus, omegas_from_gammas(gam))
    return DistResult(pulse, gam, -ws.M_minus, ws.M_plus, ws.M_minus, float(gap), n, doublings)


def roundtrip_error(pulse, data, n=4096):
    """max |b/a − r| on the n-grid for the forward-scattered pulse."""
    d = forward_scatter(pulse)
    w = circle_points(n)
    r = data.r if isinstance(data.r, LaurentSeries) else unsample(data.r)
    return float(np.max(np.abs(d.b(w) / d.a(w) - r(w))))


def dist_invert_full(data, M_plus=None, M_minus=None, delta=1.0, n=4096,
                     tail_tol=TAIL_TOL, max_doublings=2, diagnostics=True):
    """Invert reduced data; returns a DistResult with the pulse and a diagnostics dict."""
    res = _invert(data, M_plus, M_minus, delta, n, tail_tol, max_doublings)
    if diagnostics:
        if not isinstance(data, ReducedScatteringData):
            data = ReducedScatteringData(data, ())
        res.diagnostics = {
            "gamma0_gap": res.gamma0_gap,
            "M_plus": res.M_plus,
            "M_minus": res.M_minus,
            "doublings": res.doublings,
            "grid": res.grid,
            "energy_residual": energy_residual(res.pulse) if len(res.pulse) else 0.0,
            "roundtrip_error": roundtrip_error(res.pulse, data, res.grid),
        }
    return res


def dist_invert(data, M_plus=None, M_minus=None, delta=1.0, n=4096, tail_tol=TAIL_TOL,
                max_doublings=2):
    """Hard pulse whose reduced scattering data is `data`."""
    return _invert(data, M_plus, M_minus, delta, n, tail_tol, max_doublings).pulse


# ---------------------------------------------------------------- Marchenko oracle

def marchenko_matrix(rj, N):
    """Hankel H[l, m] = ρ_{l+m} (l, m = 1..N) of the kernel r_j = Σ ρ_n w^{−n}."""
    rho = np.array([rj.coef(-n) for n in range(0, 2 * N + 1)], dtype=complex)
    idx = np.arange(1, N + 1)
    return rho[idx[:, None] + idx[None, :]], rho


def marchenko_solve(rj, N=None):
    """Coefficients h_1..h_N of h solving (1 + Π₊r_j*Π₋r_j)h = −Π₊r_j*."""
    if N is None:
        N = max(-rj.offset, 1) if len(rj.coeffs) else 1
    H, rho = marchenko_matrix(rj, N)
    S = np.eye(N) + H.conj().T @ H
    rhs = -np.conj(rho[1:N + 1])
    h = sla.cho_solve(sla.cho_factor(S, lower=True), rhs)
    res = np.max(np.abs(S @ h - rhs)) / max(1.0, np.max(np.abs(rhs)), np.max(np.abs(h)))
    if res > 1e-10:
        log.warning("Marchenko solve residual %.2e", res)
    return LaurentSeries(1, h)


def gamma_from_marchenko(h, rj=None):
    """γ_j is the first coefficient of h; the Â₊,j(0) normalization is already divided out."""
    return complex(h.coef(1))


def marchenko_gammas(data, js, N):
    out = {}
    for j in js:
        rj = kernel_rj(data, j, 2 * N)
        out[j] = gamma_from_marchenko(marchenko_solve(rj, N), rj)
    return out

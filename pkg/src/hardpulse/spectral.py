"""Functions on the unit circle: Laurent coefficient series, sampling grids,
Hardy-space projections, Blaschke products and outer functions.

Sampling convention: grid point k of an N-point grid is w = exp(2πik/N), and
the Fourier coefficient f̂(n) multiplies w**n.
"""

from dataclasses import dataclass

import numpy as np

from .errors import AliasingError, BoundStateOnBoundary, DegenerateBoundState

TOL_BOUNDARY = 1e-6


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class LaurentSeries:
    """Finitely supported f(w) = Σ f̂(n) wⁿ; coeffs[i] multiplies w**(offset+i)."""

    offset: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "offset", int(self.offset))

    @classmethod
    def zero(cls):
        return cls(0, [])

    @classmethod
    def const(cls, c):
        return cls(0, [c])

    @classmethod
    def monomial(cls, n, c=1.0):
        return cls(n, [c])

    @property
    def stop(self):
        return self.offset + len(self.coeffs)

    @property
    def support(self):
        """(lowest, highest) index with a nonzero coefficient, or None."""
        nz = np.flatnonzero(self.coeffs)
        if nz.size == 0:
            return None
        return self.offset + int(nz[0]), self.offset + int(nz[-1])

    @property
    def width(self):
        s = self.support
        return 0 if s is None else s[1] - s[0] + 1

    def coef(self, n):
        i = n - self.offset
        if 0 <= i < len(self.coeffs):
            return self.coeffs[i]
        return 0j

    def coef_range(self, lo, hi):
        """Coefficients for indices lo..hi-1 as an array (zeros outside support)."""
        out = np.zeros(max(hi - lo, 0), dtype=complex)
        a, b = max(lo, self.offset), min(hi, self.stop)
        if a < b:
            out[a - lo:b - lo] = self.coeffs[a - self.offset:b - self.offset]
        return out

    def trim(self, tol=0.0):
        """Drop leading/trailing coefficients with modulus <= tol."""
        nz = np.flatnonzero(np.abs(self.coeffs) > tol)
        if nz.size == 0:
            return LaurentSeries.zero()
        return LaurentSeries(self.offset + nz[0], self.coeffs[nz[0]:nz[-1] + 1])

    def is_zero(self, tol=0.0):
        return not np.any(np.abs(self.coeffs) > tol)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        if len(self.coeffs) == 0:
            return np.zeros_like(w)
        return np.polyval(self.coeffs[::-1], w) * w ** self.offset

    def _aligned(self, other):
        lo = min(self.offset, other.offset)
        hi = max(self.stop, other.stop)
        return lo, self.coef_range(lo, hi), other.coef_range(lo, hi)

    def __add__(self, other):
        if not isinstance(other, LaurentSeries):
            other = LaurentSeries.const(other)
        lo, a, b = self._aligned(other)
        return LaurentSeries(lo, a + b)

    __radd__ = __add__

    def __neg__(self):
        return LaurentSeries(self.offset, -self.coeffs)

    def __sub__(self, other):
        return self + (-other if isinstance(other, LaurentSeries) else -other)

    def __mul__(self, other):
        if isinstance(other, LaurentSeries):
            if len(self.coeffs) == 0 or len(other.coeffs) == 0:
                return LaurentSeries.zero()
            return LaurentSeries(self.offset + other.offset,
                                 np.convolve(self.coeffs, other.coeffs))
        return LaurentSeries(self.offset, self.coeffs * other)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by w**k."""
        return LaurentSeries(self.offset + k, self.coeffs)

    def conj(self):
        """The circle conjugate f*(w) = conj(f(1/w*)), i.e. conj(f) on |w| = 1."""
        return LaurentSeries(-(self.stop - 1), np.conj(self.coeffs[::-1]))

    def derivative(self):
        n = self.offset + np.arange(len(self.coeffs))
        return LaurentSeries(self.offset - 1, self.coeffs * n)

    def __eq__(self, other):
        if not isinstance(other, LaurentSeries):
            return NotImplemented
        a, b = self.trim(), other.trim()
        return (a.offset == b.offset or len(a.coeffs) == 0) and np.array_equal(a.coeffs, b.coeffs)

    def max_abs_diff(self, other):
        _, a, b = self._aligned(other)
        return float(np.max(np.abs(a - b))) if len(a) else 0.0

    def to_json(self):
        return {"offset": self.offset,
                "coeffs": [[float(c.real), float(c.imag)] for c in self.coeffs]}

    @classmethod
    def from_json(cls, d):
        return cls(int(d["offset"]), [complex(re, im) for re, im in d["coeffs"]])

    def __repr__(self):
        return f"LaurentSeries(offset={self.offset}, coeffs={np.array2string(self.coeffs, precision=4)})"


@dataclass(frozen=True, eq=False)
class CircleGrid:
    """Samples at the N-th roots of unity, values[k] = f(exp(2πik/N))."""

    size: int
    values: np.ndarray

    def __post_init__(self):
        if not _is_pow2(self.size):
            raise ValueError(f"grid size must be a power of two, got {self.size}")
        v = np.asarray(self.values)
        if v.shape != (self.size,):
            raise ValueError("values must have length size")
        object.__setattr__(self, "values", v)

    @property
    def points(self):
        return circle_points(self.size)

    @property
    def thetas(self):
        return 2 * np.pi * np.arange(self.size) / self.size


def circle_points(n):
    return np.exp(2j * np.pi * np.arange(n) / n)


def sample(f, n):
    """Evaluate a LaurentSeries on the n-point grid via the inverse DFT."""
    if not _is_pow2(n):
        raise ValueError(f"grid size must be a power of two, got {n}")
    if f.width > n:
        raise AliasingError(f"support width {f.width} exceeds grid size {n}")
    buf = np.zeros(n, dtype=complex)
    idx = (f.offset + np.arange(len(f.coeffs))) % n
    np.add.at(buf, idx, f.coeffs)
    return CircleGrid(n, np.fft.ifft(buf) * n)


def fourier_coeffs(values):
    """f̂(n) for n = 0..N-1 (indices modulo N) from grid samples."""
    values = np.asarray(values)
    return np.fft.fft(values) / len(values)


def unsample(g, lo=None, hi=None):
    """Coefficients of indices lo..hi-1 from grid samples; default [-N/2, N/2)."""
    values = g.values if isinstance(g, CircleGrid) else np.asarray(g)
    n = len(values)
    lo = -(n // 2) if lo is None else lo
    hi = lo + n if hi is None else hi
    if hi - lo > n:
        raise AliasingError("requested index window wider than the grid")
    c = fourier_coeffs(values)
    return LaurentSeries(lo, c[np.arange(lo, hi) % n])


def project_plus(f):
    """Π₊: keep indices >= 1."""
    return f.trim() if f.offset >= 1 else LaurentSeries(1, f.coef_range(1, max(f.stop, 1)))


def project_minus(f):
    """Π₋: keep indices <= -1."""
    return LaurentSeries(f.offset, f.coef_range(f.offset, min(f.stop, 0)))


def project_plus_tilde(f):
    return project_plus(f) + 0.5 * f.coef(0)


def project_minus_tilde(f):
    return project_minus(f) + 0.5 * f.coef(0)


def h1_norm(f):
    n = f.offset + np.arange(len(f.coeffs))
    return float(np.sqrt(np.sum((1 + n.astype(float) ** 2) * np.abs(f.coeffs) ** 2)))


class BlaschkeProduct:
    """∏ (w_k*/|w_k|)(w_k − w)/(1 − w_k* w): unimodular on the circle, positive at 0."""

    def __init__(self, energies, tol=TOL_BOUNDARY):
        e = np.asarray(list(energies), dtype=complex)
        for wk in e:
            if wk == 0:
                raise DegenerateBoundState("bound state at the origin")
            if abs(wk) >= 1 - tol:
                raise BoundStateOnBoundary(f"|w_k| = {abs(wk):.3g} is not inside the disk")
        self.energies = e

    def factor(self, k, w):
        wk = self.energies[k]
        return (np.conj(wk) / abs(wk)) * (wk - w) / (1 - np.conj(wk) * w)

    def __call__(self, w):
        w = np.asarray(w, dtype=complex)
        out = np.ones_like(w)
        for k in range(len(self.energies)):
            out = out * self.factor(k, w)
        return out

    def derivative_at_zero(self, k):
        """B'(w_k) (B vanishes there, so only the k-th factor is differentiated)."""
        wk = self.energies[k]
        d = -(np.conj(wk) / abs(wk)) / (1 - abs(wk) ** 2)
        for m in range(len(self.energies)):
            if m != k:
                d = d * self.factor(m, wk)
        return d


def blaschke(energies, n):
    """Blaschke product sampled on the n-grid, together with its disk evaluator."""
    bp = BlaschkeProduct(energies)
    return CircleGrid(n, bp(circle_points(n))), bp


def analytic_completion(u):
    """Samples of the analytic F with Re F = u on the circle and F(0) = mean(u), i.e. 2Π̃₊u."""
    u = np.asarray(u.values if isinstance(u, CircleGrid) else u, dtype=float)
    n = len(u)
    c = np.fft.fft(u) / n
    F = np.zeros(n, dtype=complex)
    F[0] = c[0]
    F[1:n // 2] = 2 * c[1:n // 2]
    F[n // 2] = c[n // 2]
    return np.fft.ifft(F) * n


def outer_from_log_modulus(log_mod):
    """Outer function g with |g| = exp(log_mod) on the circle and g(0) = exp(mean log_mod) > 0."""
    n = log_mod.size if isinstance(log_mod, CircleGrid) else len(log_mod)
    return CircleGrid(n, np.exp(analytic_completion(log_mod)))


def analytic_series(values):
    """Nonnegative-index coefficients [0, N/2) of a function analytic in the disk."""
    n = len(values)
    return LaurentSeries(0, fourier_coeffs(values)[:n // 2])

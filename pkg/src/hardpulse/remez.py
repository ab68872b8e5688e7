"""Remez exchange for even cosine polynomials c(θ) = Σ_{k=0}^{n} a_k cos kθ on [0, π].

Minimizes max_θ W(θ)|c(θ) − D(θ)| over a union of bands with piecewise-constant
D and W.  Used for the equiripple reflection coefficient and for the SLR B
polynomial.
"""

from dataclasses import dataclass

import numpy as np

from .errors import RemezDiverged


@dataclass
class RemezResult:
    coeffs: np.ndarray
    error: float
    band_errors: list
    alternations: int
    iterations: int
    extremals: np.ndarray

    def __call__(self, theta):
        k = np.arange(len(self.coeffs))
        return np.cos(np.outer(np.atleast_1d(theta), k)) @ self.coeffs


def _dense_grid(n, bands, density):
    total = sum(hi - lo for lo, hi in bands)
    pts, band_id = [], []
    for b, (lo, hi) in enumerate(bands):
        m = max(int(np.ceil(density * (n + 2) * (hi - lo) / max(total, 1e-300))), 4)
        pts.append(np.linspace(lo, hi, m))
        band_id.append(np.full(m, b))
    return np.concatenate(pts), np.concatenate(band_id)


def _local_extrema(err, band_id):
    a = np.abs(err)
    idx = []
    for b in np.unique(band_id):
        sel = np.flatnonzero(band_id == b)
        e = a[sel]
        for i in range(len(sel)):
            left = e[i - 1] if i > 0 else -np.inf
            right = e[i + 1] if i < len(sel) - 1 else -np.inf
            if e[i] >= left and e[i] >= right and e[i] > 0:
                idx.append(sel[i])
    return np.array(sorted(set(idx)), dtype=int)


def _alternating(idx, err):
    """Collapse runs of equal sign, keeping the largest |err| of each run."""
    out = []
    for i in idx:
        if out and np.sign(err[i]) == np.sign(err[out[-1]]):
            if abs(err[i]) > abs(err[out[-1]]):
                out[-1] = i
        else:
            out.append(i)
    return out


def count_alternations(err, band_id=None, rel=1e-3):
    """Length of the longest sign-alternating chain of near-maximal extrema."""
    err = np.asarray(err, dtype=float)
    emax = np.max(np.abs(err))
    if emax == 0:
        return 0
    if band_id is None:
        band_id = np.zeros(len(err), dtype=int)
    idx = _local_extrema(err, band_id)
    idx = idx[np.abs(err[idx]) >= (1 - rel) * emax]
    return len(_alternating(idx, err))


def remez_cosine(n, bands, desired, weights, density=24, maxiter=100, tol=1e-10):
    """Weighted minimax cosine polynomial of degree n over the given bands."""
    bands = [(float(lo), float(hi)) for lo, hi in bands]
    theta, band_id = _dense_grid(n, bands, density)
    D = np.asarray(desired, dtype=float)[band_id]
    W = np.asarray(weights, dtype=float)[band_id]
    m = n + 2
    if len(theta) < m:
        raise ValueError("too few grid points for the requested degree")
    ext = np.round(np.linspace(0, len(theta) - 1, m)).astype(int)
    k = np.arange(n + 1)
    basis = np.cos(np.outer(theta, k))
    coeffs = np.zeros(n + 1)
    delta = 0.0
    for it in range(1, maxiter + 1):
        sgn = (-1.0) ** np.arange(m)
        M = np.column_stack([basis[ext], sgn / W[ext]])
        sol = np.linalg.solve(M, D[ext])
        coeffs, delta = sol[:-1], sol[-1]
        err = W * (basis @ coeffs - D)
        emax = np.max(np.abs(err))
        if emax - abs(delta) <= tol * max(emax, 1e-300):
            break
        cand = _local_extrema(err, band_id)
        cand = cand[np.abs(err[cand]) >= abs(delta) * (1 - 1e-12)]
        # the current reference alternates at ±δ, so keeping it guarantees m points
        cand = np.union1d(cand, ext)
        new = _alternating(cand, err)
        while len(new) > m:
            if abs(err[new[0]]) < abs(err[new[-1]]):
                new.pop(0)
            else:
                new.pop()
        if len(new) < m:
            break
        new = np.array(new)
        if np.array_equal(new, ext):
            break
        ext = new
    else:
        raise RemezDiverged("Remez exchange did not converge", last=coeffs)
    err = W * (basis @ coeffs - D)
    # band errors are reported on a grid finer than the working one
    fine, fine_id = _dense_grid(n, bands, 8 * density)
    fine_err = np.cos(np.outer(fine, k)) @ coeffs - np.asarray(desired, dtype=float)[fine_id]
    band_err = [float(np.max(np.abs(fine_err[fine_id == b]))) for b in range(len(bands))]
    alt = count_alternations(err, band_id)
    return RemezResult(coeffs, float(np.max(np.abs(err))), band_err, alt, it, theta[ext])

"""Dense eigensolvers for small real symmetric and complex Hermitian matrices.

The only numerical kernel is a cyclic Jacobi iteration (compiled with numba).
Hermitian matrices are solved through the real symmetric embedding

    [[Re H, -Im H],
     [Im H,  Re H]]

whose spectrum is that of ``H`` with every eigenvalue doubled.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from .errors import InputError, SolverBreakdown

JACOBI_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60
PAIR_TOL = 1e-8
RITZ_FLOOR = 1e-14
SYMMETRY_TOL = 1e-12


@numba.njit(cache=True, nogil=True)
def _jacobi(a, tol, max_sweeps):
    n = a.shape[0]
    a = a.copy()
    v = np.eye(n)
    fro = np.sqrt(np.sum(a * a))
    for sweep in range(max_sweeps):
        off = 0.0
        for p in range(n):
            for q in range(p + 1, n):
                off += 2.0 * a[p, q] * a[p, q]
        if np.sqrt(off) <= tol * fro:
            return np.diag(a).copy(), v, True
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    akp = a[k, p]
                    akq = a[k, q]
                    a[k, p] = c * akp - s * akq
                    a[k, q] = s * akp + c * akq
                for k in range(n):
                    apk = a[p, k]
                    aqk = a[q, k]
                    a[p, k] = c * apk - s * aqk
                    a[q, k] = s * apk + c * aqk
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    vkp = v[k, p]
                    vkq = v[k, q]
                    v[k, p] = c * vkp - s * vkq
                    v[k, q] = s * vkp + c * vkq
    return np.diag(a).copy(), v, False


def jacobi_eigh(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and orthonormal eigenvectors (columns)."""
    a = np.ascontiguousarray(a, dtype=np.float64)
    w, v, converged = _jacobi(a, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    if not converged:
        raise SolverBreakdown(f"Jacobi did not converge in {JACOBI_MAX_SWEEPS} sweeps")
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


@dataclass(frozen=True)
class EigenSystem:
    """Ordered spectrum of a real symmetric or Hermitian matrix.

    ``vectors[:, k]`` is the unit eigenvector of ``values[k]`` (0-based column,
    i.e. the 1-based index ``k + 1`` used elsewhere).
    """

    values: np.ndarray
    vectors: np.ndarray
    norm: float

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def gaps(self) -> np.ndarray:
        return np.diff(self.values)

    @property
    def min_entry_magnitude(self) -> np.ndarray:
        mags = np.abs(self.vectors)
        return mags.min(axis=0) / mags.max(axis=0)

    def gap_at(self, k: int) -> float:
        """Distance from the k-th eigenvalue (1-based) to its neighbours."""
        i = k - 1
        left = self.values[i] - self.values[i - 1] if i > 0 else np.inf
        right = self.values[i + 1] - self.values[i] if i + 1 < self.n else np.inf
        return float(min(left, right))

    def vector(self, k: int) -> np.ndarray:
        return self.vectors[:, k - 1]


def _phase_normalize(vectors: np.ndarray) -> np.ndarray:
    mags = np.abs(vectors)
    # lowest index among (numerical) ties for the largest magnitude
    top = mags >= mags.max(axis=0) * (1 - 1e-12)
    idx = np.argmax(top, axis=0)
    cols = np.arange(vectors.shape[1])
    pivot = vectors[idx, cols]
    return vectors * (np.conj(pivot) / mags[idx, cols])


def _check_finite_square(h):
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise InputError(f"expected a square matrix, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise InputError("matrix has non-finite entries")


def eig_sym(h) -> EigenSystem:
    h = np.asarray(h)
    if np.iscomplexobj(h):
        if np.any(h.imag != 0):
            raise InputError("eig_sym expects a real matrix")
        h = h.real
    h = h.astype(np.float64)
    _check_finite_square(h)
    fro = float(np.linalg.norm(h))
    if np.abs(h - h.T).max(initial=0.0) > SYMMETRY_TOL * max(fro, 1.0):
        raise InputError("matrix is not symmetric")
    h = 0.5 * (h + h.T)
    w, v = jacobi_eigh(h)
    return EigenSystem(w, _phase_normalize(v), fro)


def eig_herm(h) -> EigenSystem:
    h = np.asarray(h, dtype=np.complex128)
    _check_finite_square(h)
    fro = float(np.linalg.norm(h))
    if np.abs(h - h.conj().T).max(initial=0.0) > SYMMETRY_TOL * max(fro, 1.0):
        raise InputError("matrix is not Hermitian")
    h = 0.5 * (h + h.conj().T)
    values, vectors = _herm_solve(h, 1.0 + fro, RITZ_FLOOR * (1.0 + fro))
    return EigenSystem(values, _phase_normalize(_lowdin(vectors)), fro)


def _lowdin(vectors):
    """Symmetric orthonormalization ``V (V^H V)^(-1/2)`` of a nearly orthonormal ``V``.

    Vectors of well-separated eigenvalues are orthogonal to rounding, so the
    correction only mixes near-degenerate ones and keeps residuals at rounding
    level. The inverse square root uses the series ``I - E/2 + 3E^2/8``.
    """
    n = vectors.shape[1]
    for _ in range(3):
        e = vectors.conj().T @ vectors - np.eye(n)
        if np.abs(e).max(initial=0.0) <= 1e-15:
            break
        vectors = vectors @ (np.eye(n) - 0.5 * e + 0.375 * (e @ e))
    return vectors


def _herm_solve(h, scale, floor):
    """Eigenpairs of Hermitian ``h``; eigenvalues within ``PAIR_TOL * scale`` form clusters."""
    n = h.shape[0]
    re, im = h.real, h.imag
    w, v = jacobi_eigh(np.block([[re, -im], [im, re]]))

    tol = PAIR_TOL * scale
    if np.any(w[1::2] - w[0::2] > tol):
        bad = int(np.argmax(w[1::2] - w[0::2]))
        raise SolverBreakdown(
            "embedded eigenvalues do not pair", margin=float(w[2 * bad + 1] - w[2 * bad])
        )
    values = 0.5 * (w[0::2] + w[1::2])

    # Every embedded eigenvector (x, y) maps to a complex eigenvector x + iy.
    # Within a cluster those candidates span the complex eigenspace but are not
    # orthonormal: pick them greedily by largest remaining norm (Gram-Schmidt
    # with pivoting). A cluster that is not numerically one eigenvalue is then
    # resolved by a Rayleigh-Ritz step on its compressed, shifted block.
    cand = v[:n, :] + 1j * v[n:, :]
    vectors = np.empty((n, n), dtype=np.complex128)
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] - values[stop - 1] <= tol:
            stop += 1
        pool = cand[:, 2 * start:2 * stop].copy()
        for j in range(start, stop):
            norms = np.linalg.norm(pool, axis=0)
            p = int(np.argmax(norms))
            # the candidates form a tight frame, so some norm is >= 1/sqrt(size)
            if norms[p] < 0.5 / np.sqrt(stop - start):
                raise SolverBreakdown("could not recover a complex eigenvector", margin=float(norms[p]))
            q = pool[:, p] / norms[p]
            vectors[:, j] = q
            pool -= np.outer(q, q.conj() @ pool)
        if stop - start > 1:
            basis = vectors[:, start:stop]
            mu = float(values[start:stop].mean())
            block = basis.conj().T @ h @ basis - mu * np.eye(stop - start)
            block = 0.5 * (block + block.conj().T)
            size = float(np.linalg.norm(block))
            if size > floor:
                sub_values, sub_vectors = _herm_solve(block, size, floor)
                values[start:stop] = mu + sub_values
                vectors[:, start:stop] = basis @ sub_vectors
        start = stop
    return values, vectors


def spectral_margins(es: EigenSystem) -> dict:
    gaps = es.gaps
    return {
        "min_gap": float(gaps.min()) if gaps.size else float("inf"),
        "min_vector_entry": float(es.min_entry_magnitude.min()),
    }

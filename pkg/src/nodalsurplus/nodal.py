"""Nodal edge counts, surpluses and the genericity checks they depend on.

Eigenvalue indices ``k`` are 1-based throughout (``k = 1`` is the bottom of
the spectrum), so that the surplus reads ``nu - (k - 1)``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import NonSimpleEigenvalue, VanishingEigenvector
from .graph import CycleStructure, analyze_cycles
from .matrix_space import SupportedMatrix, signing, signing_orbits, ENUMERATION_LIMIT
from .spectra import EigenSystem, eig_sym

GAP_REL = 1e-8
ENTRY_REL = 1e-8

PASS, FAIL, INDETERMINATE = "PASS", "FAIL", "INDETERMINATE"


def gap_threshold(h: SupportedMatrix) -> float:
    return GAP_REL * (1.0 + h.frobenius)


def checked_vector(es: EigenSystem, k: int, gap_tol: float, where=None) -> np.ndarray:
    """Eigenvector of the k-th eigenvalue after the simplicity/vanishing margins."""
    if not 1 <= k <= es.n:
        raise IndexError(f"eigenvalue index {k} outside [1, {es.n}]")
    gap = es.gap_at(k)
    if gap < gap_tol:
        raise NonSimpleEigenvalue(
            f"eigenvalue {k} is not simple (gap {gap:.3e} < {gap_tol:.3e})", margin=gap, where=where
        )
    phi = es.vector(k)
    rel = float(np.abs(phi).min() / np.abs(phi).max())
    if rel < ENTRY_REL:
        raise VanishingEigenvector(
            f"eigenvector {k} nearly vanishes (min/max entry {rel:.3e})", margin=rel, where=where
        )
    return phi


def _count(h: SupportedMatrix, phi: np.ndarray) -> int:
    if h.graph.m == 0:
        return 0
    r, s = np.array(h.graph.edges).T
    return int(np.sum(phi[r] * h.offdiag * phi[s] > 0))


def nodal_count(h: SupportedMatrix, k: int, es: EigenSystem | None = None) -> int:
    """Number of edges with ``phi_r h_rs phi_s > 0`` for the k-th eigenvector."""
    if es is None:
        es = eig_sym(h.dense())
    phi = checked_vector(es, k, gap_threshold(h))
    return _count(h, np.real(phi))


def nodal_surplus(h: SupportedMatrix, k: int, es: EigenSystem | None = None) -> int:
    return nodal_count(h, k, es) - (k - 1)


@dataclass
class GSCReport:
    verdict: str
    min_gap: float
    min_entry: float
    strictly_supported: bool
    signings_checked: int
    failing_signing: tuple | None = None
    reason: str = ""

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "pass": self.passed,
            "min_gap": self.min_gap,
            "min_entry": self.min_entry,
            "strictly_supported": self.strictly_supported,
            "signings_checked": self.signings_checked,
            "failing_signing": list(self.failing_signing) if self.failing_signing else None,
            "reason": self.reason,
        }


def _iter_signings(h: SupportedMatrix, cs: CycleStructure, full: bool):
    """(label, dense signed matrix) pairs in deterministic index order."""
    if full:
        base = h.dense()
        if h.graph.m == 0:
            yield (), base
            return
        r, s = np.array(h.graph.edges).T
        for bits in itertools.product((1.0, -1.0), repeat=h.graph.m):
            out = base.copy()
            vals = h.offdiag * np.array(bits)
            out[r, s] = vals
            out[s, r] = vals
            yield bits, out
    else:
        for eps in range(1 << cs.beta):
            yield (eps,), signing(h, eps, cs).dense()


def check_gsc(h: SupportedMatrix, full: bool | None = None, cs: CycleStructure | None = None) -> GSCReport:
    """Generic spectral condition with numerical margins.

    ``full=None`` enumerates all ``2^|E|`` signings when ``|E| <= 20`` and
    otherwise the ``2^beta`` symmetry points (spectra and entry magnitudes are
    gauge invariant, so both cover every gauge class).
    A failed margin gives INDETERMINATE, never PASS; a zero edge value FAIL.
    """
    if cs is None:
        cs = analyze_cycles(h.graph)
    if full is None:
        full = h.graph.m <= ENUMERATION_LIMIT
    if not h.is_strictly_supported():
        return GSCReport(FAIL, float("nan"), float("nan"), False, 0, reason="not strictly supported")

    gap_tol = gap_threshold(h)
    worst_gap, worst_entry = np.inf, np.inf
    worst_gap_at = worst_entry_at = None
    count = 0
    for label, hs in _iter_signings(h, cs, full):
        es = eig_sym(hs)
        count += 1
        g = float(es.gaps.min()) if es.n > 1 else np.inf
        e = float(es.min_entry_magnitude.min())
        if g < worst_gap:
            worst_gap, worst_gap_at = g, label
        if e < worst_entry:
            worst_entry, worst_entry_at = e, label

    if worst_gap < gap_tol:
        return GSCReport(
            INDETERMINATE, worst_gap, worst_entry, True, count, worst_gap_at,
            reason=f"multiple eigenvalue: gap {worst_gap:.3e} below {gap_tol:.3e}",
        )
    if worst_entry < ENTRY_REL:
        return GSCReport(
            INDETERMINATE, worst_gap, worst_entry, True, count, worst_entry_at,
            reason=f"vanishing eigenvector: relative entry {worst_entry:.3e} below {ENTRY_REL:.0e}",
        )
    return GSCReport(PASS, worst_gap, worst_entry, True, count)


def symmetry_spectra(h: SupportedMatrix, cs: CycleStructure | None = None) -> list[EigenSystem]:
    """Eigensystems of the signings ``eps * h`` for every symmetry point ``eps``."""
    if cs is None:
        cs = analyze_cycles(h.graph)
    return [eig_sym(signing(h, eps, cs).dense()) for eps in range(1 << cs.beta)]


@dataclass
class DistinctReport:
    verdict: str
    min_separation: dict = field(default_factory=dict)
    failing_k: int | None = None

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return {
            "verdict": self.verdict,
            "pass": self.passed,
            "min_separation": {str(k): v for k, v in self.min_separation.items()},
            "failing_k": self.failing_k,
        }


def check_distinct_signings(h: SupportedMatrix, k: int | None = None,
                            cs: CycleStructure | None = None, spectra=None) -> DistinctReport:
    """lambda_k separates the gauge classes of signings (every k when ``k`` is None)."""
    if cs is None:
        cs = analyze_cycles(h.graph)
    if spectra is None:
        spectra = symmetry_spectra(h, cs)
    tol = gap_threshold(h)
    ks = range(1, h.n + 1) if k is None else [k]
    seps = {}
    verdict, failing = PASS, None
    for kk in ks:
        vals = np.sort([es.values[kk - 1] for es in spectra])
        sep = float(np.diff(vals).min()) if len(vals) > 1 else float("inf")
        seps[kk] = sep
        if sep <= tol and verdict == PASS:
            verdict, failing = INDETERMINATE, kk
    return DistinctReport(verdict, seps, failing)


@dataclass
class SurplusDistribution:
    k: int
    beta: int
    counts: tuple[int, ...]
    per_signing_counts: tuple[int, ...]
    orbit_size: int
    surpluses: tuple[int, ...] = ()

    def to_json(self, binomial_pass: bool | None = None) -> dict:
        out = {
            "k": self.k,
            "beta": self.beta,
            "counts": list(self.counts),
            "per_signing_counts": list(self.per_signing_counts),
        }
        if binomial_pass is not None:
            out["binomial_pass"] = binomial_pass
        return out


def surplus_distribution(h: SupportedMatrix, k: int, cs: CycleStructure | None = None,
                         spectra=None, orbit_size: int | None = None) -> SurplusDistribution:
    """Exact histogram of the surplus over the ``2^beta`` symmetry points."""
    if cs is None:
        cs = analyze_cycles(h.graph)
    if spectra is None:
        spectra = symmetry_spectra(h, cs)
    if orbit_size is None:
        orbit_size = signing_orbits(h.graph, cs).orbit_size
    tol = gap_threshold(h)
    counts = [0] * (cs.beta + 1)
    surpluses = []
    for eps, es in enumerate(spectra):
        hs = signing(h, eps, cs)
        phi = checked_vector(es, k, tol, where=eps)
        sigma = _count(hs, phi) - (k - 1)
        if not 0 <= sigma <= cs.beta:
            raise ArithmeticError(f"surplus {sigma} outside [0, {cs.beta}] at eps={eps}")
        counts[sigma] += 1
        surpluses.append(sigma)
    return SurplusDistribution(
        k=k,
        beta=cs.beta,
        counts=tuple(counts),
        per_signing_counts=tuple(c * orbit_size for c in counts),
        orbit_size=orbit_size,
        surpluses=tuple(surpluses),
    )

"""The Boolean-lattice map eps -> J_-(eps), Morse indices and the binomial test.

Symmetry points and subsets of cycles are both int bitmasks: bit ``j`` of
``eps`` means angle pi on cycle ``j``; bit ``j`` of ``J_-`` means cycle
``j`` is a descending direction.
"""
from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .graph import CycleStructure, analyze_cycles
from .magnetic import fd_derivatives, hessian_margin, j_minus
from .matrix_space import SupportedMatrix, symmetry_point_angles, ENUMERATION_LIMIT
from .nodal import SurplusDistribution, surplus_distribution, symmetry_spectra
from .errors import InputError

DIAGONAL_REL = 1e-4


def popcount(x: int) -> int:
    return bin(x).count("1")


@dataclass(frozen=True)
class LatticeEntry:
    eps: int
    jminus: int
    lam: float
    index: int | None
    surplus: int

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "jminus": self.jminus,
            "lambda": self.lam,
            "index": self.index,
            "surplus": self.surplus,
        }


@dataclass
class LatticeReport:
    k: int
    beta: int
    entries: tuple[LatticeEntry, ...]

    @property
    def images(self) -> list[int]:
        return [e.jminus for e in self.entries]

    @property
    def bijective(self) -> bool:
        return len(set(self.images)) == 1 << self.beta

    @property
    def level_counts(self) -> tuple[int, ...]:
        counts = [0] * (self.beta + 1)
        for e in self.entries:
            counts[popcount(e.jminus)] += 1
        return tuple(counts)

    @property
    def binomial(self) -> bool:
        return binomial_verdict(self.level_counts, self.beta)

    @property
    def order_compatible(self) -> bool:
        """J_- = {} at the minimum of lambda_k and J_- = [beta] at the maximum."""
        lams = [e.lam for e in self.entries]
        full = (1 << self.beta) - 1
        return (self.entries[int(np.argmin(lams))].jminus == 0
                and self.entries[int(np.argmax(lams))].jminus == full)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "beta": self.beta,
            "entries": [e.to_json() for e in self.entries],
            "bijective": self.bijective,
            "binomial": self.binomial,
        }


def lattice_map(h: SupportedMatrix, k: int, cs: CycleStructure | None = None,
                spectra=None, with_morse: bool = False) -> LatticeReport:
    """J_-(eps), lambda_k(eps) and the surplus at every symmetry point.

    Margin failures propagate as ``Indeterminate`` / ``NonSimpleEigenvalue``.
    With ``with_morse`` the finite-difference Morse index is filled in too.
    """
    if cs is None:
        cs = analyze_cycles(h.graph)
    if cs.beta > ENUMERATION_LIMIT:
        raise InputError(f"beta = {cs.beta} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    if spectra is None:
        spectra = symmetry_spectra(h, cs)
    dist = surplus_distribution(h, k, cs, spectra, orbit_size=1)
    entries = []
    for eps in range(1 << cs.beta):
        index = morse_index(h, eps, k, cs)[0] if with_morse else None
        entries.append(LatticeEntry(
            eps, j_minus(h, eps, k, cs, spectra), float(spectra[eps].values[k - 1]),
            index, dist.surpluses[eps],
        ))
    return LatticeReport(k, cs.beta, tuple(entries))


def binomial_verdict(d, beta: int | None = None) -> bool:
    """Exact test ``counts[j] == C(beta, j)``.

    Accepts a SurplusDistribution, a LatticeReport, or a count sequence
    (``beta`` defaults to ``len(counts) - 1``).
    """
    if isinstance(d, SurplusDistribution):
        counts, beta = d.counts, d.beta
    elif isinstance(d, LatticeReport):
        counts, beta = d.level_counts, d.beta
    else:
        counts = tuple(int(c) for c in d)
        if beta is None:
            beta = len(counts) - 1
    if len(counts) != beta + 1:
        return False
    return all(int(c) == comb(beta, j) for j, c in enumerate(counts))


def morse_index(h: SupportedMatrix, eps: int, k: int, cs: CycleStructure | None = None):
    """(index, diagonal, hessian) of the FD Hessian of Lambda_k at ``eps``.

    ``index`` is None when the Hessian is not diagonal within
    ``1e-4 (1 + max |diag|)`` or a diagonal entry is below the margin.
    """
    if cs is None:
        cs = analyze_cycles(h.graph)
    if cs.beta == 0:
        return 0, True, np.zeros((0, 0))
    hess = fd_derivatives(h, symmetry_point_angles(eps, cs.beta), k, cs=cs)["hessian"]
    diag = np.diag(hess)
    off = hess - np.diag(diag)
    diagonal = bool(np.abs(off).max() <= DIAGONAL_REL * (1.0 + np.abs(diag).max()))
    if not diagonal or np.abs(diag).min() < hessian_margin(h):
        return None, diagonal, hess
    return int(np.sum(diag < 0)), diagonal, hess


@dataclass(frozen=True)
class MorseRecord:
    eps: int
    fd_index: int | None
    jminus_size: int
    surplus: int
    diagonal: bool

    @property
    def consistent(self) -> bool:
        return self.diagonal and self.fd_index == self.jminus_size == self.surplus

    def to_json(self) -> dict:
        return {
            "eps": self.eps,
            "fd_index": self.fd_index,
            "jminus_size": self.jminus_size,
            "surplus": self.surplus,
            "diagonal": self.diagonal,
            "consistent": self.consistent,
        }


def morse_report(h: SupportedMatrix, k: int, cs: CycleStructure | None = None,
                 spectra=None) -> list[MorseRecord]:
    """FD Morse index, |J_-| and the surplus at every symmetry point."""
    if cs is None:
        cs = analyze_cycles(h.graph)
    if spectra is None:
        spectra = symmetry_spectra(h, cs)
    dist = surplus_distribution(h, k, cs, spectra, orbit_size=1)
    out = []
    for eps in range(1 << cs.beta):
        index, diagonal, _ = morse_index(h, eps, k, cs)
        jm = j_minus(h, eps, k, cs, spectra)
        out.append(MorseRecord(eps, index, popcount(jm), dist.surpluses[eps], diagonal))
    return out

"""Matrices supported on a graph, the magnetic torus action and gauge moves.

Conventions
-----------
* An *edge-phase map* is a float array indexed like ``graph.edges``; entry
  ``e`` is the phase ``alpha_rs`` of edge ``(r, s)`` with ``r < s`` (the value
  on ``(s, r)`` is ``-alpha_rs``).
* A *flux point* is an array of ``beta`` angles in ``[0, 2*pi)``, one per
  representative edge of the cycle structure.
* A *symmetry point* is an int bitmask: bit ``j`` set means angle ``pi`` on
  cycle ``j``.
* Magnetic matrices are plain complex ``ndarray``s.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GraphMismatchError, InputError
from .graph import CycleStructure, Graph, analyze_cycles

TWO_PI = 2.0 * np.pi
PI_SNAP = 1e-9
STRICT_SUPPORT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SupportedMatrix:
    """Real symmetric matrix supported on ``graph``.

    ``offdiag[e]`` is the entry on edge ``graph.edges[e]``.
    """

    graph: Graph
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        diag = np.asarray(self.diag, dtype=np.float64)
        off = np.asarray(self.offdiag, dtype=np.float64)
        if diag.shape != (self.graph.n,) or off.shape != (self.graph.m,):
            raise GraphMismatchError(
                f"expected {self.graph.n} diagonal and {self.graph.m} edge values, "
                f"got {diag.shape} and {off.shape}"
            )
        if not (np.all(np.isfinite(diag)) and np.all(np.isfinite(off))):
            raise InputError("matrix has non-finite entries")
        diag.setflags(write=False)
        off.setflags(write=False)
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", off)

    @property
    def n(self) -> int:
        return self.graph.n

    def dense(self) -> np.ndarray:
        h = np.diag(self.diag)
        if self.graph.m:
            r, s = np.array(self.graph.edges).T
            h[r, s] = self.offdiag
            h[s, r] = self.offdiag
        return h

    @property
    def frobenius(self) -> float:
        return float(np.sqrt(np.sum(self.diag**2) + 2 * np.sum(self.offdiag**2)))

    def is_strictly_supported(self) -> bool:
        scale = max(np.abs(self.diag).max(initial=0.0), np.abs(self.offdiag).max(initial=0.0))
        return bool(np.all(np.abs(self.offdiag) > STRICT_SUPPORT_TOL * scale))

    def with_signs(self, signs) -> "SupportedMatrix":
        """The signing that multiplies edge values by ``signs`` (+-1 per edge)."""
        return SupportedMatrix(self.graph, self.diag, self.offdiag * np.asarray(signs))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "diag": [float(x) for x in self.diag],
            "offdiag": [
                {"u": r, "v": s, "value": float(x)}
                for (r, s), x in zip(self.graph.edges, self.offdiag)
            ],
        }

    @classmethod
    def from_dense(cls, graph: Graph, h) -> "SupportedMatrix":
        h = np.asarray(h, dtype=np.float64)
        if h.shape != (graph.n, graph.n):
            raise GraphMismatchError(f"matrix shape {h.shape} does not match n={graph.n}")
        mask = np.ones_like(h, dtype=bool)
        np.fill_diagonal(mask, False)
        for r, s in graph.edges:
            mask[r, s] = mask[s, r] = False
        if np.any(h[mask] != 0):
            raise GraphMismatchError("matrix has entries outside the graph's support")
        off = [h[r, s] for r, s in graph.edges]
        return cls(graph, np.diag(h).copy(), np.array(off))

    @classmethod
    def from_json(cls, graph: Graph, data: dict) -> "SupportedMatrix":
        try:
            n = int(data["n"])
            diag = [float(x) for x in data["diag"]]
            entries = {}
            for item in data["offdiag"]:
                u, v, x = int(item["u"]), int(item["v"]), float(item["value"])
                key = (min(u, v), max(u, v))
                if key in entries:
                    raise InputError(f"duplicate matrix entry for edge {key}")
                entries[key] = x
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed matrix file: {exc}") from None
        if n != graph.n or len(diag) != n:
            raise GraphMismatchError("matrix size does not match the graph")
        if set(entries) != set(graph.edges):
            raise GraphMismatchError("matrix entries do not match the graph's edge set")
        return cls(graph, np.array(diag), np.array([entries[e] for e in graph.edges]))


def edge_phases_from_flux(cs: CycleStructure, graph: Graph, angles) -> np.ndarray:
    """Edge-phase map carrying ``angles[j]`` on representative edge ``j``."""
    angles = np.asarray(angles, dtype=np.float64)
    if angles.shape != (cs.beta,):
        raise InputError(f"expected {cs.beta} flux angles, got shape {angles.shape}")
    alpha = np.zeros(graph.m)
    for j, (r, s) in enumerate(cs.representative_edges):
        alpha[graph.index(r, s)] = angles[j]
    return alpha


def flux_point(angles) -> np.ndarray:
    return np.mod(np.asarray(angles, dtype=np.float64), TWO_PI)


def symmetry_point_angles(eps: int, beta: int) -> np.ndarray:
    return np.array([np.pi if (eps >> j) & 1 else 0.0 for j in range(beta)])


def torus_action(h: SupportedMatrix, alpha, cs: CycleStructure | None = None) -> np.ndarray:
    """Hermitian ``alpha * h``: edge entry ``h_rs`` becomes ``exp(i alpha_rs) h_rs``.

    ``alpha`` is either a flux point (length ``beta``, needs ``cs`` unless the
    graph's own cycle structure is wanted) or a full edge-phase map (length
    ``|E|``); the lengths differ whenever the graph has an edge.
    """
    g = h.graph
    alpha = np.asarray(alpha, dtype=np.float64)
    if alpha.shape == (g.m,):
        phases = alpha
    else:
        if cs is None:
            cs = analyze_cycles(g)
        phases = edge_phases_from_flux(cs, g, alpha)
    out = np.diag(h.diag).astype(np.complex128)
    if g.m:
        r, s = np.array(g.edges).T
        vals = np.exp(1j * phases) * h.offdiag
        out[r, s] = vals
        out[s, r] = np.conj(vals)
    return out


def gauge_transform(hmat: np.ndarray, theta) -> np.ndarray:
    """Conjugation ``diag(e^{i theta}) H diag(e^{-i theta})``."""
    u = np.exp(1j * np.asarray(theta, dtype=np.float64))
    return u[:, None] * np.asarray(hmat) * np.conj(u)[None, :]


def coboundary(graph: Graph, theta) -> np.ndarray:
    """Edge-phase map ``(d theta)_rs = theta_s - theta_r``.

    ``torus_action(h, coboundary(g, theta))`` equals
    ``gauge_transform(torus_action(h, 0), -theta)``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    if graph.m == 0:
        return np.zeros(0)
    r, s = np.array(graph.edges).T
    return theta[s] - theta[r]


def flux(graph: Graph, alpha, cycle) -> float:
    """Oriented sum of the edge phases along a closed walk, reduced mod 2*pi."""
    alpha = np.asarray(alpha, dtype=np.float64)
    total = 0.0
    cycle = list(cycle)
    for a, b in zip(cycle, cycle[1:] + cycle[:1]):
        if not graph.has_edge(a, b):
            raise InputError(f"({a}, {b}) is not an edge")
        x = alpha[graph.index(a, b)]
        total += x if a < b else -x
    return float(np.mod(total, TWO_PI))


def reduce_to_flux_point(graph: Graph, cs: CycleStructure, alpha):
    """Split an edge-phase map as ``alpha = flux part + d theta``.

    Returns ``(angles, theta)`` where ``angles`` is the flux point (the phases
    left on representative edges once tree edges are peeled to zero) and
    ``theta`` the gauge potential with ``theta[0] = 0``.
    """
    alpha = np.asarray(alpha, dtype=np.float64)
    theta = np.zeros(graph.n)
    for v in cs.bfs_order[1:]:
        p = cs.parent[v]
        x = alpha[graph.index(p, v)]
        # want (alpha - d theta) == 0 on the tree edge
        theta[v] = theta[p] + (x if p < v else -x)
    residual = alpha - coboundary(graph, theta)
    angles = np.array([residual[graph.index(r, s)] for r, s in cs.representative_edges])
    return flux_point(angles), theta


def signs_to_symmetry_point(graph: Graph, cs: CycleStructure, signs) -> int:
    """Symmetry point of a sign pattern: flux of the pattern on each cycle."""
    alpha = np.where(np.asarray(signs) < 0, np.pi, 0.0)
    eps = 0
    for j, cyc in enumerate(cs.fundamental_cycles):
        f = flux(graph, alpha, cyc)
        if abs(f - np.pi) <= PI_SNAP:
            eps |= 1 << j
        elif min(f, TWO_PI - f) > PI_SNAP:
            raise ValueError(f"flux {f} on cycle {j} is not in {{0, pi}}")
    return eps


def symmetry_point_signs(graph: Graph, cs: CycleStructure, eps: int) -> np.ndarray:
    """Representative sign pattern: -1 on the flagged representative edges."""
    signs = np.ones(graph.m)
    for j, (r, s) in enumerate(cs.representative_edges):
        if (eps >> j) & 1:
            signs[graph.index(r, s)] = -1.0
    return signs


def signing(h: SupportedMatrix, eps: int, cs: CycleStructure | None = None) -> SupportedMatrix:
    """The real signing ``eps * h`` (sign flips on flagged representative edges)."""
    if cs is None:
        cs = analyze_cycles(h.graph)
    return h.with_signs(symmetry_point_signs(h.graph, cs, eps))


@dataclass(frozen=True)
class OrbitStructure:
    orbit_count: int
    orbit_size: int
    representatives: tuple[int, ...]
    canonical_forms: tuple[tuple[int, ...], ...] = ()


# full orbit enumeration stays below this many edges
ENUMERATION_LIMIT = 20


def _echelon(rows) -> list[int]:
    """GF(2) basis with distinct leading bits, sorted by leading bit descending."""
    basis = []
    for x in rows:
        for b in basis:
            x = min(x, x ^ b)
        if x:
            basis.append(x)
            basis.sort(reverse=True)
    return basis


def signing_orbits(graph: Graph, cs: CycleStructure | None = None) -> OrbitStructure:
    """Orbits of the 2^|E| sign patterns under gauge flips {0, pi}^n.

    For ``|E| <= ENUMERATION_LIMIT`` every pattern is enumerated, orbit sizes
    are compared and every orbit is mapped to its symmetry point. Above the
    limit the orbit size is the size of the cut space, ``2^rank``.
    """
    if cs is None:
        cs = analyze_cycles(graph)
    m = graph.m
    if m > ENUMERATION_LIMIT:
        incid = [0] * graph.n
        for e, (r, s) in enumerate(graph.edges):
            incid[r] ^= 1 << e
            incid[s] ^= 1 << e
        size = 1 << len(_echelon(incid))
        count = (1 << m) // size
        if count != 1 << cs.beta:
            raise ArithmeticError("orbit count differs from 2^beta")
        return OrbitStructure(count, size, tuple(range(1 << cs.beta)))

    # Canonical form: lexicographically smallest +-1 vector, i.e. -1 as early
    # as possible. Encode edge e at bit (m-1-e) with bit=1 <-> -1; the
    # canonical form is then the largest code of the coset pattern + cuts,
    # found greedily from an echelon basis of the cut space.
    incid = [0] * graph.n
    for e, (r, s) in enumerate(graph.edges):
        incid[r] ^= 1 << (m - 1 - e)
        incid[s] ^= 1 << (m - 1 - e)
    canon = np.arange(1 << m, dtype=np.int64)
    for b in _echelon(incid):
        canon = np.maximum(canon, canon ^ b)
    keys, sizes = np.unique(canon, return_counts=True)
    if np.any(sizes != sizes[0]):
        raise ArithmeticError("gauge orbits have unequal sizes")

    reps, forms = [], []
    for code in keys:
        signs = np.array([-1 if (code >> (m - 1 - e)) & 1 else 1 for e in range(m)])
        reps.append(signs_to_symmetry_point(graph, cs, signs))
        forms.append(tuple(int(x) for x in signs))
    if len(set(reps)) != len(reps) or len(reps) != 1 << cs.beta:
        raise ArithmeticError("orbits do not biject onto symmetry points")
    order = np.argsort(reps)
    return OrbitStructure(
        orbit_count=len(keys),
        orbit_size=int(sizes[0]),
        representatives=tuple(int(reps[i]) for i in order),
        canonical_forms=tuple(forms[i] for i in order),
    )


def parse_flux_literal(text: str, beta: int) -> np.ndarray:
    """Parse ``"j:angle,j:angle"`` into a flux point (unspecified cycles 0)."""
    angles = np.zeros(beta)
    text = text.strip()
    if not text:
        return angles
    for part in text.split(","):
        try:
            j_str, a_str = part.split(":")
            j, a = int(j_str), float(a_str)
        except ValueError:
            raise InputError(f"bad flux literal component {part!r}") from None
        if not 0 <= j < beta:
            raise InputError(f"cycle index {j} outside [0, {beta})")
        angles[j] = a
    return flux_point(angles)

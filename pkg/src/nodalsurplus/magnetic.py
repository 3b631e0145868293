"""Eigenvalues on the flux torus, probability currents and their derivatives."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Indeterminate, InputError, NonSimpleEigenvalue
from .graph import CycleStructure, Graph, analyze_cycles, bridge_sides, bridges
from .matrix_space import SupportedMatrix, symmetry_point_angles, torus_action
from .nodal import gap_threshold, symmetry_spectra
from .spectra import eig_herm

STEP_GRAD = 1e-5
STEP_HESS = 1e-3
CURRENT_TOL = 1e-10
RESIDUAL_TOL = 1e-8
FLAT_TOL = 1e-10
STRICT_STEP = 1e-12

STRICTLY_INCREASING = "STRICTLY_INCREASING"
STRICTLY_DECREASING = "STRICTLY_DECREASING"
FLAT_BAND = "FLAT_BAND"
NON_MONOTONE = "NON_MONOTONE"


def _cs(h, cs):
    return analyze_cycles(h.graph) if cs is None else cs


def current_scale(h: SupportedMatrix) -> float:
    return max(1.0, h.frobenius)


def lambda_k(h: SupportedMatrix, alpha, k: int, cs: CycleStructure | None = None) -> float:
    """k-th ascending eigenvalue of ``alpha * h`` (``alpha`` a flux point)."""
    return float(eig_herm(torus_action(h, alpha, _cs(h, cs))).values[k - 1])


@dataclass(frozen=True)
class ProbabilityCurrent:
    """Antisymmetric edge field ``J_rs = Im(H_rs conj(phi_r) phi_s)``, ``r < s``."""

    graph: Graph
    values: np.ndarray

    def __getitem__(self, edge) -> float:
        r, s = edge
        x = self.values[self.graph.index(r, s)]
        return float(x if r < s else -x)

    def divergence(self) -> np.ndarray:
        """``(d* J)_r = sum_s J_rs``."""
        div = np.zeros(self.graph.n)
        for (r, s), x in zip(self.graph.edges, self.values):
            div[r] += x
            div[s] -= x
        return div

    def on_bridges(self) -> np.ndarray:
        return np.array([self[b] for b in bridges(self.graph)])

    def cycle_values(self, cs: CycleStructure, j: int) -> np.ndarray:
        """Current along cycle ``j`` in its traversal direction."""
        cyc = list(cs.fundamental_cycles[j])
        return np.array([self[(a, b)] for a, b in zip(cyc, cyc[1:] + cyc[:1])])

    def diagnostics(self, cs: CycleStructure) -> dict:
        spread = 0.0
        if cs.disjoint:
            for j in range(cs.beta):
                vals = self.cycle_values(cs, j)
                spread = max(spread, float(vals.max() - vals.min()))
        b = self.on_bridges()
        return {
            "max_divergence": float(np.abs(self.divergence()).max(initial=0.0)),
            "max_bridge": float(np.abs(b).max(initial=0.0)),
            "max_cycle_spread": spread,
        }


def probability_current(hmat, phi, graph: Graph) -> ProbabilityCurrent:
    hmat = np.asarray(hmat)
    phi = np.asarray(phi, dtype=np.complex128)
    phi = phi / np.linalg.norm(phi)
    lam = np.real(np.vdot(phi, hmat @ phi))
    res = np.linalg.norm(hmat @ phi - lam * phi)
    if res > RESIDUAL_TOL * (1.0 + np.linalg.norm(hmat)):
        raise InputError(f"not an eigenvector (residual {res:.3e})")
    if graph.m == 0:
        return ProbabilityCurrent(graph, np.zeros(0))
    r, s = np.array(graph.edges).T
    vals = np.imag(hmat[r, s] * np.conj(phi[r]) * phi[s])
    return ProbabilityCurrent(graph, vals)


def _simple_eigensystem(hmat, k, tol, where=None):
    es = eig_herm(hmat)
    gap = es.gap_at(k)
    if gap < tol:
        raise NonSimpleEigenvalue(f"eigenvalue {k} not simple (gap {gap:.3e})", margin=gap, where=where)
    return es


def eigenvalue_gradient(h: SupportedMatrix, alpha, k: int, cs: CycleStructure | None = None) -> np.ndarray:
    """Gradient of Lambda_k in flux coordinates: ``-2 J`` on representative edges."""
    cs = _cs(h, cs)
    hmat = torus_action(h, alpha, cs)
    es = _simple_eigensystem(hmat, k, gap_threshold(h))
    cur = probability_current(hmat, es.vector(k), h.graph)
    return np.array([-2.0 * cur[e] for e in cs.representative_edges])


def central_differences(fn, x, step_grad: float = STEP_GRAD, step_hess: float = STEP_HESS):
    """Central-difference gradient and (symmetric) Hessian of a scalar function."""
    x = np.asarray(x, dtype=np.float64)
    d = x.size
    grad = np.zeros(d)
    hess = np.zeros((d, d))
    eye = np.eye(d)
    f0 = fn(x)
    for i in range(d):
        grad[i] = (fn(x + step_grad * eye[i]) - fn(x - step_grad * eye[i])) / (2 * step_grad)
        hess[i, i] = (fn(x + step_hess * eye[i]) - 2 * f0 + fn(x - step_hess * eye[i])) / step_hess**2
    for i in range(d):
        for j in range(i + 1, d):
            ei, ej = step_hess * eye[i], step_hess * eye[j]
            v = (fn(x + ei + ej) - fn(x + ei - ej) - fn(x - ei + ej) + fn(x - ei - ej)) / (4 * step_hess**2)
            hess[i, j] = hess[j, i] = v
    return grad, hess


def fd_derivatives(h: SupportedMatrix, alpha, k: int, step_grad: float = STEP_GRAD,
                   step_hess: float = STEP_HESS, cs: CycleStructure | None = None) -> dict:
    cs = _cs(h, cs)
    tol = gap_threshold(h)

    def lam(a):
        es = _simple_eigensystem(torus_action(h, a, cs), k, tol, where=tuple(a))
        return es.values[k - 1]

    grad, hess = central_differences(lam, np.asarray(alpha, dtype=np.float64), step_grad, step_hess)
    return {"gradient": grad, "hessian": hess}


def hessian_margin(h: SupportedMatrix) -> float:
    """Smallest |diagonal Hessian entry| accepted as nondegenerate.

    Ten times the rounding floor ``~4 u ||h|| / STEP_HESS^2`` of the central
    second difference.
    """
    return 1e-8 * (1.0 + h.frobenius)


def j_minus(h: SupportedMatrix, eps: int, k: int, cs: CycleStructure | None = None,
            spectra=None) -> int:
    """Bitmask of the cycles j with Lambda_k(eps + pi e_j) < Lambda_k(eps)."""
    cs = _cs(h, cs)
    if spectra is None:
        spectra = symmetry_spectra(h, cs)
    tol = gap_threshold(h)
    here = spectra[eps].values[k - 1]
    mask = 0
    for j in range(cs.beta):
        there = spectra[eps ^ (1 << j)].values[k - 1]
        diff = there - here
        if abs(diff) < tol:
            raise Indeterminate(
                f"lambda_{k} at eps={eps} and its neighbour along cycle {j} agree within {tol:.1e}",
                margin=abs(diff), where=(eps, j),
            )
        if diff < 0:
            mask |= 1 << j
    return mask


@dataclass
class EdgeScan:
    cycle: int
    k: int
    eps: int
    t: np.ndarray
    values: np.ndarray
    derivatives: np.ndarray  # -2 J at every sample (endpoints included)
    verdict: str

    @property
    def derivative_samples(self) -> np.ndarray:
        return self.derivatives[1:-1]

    def to_csv(self) -> str:
        lines = ["t,lambda,deriv"]
        for t, v, d in zip(self.t, self.values, self.derivatives):
            lines.append(f"{t:.17g},{v:.17g},{d:.17g}")
        return "\n".join(lines) + "\n"


def scan_verdict(values, flat_tol: float) -> str:
    diffs = np.diff(values)
    if diffs.size and np.min(np.abs(diffs)) > STRICT_STEP:
        if np.all(diffs > 0):
            return STRICTLY_INCREASING
        if np.all(diffs < 0):
            return STRICTLY_DECREASING
    if np.max(values) - np.min(values) <= flat_tol:
        return FLAT_BAND
    return NON_MONOTONE


def edge_scans(h: SupportedMatrix, eps: int, j: int, samples: int = 64,
               cs: CycleStructure | None = None) -> list[EdgeScan]:
    """Scans of every Lambda_k along one cube edge (shared eigensolves)."""
    if samples < 8:
        raise InputError("edge_scan needs at least 8 samples")
    cs = _cs(h, cs)
    if not 0 <= j < cs.beta:
        raise InputError(f"cycle index {j} outside [0, {cs.beta})")
    base = symmetry_point_angles(eps, cs.beta)
    ts = np.linspace(0.0, np.pi, samples)
    rep = cs.representative_edges[j]
    n = h.n
    vals = np.empty((n, samples))
    ders = np.empty((n, samples))
    for i, t in enumerate(ts):
        alpha = base.copy()
        alpha[j] += t
        hmat = torus_action(h, alpha, cs)
        es = eig_herm(hmat)
        vals[:, i] = es.values
        for kk in range(1, n + 1):
            ders[kk - 1, i] = -2.0 * probability_current(hmat, es.vector(kk), h.graph)[rep]
    flat_tol = FLAT_TOL * (1.0 + h.frobenius)
    return [
        EdgeScan(j, kk, eps, ts, vals[kk - 1], ders[kk - 1], scan_verdict(vals[kk - 1], flat_tol))
        for kk in range(1, n + 1)
    ]


def edge_scan(h: SupportedMatrix, eps: int, j: int, k: int, samples: int = 64,
              cs: CycleStructure | None = None) -> EdgeScan:
    """Lambda_k along the cube edge from ``eps`` to ``eps + pi e_j``."""
    return edge_scans(h, eps, j, samples, cs)[k - 1]


@dataclass
class PartialCriticalityReport:
    k: int
    checked_edges: tuple
    max_current: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_current <= self.tolerance


def real_blocks(graph: Graph, cs: CycleStructure, alpha) -> set:
    """Edges lying in some bridge-side whose cycles all carry zero flux."""
    alpha = np.asarray(alpha, dtype=np.float64)
    zero_cycle = {
        j for j in range(cs.beta)
        if min(alpha[j] % (2 * np.pi), 2 * np.pi - alpha[j] % (2 * np.pi)) == 0.0
    }
    cycle_vertices = [set(c) for c in cs.fundamental_cycles]
    out = set()
    for b in bridges(graph):
        for side in bridge_sides(graph, b):
            if all(j in zero_cycle for j in range(cs.beta) if cycle_vertices[j] <= side):
                out.update(e for e in graph.edges if e[0] in side and e[1] in side)
    return out


def partial_criticality_check(h: SupportedMatrix, alpha, k: int,
                              cs: CycleStructure | None = None) -> PartialCriticalityReport:
    """The current vanishes on every bridge-side where ``alpha * h`` is real."""
    cs = _cs(h, cs)
    hmat = torus_action(h, alpha, cs)
    es = _simple_eigensystem(hmat, k, gap_threshold(h))
    cur = probability_current(hmat, es.vector(k), h.graph)
    edges = tuple(sorted(real_blocks(h.graph, cs, alpha)))
    vals = [abs(cur[e]) for e in edges]
    return PartialCriticalityReport(
        k, edges, float(max(vals, default=0.0)), CURRENT_TOL * current_scale(h)
    )


def cluster_around(values, k: int, tol: float) -> tuple[int, int]:
    """0-based half-open index range of the eigenvalue cluster containing k."""
    lo = hi = k - 1
    while lo > 0 and values[lo] - values[lo - 1] <= tol:
        lo -= 1
    while hi + 1 < len(values) and values[hi + 1] - values[hi] <= tol:
        hi += 1
    return lo, hi + 1


def restricted_form(hmat, hdot, k: int, tol: float) -> dict:
    """Compress ``hdot`` onto the eigenspace of the k-th eigenvalue cluster of ``hmat``."""
    es = eig_herm(hmat)
    lo, hi = cluster_around(es.values, k, tol)
    basis = es.vectors[:, lo:hi]
    form = basis.conj().T @ np.asarray(hdot) @ basis
    form = 0.5 * (form + form.conj().T)
    ev = eig_herm(form).values
    definite = bool(np.all(ev > tol) or np.all(ev < -tol))
    return {"multiplicity": hi - lo, "form": form, "eigenvalues": ev, "definite": definite}


def bz_definiteness(h: SupportedMatrix, alpha, k: int, direction,
                    cs: CycleStructure | None = None) -> dict:
    """Directional derivative of ``alpha * h`` restricted to the k-th eigenspace.

    ``definite`` is the BZ condition: all eigenvalues of the restricted form
    share one sign, away from zero by the clustering tolerance.
    """
    cs = _cs(h, cs)
    direction = np.asarray(direction, dtype=np.float64)
    hmat = torus_action(h, alpha, cs)
    hdot = np.zeros_like(hmat)
    for j, (r, s) in enumerate(cs.representative_edges):
        hdot[r, s] = 1j * direction[j] * hmat[r, s]
        hdot[s, r] = np.conj(hdot[r, s])
    return restricted_form(hmat, hdot, k, gap_threshold(h))

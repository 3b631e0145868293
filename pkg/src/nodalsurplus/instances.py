"""Reproducible instance generators and the standard test graphs.

Randomness comes from SplitMix64 so the streams can be reproduced in any
language:

    state <- state + 0x9E3779B97F4A7C15            (mod 2^64)
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9      (mod 2^64)
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB      (mod 2^64)
    output z ^ (z >> 31)

and a uniform double in [0, 1) is ``(output >> 11) * 2^-53``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InputError, RetriesExhausted
from .graph import Graph, analyze_cycles, build_graph
from .matrix_space import SupportedMatrix
from .nodal import check_distinct_signings, check_gsc, symmetry_spectra
from .spectra import eig_sym

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self, low: float = 0.0, high: float = 1.0) -> float:
        u = (self.next_u64() >> 11) * 2.0**-53
        return low + (high - low) * u

    def signed_magnitude(self, low: float, high: float) -> float:
        """Uniform on ``[-high, -low] U [low, high]``: a sign draw, then a magnitude draw."""
        sign = -1.0 if self.uniform() < 0.5 else 1.0
        return sign * self.uniform(low, high)


@dataclass(frozen=True)
class GeneratorConfig:
    seed: int = 0
    offdiag_low: float = 0.5
    offdiag_high: float = 1.5
    diag_jitter: float = 0.25
    max_retries: int = 100

    def __post_init__(self):
        if not self.offdiag_low > 0:
            raise InputError("offdiag_low must be positive")
        if self.offdiag_high < self.offdiag_low:
            raise InputError("offdiag_high must be at least offdiag_low")
        if self.diag_jitter < 0:
            raise InputError("diag_jitter must be non-negative")
        if self.max_retries < 1:
            raise InputError("max_retries must be at least 1")


def _draw(g: Graph, cfg: GeneratorConfig, rng: SplitMix64) -> SupportedMatrix:
    diag = np.array([r + rng.uniform(-cfg.diag_jitter, cfg.diag_jitter) for r in range(g.n)])
    off = np.array([rng.signed_magnitude(cfg.offdiag_low, cfg.offdiag_high) for _ in g.edges])
    return SupportedMatrix(g, diag, off)


def random_gsc_instance(g: Graph, cfg: GeneratorConfig | None = None) -> SupportedMatrix:
    """Seeded matrix on ``g`` passing the GSC check and lambda_k distinctness for all k.

    Each attempt draws the diagonal (vertex order) and then, per edge in
    order, a sign and a magnitude from one SplitMix64 stream; failed
    attempts simply continue the stream.
    """
    cfg = cfg or GeneratorConfig()
    cs = analyze_cycles(g)
    rng = SplitMix64(cfg.seed)
    best = None
    for attempt in range(cfg.max_retries):
        h = _draw(g, cfg, rng)
        gsc = check_gsc(h, cs=cs)
        if gsc.passed:
            dist = check_distinct_signings(h, cs=cs, spectra=symmetry_spectra(h, cs))
            if dist.passed:
                return h
            margins = {"attempt": attempt, "min_gap": gsc.min_gap, "min_entry": gsc.min_entry,
                       "min_separation": min(dist.min_separation.values())}
        else:
            margins = {"attempt": attempt, "min_gap": gsc.min_gap, "min_entry": gsc.min_entry}
        if best is None or min(margins["min_gap"], margins["min_entry"]) > min(best["min_gap"], best["min_entry"]):
            best = margins
    raise RetriesExhausted(f"no generic instance in {cfg.max_retries} attempts", best=best)


def canonical_instance(g: Graph, xi_scale: float, seed: int = 0) -> SupportedMatrix:
    """``diag(1, ..., n) + xi`` with edge entries uniform on ``+-[xi_scale/2, xi_scale]``."""
    if not xi_scale > 0:
        raise InputError(f"xi_scale must be positive, got {xi_scale}")
    rng = SplitMix64(seed)
    off = np.array([rng.signed_magnitude(0.5 * xi_scale, xi_scale) for _ in g.edges])
    return SupportedMatrix(g, np.arange(1.0, g.n + 1.0), off)


@dataclass(frozen=True)
class FlatBand:
    h: SupportedMatrix
    lam: float
    cycle: int
    phi: np.ndarray

    @property
    def k(self) -> int:
        """Position (1-based) of ``lam`` in the spectrum of ``h``."""
        return int(np.argmin(np.abs(eig_sym(self.h.dense()).values - self.lam))) + 1


def flat_band_instance() -> FlatBand:
    """Triangle 0-1-2 with pendant 3 on vertex 0 and an eigenvector vanishing at 0.

    The block on {1, 2} is [[0, 1], [1, 0]] with eigenpair (1, (1, 1)/sqrt 2);
    h_01 = h_02 = h_03 = 1, h_00 = 0 and h_33 = 1 make
    phi = (0, 1, 1, -2)/sqrt 6 an eigenvector of h for 1, and the eigenvalue 1
    survives every flux through the triangle.
    """
    g = triangle_pendant()
    lam = 1.0
    phi12 = np.array([1.0, 1.0]) / np.sqrt(2.0)
    h01 = h02 = h03 = 1.0
    phi3 = -(h01 * phi12[0] + h02 * phi12[1]) / h03
    phi = np.array([0.0, phi12[0], phi12[1], phi3])
    phi /= np.linalg.norm(phi)
    diag = np.array([0.0, 0.0, 0.0, lam])
    # edge order (0,1), (0,2), (0,3), (1,2)
    off = np.array([h01, h02, h03, 1.0])
    return FlatBand(SupportedMatrix(g, diag, off), lam, 0, phi)


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def triangle_pendant() -> Graph:
    """Graph (a): triangle {0, 1, 2} with pendant vertex 3 on 0; beta = 1."""
    return build_graph(4, [(0, 1), (0, 2), (1, 2), (0, 3)])


def two_triangles_bridge() -> Graph:
    """Graph (b): triangles {0, 1, 2} and {3, 4, 5} joined by the bridge (2, 3); beta = 2."""
    return build_graph(6, [(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)])


def three_cycles_graph() -> Graph:
    """Graph (c): square 1-3-5-4 with triangles 0-7-9 and 2-6-8 bridged to vertex 3.

    n = 10, beta = 3. Both bridges meet the square at one vertex and the
    labels spread the diagonal ``r + jitter`` of random_gsc_instance over the
    three cycles, which keeps every eigenvector visibly present on every cycle
    (a chain-like labelling localizes them and flattens lambda_k in the flux
    of far cycles to ~1e-10).
    """
    return build_graph(10, [
        (1, 3), (3, 5), (4, 5), (1, 4),
        (0, 7), (7, 9), (0, 9), (3, 7),
        (2, 6), (6, 8), (2, 8), (3, 6),
    ])


def theta_graph() -> Graph:
    """Two triangles sharing the edge (0, 1); cycles are not disjoint."""
    return build_graph(4, [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3)])


STANDARD_GRAPHS = {
    "a": triangle_pendant,
    "b": two_triangles_bridge,
    "c": three_cycles_graph,
    "theta": theta_graph,
}

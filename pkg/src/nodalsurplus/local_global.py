"""Local-to-global machinery at a symmetry point.

At a real matrix ``h`` (a signing; its flux origin is the symmetry point) with
simple eigenvalue ``lam = lambda_k(h)`` and nowhere-vanishing unit eigenvector
``phi``, and a set ``J`` of cycles with representative edges ``(r_j, s_j)``:

    Omega_jj = -h_rs phi_r phi_s
    R_j(t)   = h_rs [[-phi_s/phi_r, e^{it}], [e^{-it}, -phi_r/phi_s]]  on rows/cols (r, s)
    S        = h - sum_j R_j(0)
    B[:, j]  = h_rs phi_s e_r - h_rs phi_r e_s
    M        = [[h - lam, B], [B^T, Omega]]

so that ``alpha * h = S + sum_j R_j(alpha_j)`` on the subtorus T_J,
``sum_j R_j(0) = B Omega^{-1} B^T``, ``M / Omega = S - lam`` and
``M / (h - lam) = Omega - B^T (h - lam)^+ B`` is half the Hessian of
``Lambda_k`` restricted to T_J.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError, NonSimpleEigenvalue
from .graph import CycleStructure, analyze_cycles
from .magnetic import fd_derivatives, j_minus
from .matrix_space import SupportedMatrix, signing, torus_action
from .nodal import PASS, FAIL, INDETERMINATE, checked_vector, gap_threshold, symmetry_spectra
from .spectra import eig_herm, eig_sym

INERTIA_TOL = 1e-9
ZERO_TOL = 1e-12
PINV_TOL = 1e-8
IDENTITY_TOL = 1e-9
ALGEBRA_TOL = 1e-10
SCHUR_REL = 1e-4
GRID_MAX_DIM = 3


def _as_tuple(J, beta) -> tuple[int, ...]:
    if isinstance(J, (int, np.integer)):
        J = [j for j in range(beta) if (int(J) >> j) & 1]
    J = tuple(sorted(int(j) for j in J))
    if len(set(J)) != len(J) or any(not 0 <= j < beta for j in J):
        raise InputError(f"cycle subset {J} not contained in [0, {beta})")
    return J


def inertia(a, scale: float) -> tuple[int, bool]:
    """(number of negative eigenvalues, ambiguous flag) of a real symmetric matrix.

    Eigenvalues below ``-1e-9 scale`` are negative; ``|x| <= 1e-12 scale`` is a
    structural zero; anything in between makes the count ambiguous.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.size == 0:
        return 0, False
    w = eig_sym(0.5 * (a + a.T)).values
    neg = int(np.sum(w < -INERTIA_TOL * scale))
    mid = (np.abs(w) > ZERO_TOL * scale) & (np.abs(w) <= INERTIA_TOL * scale)
    return neg, bool(mid.any())


@dataclass
class LocalGlobalCertificate:
    k: int
    J: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    lam: float
    phi: np.ndarray
    h_matrix: np.ndarray
    omega: np.ndarray
    b_matrix: np.ndarray
    s_matrix: np.ndarray
    m_matrix: np.ndarray
    m_count: int
    scale: float
    inertias: dict = field(default_factory=dict)
    invariants: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.h_matrix.shape[0]

    def r_matrix(self, pos: int, t: float) -> np.ndarray:
        """R_j(t) for the ``pos``-th cycle of ``J``, as a full n x n matrix."""
        r, s = self.edges[pos]
        hrs = self.h_matrix[r, s]
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        out[r, r] = -hrs * self.phi[s] / self.phi[r]
        out[s, s] = -hrs * self.phi[r] / self.phi[s]
        out[r, s] = hrs * np.exp(1j * t)
        out[s, r] = hrs * np.exp(-1j * t)
        return out

    def r_sum(self, angles) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.complex128)
        for pos, t in enumerate(angles):
            out += self.r_matrix(pos, t)
        return out

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "J": list(self.J),
            "lambda": self.lam,
            "m": self.m_count,
            "omega": np.diag(self.omega).tolist(),
            "inertias": dict(self.inertias),
            "invariants": {key: dict(v) for key, v in self.invariants.items()},
        }


def _check(value: float, tol: float) -> dict:
    return {"value": float(value), "tol": float(tol), "pass": bool(value <= tol)}


def build_certificate(h: SupportedMatrix, k: int, J, cs: CycleStructure | None = None,
                      samples: int = 16, seed: int = 0) -> LocalGlobalCertificate:
    """Local-global matrices at the flux origin of ``h`` with every invariant checked.

    ``J`` is a sequence of cycle indices or a bitmask. ``samples`` angles (from
    a fixed seed) are used for the t-dependent invariants of R_j(t).
    """
    if cs is None:
        cs = analyze_cycles(h.graph)
    J = _as_tuple(J, cs.beta)
    hm = h.dense()
    es = eig_sym(hm)
    phi = np.real(checked_vector(es, k, gap_threshold(h), where="certificate"))
    lam = float(es.values[k - 1])
    n, q = h.n, len(J)
    scale = 1.0 + h.frobenius
    edges = tuple(cs.representative_edges[j] for j in J)

    omega = np.zeros((q, q))
    bmat = np.zeros((n, q))
    for pos, (r, s) in enumerate(edges):
        hrs = hm[r, s]
        omega[pos, pos] = -hrs * phi[r] * phi[s]
        bmat[r, pos] = hrs * phi[s]
        bmat[s, pos] = -hrs * phi[r]
    m_count = int(np.sum(np.diag(omega) < 0))

    cert = LocalGlobalCertificate(
        k=k, J=J, edges=edges, lam=lam, phi=phi, h_matrix=hm, omega=omega, b_matrix=bmat,
        s_matrix=np.zeros((n, n)), m_matrix=np.zeros((n + q, n + q)), m_count=m_count, scale=scale,
    )
    r0 = np.real(cert.r_sum(np.zeros(q)))
    s_mat = hm - r0
    cert.s_matrix = s_mat
    cert.m_matrix = np.block([[hm - lam * np.eye(n), bmat], [bmat.T, omega]])

    inv = cert.invariants
    inv["omega_nonzero"] = {"value": float(np.abs(np.diag(omega)).min(initial=np.inf)),
                            "tol": 0.0, "pass": bool(np.all(np.diag(omega) != 0))}
    inv["s_phi"] = _check(np.linalg.norm(s_mat @ phi - lam * phi), IDENTITY_TOL)
    inv["r0_phi"] = _check(max((np.linalg.norm(cert.r_matrix(p, 0.0) @ phi) for p in range(q)),
                               default=0.0), IDENTITY_TOL)
    if q:
        inv["sum_r0_schur"] = _check(np.abs(r0 - bmat @ np.linalg.solve(omega, bmat.T)).max(),
                                     IDENTITY_TOL)
    else:
        inv["sum_r0_schur"] = _check(0.0, IDENTITY_TOL)

    rng = np.random.default_rng(seed)
    ts = rng.uniform(0.0, 2 * np.pi, samples)
    det_max, comm_max, sign_ok = 0.0, 0.0, True
    trace_dev = 0.0
    for pos in range(q):
        r, s = edges[pos]
        w_ref = None
        for t in ts:
            blk = cert.r_matrix(pos, t)[np.ix_([r, s], [r, s])]
            det_max = max(det_max, abs(np.linalg.det(blk)))
            tr = float(np.real(np.trace(blk)))
            sign_ok &= np.sign(tr) == np.sign(omega[pos, pos])
            trace_dev = max(trace_dev, abs(tr - 2 * omega[pos, pos]))
            w = eig_herm(blk).values
            nz = w[np.argmax(np.abs(w))]
            w_ref = np.sign(nz) if w_ref is None else w_ref
            sign_ok &= np.sign(nz) == w_ref
        for pos2 in range(pos + 1, q):
            for t, t2 in zip(ts, ts[::-1]):
                a, b = cert.r_matrix(pos, t), cert.r_matrix(pos2, t2)
                comm_max = max(comm_max, np.abs(a @ b - b @ a).max())
    inv["det_r"] = _check(det_max, ALGEBRA_TOL * scale**2)
    inv["commute"] = _check(comm_max, ALGEBRA_TOL * scale**2)
    # The trace of R_j(t) is -h_rs (phi_r^2 + phi_s^2) / (phi_r phi_s); it has the
    # sign of Omega_jj but equals 2 Omega_jj only when |phi_r| = |phi_s| = 1/sqrt(2).
    inv["trace_sign"] = {"value": trace_dev, "tol": 0.0, "pass": bool(sign_ok)}

    alpha = rng.uniform(0.0, 2 * np.pi, cs.beta)
    alpha_j = np.zeros(cs.beta)
    alpha_j[list(J)] = alpha[list(J)]
    dec = torus_action(h, alpha_j, cs) - (s_mat + cert.r_sum(alpha[list(J)]))
    inv["decomposition"] = _check(np.abs(dec).max(), ALGEBRA_TOL * scale)

    ind_m, amb_m = inertia(cert.m_matrix, scale)
    ind_h, amb_h = inertia(hm - lam * np.eye(n), scale)
    ind_o, amb_o = inertia(omega, scale)
    ind_s, amb_s = inertia(s_mat - lam * np.eye(n), scale)
    cert.inertias.update({
        "M": ind_m, "h_minus_lambda": ind_h, "Omega": ind_o, "M_over_Omega": ind_s,
        "ambiguous": bool(amb_m or amb_h or amb_o or amb_s),
    })
    return cert


def pseudo_inverse(a: np.ndarray, scale: float) -> np.ndarray:
    """Moore-Penrose inverse of ``h - lam`` with its one-dimensional kernel removed."""
    es = eig_sym(a)
    null = np.abs(es.values) <= PINV_TOL * scale
    if int(null.sum()) != 1:
        raise NonSimpleEigenvalue(
            f"h - lambda has a {int(null.sum())}-dimensional numerical kernel, expected 1",
            margin=float(np.abs(es.values).min()),
        )
    inv = np.where(null, 0.0, 1.0 / np.where(null, 1.0, es.values))
    v = np.real(es.vectors)
    return (v * inv) @ v.T


def schur_complements(cert: LocalGlobalCertificate) -> tuple[np.ndarray, np.ndarray]:
    """(M / (h - lam), M / Omega)."""
    n = cert.n
    a = cert.h_matrix - cert.lam * np.eye(n)
    b = cert.b_matrix
    over_a = cert.omega - b.T @ pseudo_inverse(a, cert.scale) @ b
    if cert.J:
        over_omega = a - b @ np.linalg.solve(cert.omega, b.T)
    else:
        over_omega = a.copy()
    return over_a, over_omega


@dataclass
class SubCheck:
    name: str
    verdict: str
    value: float
    tol: float
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == PASS

    def to_json(self) -> dict:
        return {"check": self.name, "verdict": self.verdict, "pass": self.passed,
                "value": self.value, "tol": self.tol, **self.detail}


def _verdict(ok: bool) -> str:
    return PASS if ok else FAIL


def schur_check(cert: LocalGlobalCertificate, h: SupportedMatrix,
                cs: CycleStructure | None = None) -> list[SubCheck]:
    """Half FD Hessian on T_J against M/(h - lam); M/Omega against S - lam."""
    if cs is None:
        cs = analyze_cycles(h.graph)
    over_a, over_omega = schur_complements(cert)
    out = []
    if cert.J:
        hess = fd_derivatives(h, np.zeros(cs.beta), cert.k, cs=cs)["hessian"]
        sub = 0.5 * hess[np.ix_(cert.J, cert.J)]
        err = float(np.abs(over_a - sub).max())
    else:
        err = 0.0
    tol = SCHUR_REL * (1.0 + float(np.abs(cert.omega).max(initial=0.0)))
    out.append(SubCheck("schur_hessian", _verdict(err <= tol), err, tol))
    s_err = float(np.abs(over_omega - (cert.s_matrix - cert.lam * np.eye(cert.n))).max())
    out.append(SubCheck("schur_omega", _verdict(s_err <= ALGEBRA_TOL * cert.scale), s_err,
                        ALGEBRA_TOL * cert.scale))
    return out


def haynsworth_check(cert: LocalGlobalCertificate) -> list[SubCheck]:
    """Both inertia additivity identities and the derived index of S - lam."""
    over_a, _ = schur_complements(cert)
    ind_a, amb_a = inertia(over_a, cert.scale)
    inert = cert.inertias
    ambiguous = inert["ambiguous"] or amb_a
    cert.inertias["M_over_h"] = ind_a
    lhs = inert["M"]
    first = lhs == ind_a + inert["h_minus_lambda"]
    second = lhs == inert["M_over_Omega"] + inert["Omega"]
    derived = inert["M_over_Omega"] == ind_a + cert.k - 1 - cert.m_count
    out = []
    for name, ok in (("haynsworth_h", first), ("haynsworth_omega", second),
                     ("index_s", derived)):
        verdict = INDETERMINATE if ambiguous else _verdict(ok)
        out.append(SubCheck(name, verdict, float(not ok), 0.0, {
            "ind_M": lhs, "ind_h_minus_lambda": inert["h_minus_lambda"], "ind_Omega": inert["Omega"],
            "ind_M_over_h": ind_a, "ind_M_over_Omega": inert["M_over_Omega"], "m": cert.m_count,
        }))
    return out


def subtorus_grid(q: int, grid_per_dim: int) -> np.ndarray:
    ticks = 2 * np.pi * np.arange(grid_per_dim) / grid_per_dim
    if q == 0:
        return np.zeros((1, 0))
    return np.array(list(itertools.product(ticks, repeat=q)))


def grid_spectra(h: SupportedMatrix, J: tuple[int, ...], grid_per_dim: int,
                 cs: CycleStructure) -> np.ndarray:
    """Spectra of ``alpha * h`` at every grid point of T_J (rows follow subtorus_grid)."""
    pts = subtorus_grid(len(J), grid_per_dim)
    out = np.empty((len(pts), h.n))
    alpha = np.zeros(cs.beta)
    for i, p in enumerate(pts):
        alpha[list(J)] = p
        out[i] = eig_herm(torus_action(h, alpha, cs)).values
    return out


def weyl_localglobal_check(h: SupportedMatrix, eps: int, k: int, J, grid_per_dim: int = 32,
                           cs: CycleStructure | None = None, spectra=None,
                           grid_cache: dict | None = None) -> list[SubCheck]:
    """Kernel, Weyl-bound and one-sided checks on the grid of ``eps + T_J``.

    The one-sided check (lambda_k stays below its value at ``eps`` on
    T_-(eps), above it on T_+(eps)) runs when ``J`` lies inside J_-(eps) or
    inside its complement; for a mixed ``J`` it is skipped.
    ``grid_cache`` may be shared across calls to reuse grid eigensolves.
    """
    if cs is None:
        cs = analyze_cycles(h.graph)
    J = _as_tuple(J, cs.beta)
    if len(J) > GRID_MAX_DIM:
        raise InputError(f"grid checks support |J| <= {GRID_MAX_DIM}, got {len(J)}")
    if not J:
        return [SubCheck(name, PASS, 0.0, IDENTITY_TOL)
                for name in ("kernel", "weyl", "one_sided")]
    if spectra is None:
        spectra = symmetry_spectra(h, cs)
    hs = signing(h, eps, cs)
    cert = build_certificate(hs, k, J, cs)
    tol = IDENTITY_TOL

    key = (eps, J, grid_per_dim)
    if grid_cache is not None and key in grid_cache:
        vals = grid_cache[key]
    else:
        vals = grid_spectra(hs, J, grid_per_dim, cs)
        if grid_cache is not None:
            grid_cache[key] = vals
    pts = subtorus_grid(len(J), grid_per_dim)
    lam_grid = vals[:, k - 1]

    m = cert.m_count
    kern = 0.0
    kern_at = None
    for p in pts:
        w = eig_herm(cert.r_sum(p)).values
        x = abs(w[m]) if m < cert.n else 0.0
        if x > kern:
            kern, kern_at = x, p
    out = [SubCheck("kernel", _verdict(kern <= tol), kern, tol,
                    {"worst_point": None if kern_at is None else kern_at.tolist()})]

    if k - m >= 1:
        bound = float(eig_sym(cert.s_matrix).values[k - m - 1])
        slack = bound - lam_grid
        worst = int(np.argmax(slack))
        out.append(SubCheck("weyl", _verdict(slack[worst] <= tol), float(slack[worst]), tol,
                            {"bound": bound, "worst_point": pts[worst].tolist()}))
    else:
        out.append(SubCheck("weyl", PASS, 0.0, tol, {"vacuous": True}))

    jm = j_minus(h, eps, k, cs, spectra)
    mask = sum(1 << j for j in J)
    base = float(spectra[eps].values[k - 1])
    if mask & ~jm == 0:
        excess = lam_grid - base
        side = "minus"
    elif mask & jm == 0:
        excess = base - lam_grid
        side = "plus"
    else:
        out.append(SubCheck("one_sided", PASS, 0.0, tol, {"skipped": "mixed subset"}))
        return out
    worst = int(np.argmax(excess))
    out.append(SubCheck("one_sided", _verdict(excess[worst] <= tol), float(excess[worst]), tol,
                        {"side": side, "worst_point": pts[worst].tolist()}))
    return out

import itertools

import numpy as np
import pytest

from nodalsurplus.errors import InputError, NonSimpleEigenvalue
from nodalsurplus.local_global import (
    build_certificate,
    haynsworth_check,
    inertia,
    pseudo_inverse,
    schur_check,
    schur_complements,
    subtorus_grid,
    weyl_localglobal_check,
)
from nodalsurplus.magnetic import fd_derivatives, j_minus
from nodalsurplus.matrix_space import signing


def _subsets(beta):
    return [J for q in range(beta + 1) for J in itertools.combinations(range(beta), q)]


def test_inertia_bands():
    assert inertia(np.diag([-1.0, 2.0, -3.0]), 1.0) == (2, False)
    assert inertia(np.diag([-1e-13, 1.0]), 1.0) == (0, False)
    assert inertia(np.diag([-1e-10, 1.0]), 1.0) == (0, True)
    assert inertia(np.zeros((0, 0)), 1.0) == (0, False)


def test_haynsworth_random_blocks(rng):
    """Inertia additivity for random blocks, checked with numpy eigenvalues."""
    for _ in range(50):
        n, q = rng.integers(2, 7), rng.integers(1, 4)
        a = rng.normal(size=(n, n)); a = a + a.T
        c = rng.normal(size=(q, q)); c = c + c.T
        b = rng.normal(size=(n, q))
        m = np.block([[a, b], [b.T, c]])
        neg = lambda x: int(np.sum(np.linalg.eigvalsh(x) < 0))
        assert neg(m) == neg(c) + neg(a - b @ np.linalg.solve(c, b.T))
        assert neg(m) == neg(a) + neg(c - b.T @ np.linalg.solve(a, b))
        assert inertia(m, 1.0)[0] == neg(m)


def test_pseudo_inverse(inst_b):
    hm = inst_b.h.dense()
    lam = np.linalg.eigvalsh(hm)[2]
    a = hm - lam * np.eye(6)
    p = pseudo_inverse(a, 1 + inst_b.h.frobenius)
    assert np.allclose(p, np.linalg.pinv(a, rcond=1e-8), atol=1e-8)
    with pytest.raises(NonSimpleEigenvalue):
        pseudo_inverse(np.diag([0.0, 0.0, 1.0]), 1.0)


def test_certificate_entries(inst_b):
    h, cs = inst_b.h, inst_b.cs
    hm = h.dense()
    w, v = np.linalg.eigh(hm)
    for k in range(1, 7):
        cert = build_certificate(h, k, (0, 1), cs)
        phi = v[:, k - 1]
        for pos, (r, s) in enumerate(cs.representative_edges):
            assert cert.omega[pos, pos] == pytest.approx(-hm[r, s] * phi[r] * phi[s], abs=1e-12)
        assert np.abs(cert.b_matrix.T @ cert.phi).max() <= 1e-12
        assert cert.m_count == int(np.sum(np.diag(cert.omega) < 0))
        assert cert.lam == pytest.approx(w[k - 1], abs=1e-12)


def test_certificate_invariants_all_points(inst_b):
    h, cs = inst_b.h, inst_b.cs
    for eps in range(4):
        hs = signing(h, eps, cs)
        for k in range(1, 7):
            for J in _subsets(2):
                cert = build_certificate(hs, k, J, cs)
                bad = {name: v for name, v in cert.invariants.items() if not v["pass"]}
                assert not bad, (eps, k, J, bad)
                assert not cert.inertias["ambiguous"]


def test_trace_is_not_twice_omega(inst_b):
    cert = build_certificate(inst_b.h, 3, (0, 1), inst_b.cs)
    r, s = cert.edges[0]
    phi = cert.phi
    tr = np.trace(cert.r_matrix(0, 0.4)).real
    hrs = cert.h_matrix[r, s]
    assert tr == pytest.approx(-hrs * (phi[r] ** 2 + phi[s] ** 2) / (phi[r] * phi[s]), rel=1e-12)
    assert np.sign(tr) == np.sign(cert.omega[0, 0])


def test_b_sign_variants(inst_b):
    cert = build_certificate(inst_b.h, 2, (0, 1), inst_b.cs)
    r0 = np.real(cert.r_sum([0.0, 0.0]))
    omega_inv = np.linalg.inv(cert.omega)
    b = cert.b_matrix
    assert np.allclose(r0, b @ omega_inv @ b.T, atol=1e-10)
    assert np.allclose(r0, (-b) @ omega_inv @ (-b).T, atol=1e-10)
    swapped = np.zeros_like(b)
    for pos, (r, s) in enumerate(cert.edges):
        hrs = cert.h_matrix[r, s]
        swapped[r, pos] = hrs * cert.phi[r]
        swapped[s, pos] = -hrs * cert.phi[s]
    assert not np.allclose(r0, swapped @ omega_inv @ swapped.T, atol=1e-6)


def test_schur_against_fd_hessian(inst_b):
    h, cs = inst_b.h, inst_b.cs
    for k in range(1, 7):
        cert = build_certificate(h, k, (0, 1), cs)
        over_a, over_omega = schur_complements(cert)
        hess = fd_derivatives(h, np.zeros(2), k, cs=cs)["hessian"]
        assert np.abs(2 * over_a - hess).max() <= 1e-4 * (1 + np.abs(hess).max())
        assert np.allclose(over_omega, cert.s_matrix - cert.lam * np.eye(6), atol=1e-10)
        assert all(c.passed for c in schur_check(cert, h, cs))


def test_haynsworth_checks(inst_b):
    h, cs = inst_b.h, inst_b.cs
    for eps in range(4):
        hs = signing(h, eps, cs)
        for k in range(1, 7):
            cert = build_certificate(hs, k, (0, 1), cs)
            checks = haynsworth_check(cert)
            assert [c.name for c in checks] == ["haynsworth_h", "haynsworth_omega", "index_s"]
            assert all(c.passed for c in checks)
            # index of M/(h - lam) is the Morse index = |J_-|
            assert cert.inertias["M_over_h"] == bin(j_minus(h, eps, k, cs, inst_b.spectra)).count("1")


def test_subtorus_grid():
    assert subtorus_grid(0, 5).shape == (1, 0)
    g = subtorus_grid(2, 4)
    assert g.shape == (16, 2) and g.max() < 2 * np.pi


def test_weyl_localglobal(inst_b):
    cache = {}
    for eps in range(4):
        for k in (1, 3, 6):
            for J in _subsets(2):
                checks = weyl_localglobal_check(inst_b.h, eps, k, J, grid_per_dim=12, cs=inst_b.cs,
                                                spectra=inst_b.spectra, grid_cache=cache)
                assert [c.name for c in checks] == ["kernel", "weyl", "one_sided"]
                assert all(c.passed for c in checks), [c.to_json() for c in checks]


def test_weyl_rejects_large_subset(inst_b):
    with pytest.raises(InputError):
        weyl_localglobal_check(inst_b.h, 0, 1, (0, 5), cs=inst_b.cs)

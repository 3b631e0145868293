import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from nodalsurplus.errors import InputError, SolverBreakdown
from nodalsurplus.spectra import eig_herm, eig_sym, jacobi_eigh, spectral_margins


def _residual_ok(h, es, tol=1e-10):
    fro = np.linalg.norm(h)
    for k in range(es.n):
        phi = es.vectors[:, k]
        assert np.linalg.norm(h @ phi - es.values[k] * phi) <= tol * (1 + fro)
    gram = es.vectors.conj().T @ es.vectors
    assert np.abs(gram - np.eye(es.n)).max() <= 1e-10


def test_diagonal():
    es = eig_sym(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(es.values, [1, 2, 3])
    assert np.allclose(es.vectors, np.eye(3))
    assert spectral_margins(es)["min_gap"] == pytest.approx(1.0)


def test_triangle_adjacency():
    a = np.ones((3, 3)) - np.eye(3)
    es = eig_sym(a)
    assert np.allclose(es.values, [-1, -1, 2], atol=1e-12)
    assert spectral_margins(es)["min_gap"] == pytest.approx(0.0, abs=1e-12)
    _residual_ok(a, es)


def test_random_symmetric(rng):
    a = rng.normal(size=(8, 8))
    a = a + a.T
    es = eig_sym(a)
    _residual_ok(a, es)
    assert np.allclose(es.values, np.linalg.eigvalsh(a), atol=1e-12)


def test_vanishing_entry():
    a = np.diag([1.0, 2.0, 3.0])
    assert spectral_margins(eig_sym(a))["min_vector_entry"] == 0.0


def test_pauli_y():
    es = eig_herm(np.array([[0, 1j], [-1j, 0]]))
    assert np.allclose(es.values, [-1, 1])
    _residual_ok(np.array([[0, 1j], [-1j, 0]]), es)


def test_herm_matches_sym_on_real(rng):
    a = rng.normal(size=(7, 7))
    a = a + a.T
    assert np.abs(eig_herm(a).values - eig_sym(a).values).max() <= 1e-10 * (1 + np.linalg.norm(a))


def test_random_hermitian(rng):
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    a = a + a.conj().T
    es = eig_herm(a)
    _residual_ok(a, es)
    assert np.allclose(es.values, np.linalg.eigvalsh(a), atol=1e-11)
    # embedding eigenvalues come in pairs
    emb = np.block([[a.real, -a.imag], [a.imag, a.real]])
    w, _ = jacobi_eigh(emb)
    assert np.abs(w[1::2] - w[0::2]).max() <= 1e-8 * (1 + np.linalg.norm(a))


def test_degenerate_hermitian_cluster():
    # triangle with flux 0 has a double eigenvalue; vectors still orthonormal eigenvectors
    a = (np.ones((3, 3)) - np.eye(3)).astype(complex)
    es = eig_herm(a)
    _residual_ok(a, es)


def test_herm_close_eigenvalues():
    # eigenvalues -d, 0, 0, 0, d with d far below the clustering tolerance
    a = np.zeros((5, 5), dtype=complex)
    a[0, 1], a[1, 0] = 5.4e-9j, -5.4e-9j
    es = eig_herm(a)
    _residual_ok(a, es, tol=1e-15)
    assert np.allclose(es.values, np.linalg.eigvalsh(a), atol=1e-20)
    b = np.diag([1.0, 1.0 + 3e-9, 1.0 + 7e-9, 4.0]).astype(complex)
    b[0, 2] = b[2, 0] = 1e-9
    _residual_ok(b, eig_herm(b), tol=1e-15)


def test_herm_near_degenerate_stress():
    """Integer diagonals plus sparse perturbations of size 1e-16..1e-2."""
    rng = np.random.default_rng(0)
    for _ in range(500):
        n = int(rng.integers(2, 8))
        x = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        x = x * 10.0 ** rng.uniform(-16, -2) * rng.choice([0, 1], (n, n))
        a = np.diag(np.round(rng.normal(size=n))) + 0.5 * (x + x.conj().T)
        es = eig_herm(a)
        fro = np.linalg.norm(a)
        res = max(np.linalg.norm(a @ es.vectors[:, k] - es.values[k] * es.vectors[:, k]) for k in range(n))
        assert res <= 1e-13 * (1 + fro)
        assert np.abs(es.vectors.conj().T @ es.vectors - np.eye(n)).max() <= 1e-14
        assert np.abs(es.values - np.linalg.eigvalsh(a)).max() <= 1e-13 * (1 + fro)


def test_phase_normalization():
    a = np.array([[2.0, 1j, 0], [-1j, 2.0, 1.0], [0, 1.0, 3.0]])
    es = eig_herm(a)
    for k in range(3):
        v = es.vectors[:, k]
        i = np.argmax(np.abs(v))
        assert abs(v[i].imag) < 1e-14 and v[i].real > 0


@pytest.mark.parametrize("bad", [
    np.array([[1.0, 2.0], [0.0, 1.0]]),
    np.array([[1.0, np.nan], [np.nan, 1.0]]),
    np.ones((2, 3)),
])
def test_sym_rejects(bad):
    with pytest.raises(InputError):
        eig_sym(bad)


def test_sym_rejects_complex():
    with pytest.raises(InputError):
        eig_sym(np.array([[0, 1j], [-1j, 0]]))


def test_herm_rejects_non_hermitian():
    with pytest.raises(InputError):
        eig_herm(np.array([[0, 1j], [1j, 0]]))


def test_solver_breakdown_is_numerical():
    assert issubclass(SolverBreakdown, ArithmeticError)


def _oracle_values(a):
    """numpy eigvalsh after flushing entries below 1e-30 ||a|| to zero.

    LAPACK mis-scales matrices that mix O(1) entries with ~1e-79 ones (it
    returned 1 +- sqrt5 off by 6e-9 on such an input); by Weyl the flush moves
    the true eigenvalues by at most n 1e-30 ||a||.
    """
    a = np.where(np.abs(a) < 1e-30 * np.linalg.norm(a), 0, a)
    return np.linalg.eigvalsh(a)


sym = arrays(np.float64, (5, 5), elements=st.floats(-10, 10, allow_nan=False))


@given(sym)
@settings(max_examples=100, deadline=None)
def test_property_sym(a):
    a = a + a.T
    es = eig_sym(a)
    fro = np.linalg.norm(a)
    assert np.all(np.diff(es.values) >= 0)
    assert abs(np.trace(a) - es.values.sum()) <= 1e-10 * (1 + fro)
    assert np.abs(es.values - _oracle_values(a)).max() <= 1e-10 * (1 + fro)
    _residual_ok(a, es)
    perm = np.random.default_rng(0).permutation(5)
    assert np.allclose(eig_sym(a[np.ix_(perm, perm)]).values, es.values, atol=1e-10 * (1 + fro))


@given(sym, sym)
@settings(max_examples=100, deadline=None)
def test_property_herm(x, y):
    a = (x + x.T) + 1j * (y - y.T)
    es = eig_herm(a)
    fro = np.linalg.norm(a)
    assert np.abs(es.values - _oracle_values(a)).max() <= 1e-10 * (1 + fro)
    assert abs(np.trace(a).real - es.values.sum()) <= 1e-10 * (1 + fro)
    _residual_ok(a, es)

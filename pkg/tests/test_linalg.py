import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mubchan.linalg import (
    DimensionMismatch,
    NonSquare,
    NotDensity,
    NotHermitian,
    NotPSD,
    herm_eig,
    kron,
    ket,
    max_entangled,
    partial_transpose,
    projector,
    schatten_p_norm,
    singular_values,
    von_neumann_entropy,
)
from mubchan.pauli import weyl

from .conftest import random_density


def test_eig_identity_and_diagonal():
    assert np.allclose(herm_eig(np.eye(3)).eigenvalues, [1, 1, 1])
    assert np.allclose(herm_eig(np.diag([0, 0.5, 0.5])).eigenvalues, [0.5, 0.5, 0])


def test_eig_errors():
    with pytest.raises(NonSquare):
        herm_eig(np.ones((2, 3)))
    with pytest.raises(NotHermitian):
        herm_eig(np.array([[0, 1], [0, 0]]))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 81), st.integers(0, 2**32 - 1))
def test_eig_reconstruction(n, seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    h = g + g.conj().T
    sp = herm_eig(h)
    u = sp.eigenvectors
    assert np.all(np.diff(sp.eigenvalues) <= 0)
    assert np.max(np.abs(sp.reconstruct() - h)) <= 1e-11 * n * max(1.0, np.abs(h).max())
    assert np.max(np.abs(u.conj().T @ u - np.eye(n))) <= 1e-11


def test_eig_is_deterministic(rng):
    g = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    h = g + g.conj().T
    a, b = herm_eig(h), herm_eig(h.copy())
    assert np.array_equal(a.eigenvectors, b.eigenvectors)


def test_singular_values():
    u = weyl(5, (1, 2))
    assert np.allclose(singular_values(u), 1, atol=1e-11)
    v = np.array([1, 1j, 0]) / np.sqrt(2)
    w = np.array([0, 1, 0])
    assert np.allclose(singular_values(np.outer(v, w)), [1, 0, 0], atol=1e-14)


def test_kron_layout():
    assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))
    m = kron(weyl(2, (1, 0)), weyl(2, (0, 1)))
    expect = np.zeros((4, 4))
    for (r, c), v in zip([(2, 0), (3, 1), (0, 2), (1, 3)], [1, -1, 1, -1]):
        expect[r, c] = v
    assert np.allclose(m, expect)
    beta = sum(kron(ket(3, k), ket(3, k)) for k in range(3)) / np.sqrt(3)
    assert np.isclose(np.linalg.norm(beta), 1)
    assert np.allclose(beta, max_entangled(3))


def test_partial_transpose(rng):
    diag = np.diag(rng.uniform(size=9))
    assert np.array_equal(partial_transpose(diag, 3, 3), diag)
    bb = projector(max_entangled(2))
    pt = partial_transpose(bb, 2, 2, subsystem=1)
    anti = np.array([0, 1, -1, 0]) / np.sqrt(2)
    assert np.allclose(pt @ anti, -0.5 * anti)
    m = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    for sub in (1, 2):
        assert np.array_equal(partial_transpose(partial_transpose(m, 2, 3, sub), 2, 3, sub), m)
    with pytest.raises(DimensionMismatch):
        partial_transpose(np.eye(5), 2, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_partial_transpose_preserves_trace_and_hermiticity(d1, d2, seed):
    rho = random_density(np.random.default_rng(seed), d1 * d2)
    for sub in (1, 2):
        pt = partial_transpose(rho, d1, d2, sub)
        assert abs(np.trace(pt) - 1) <= 1e-13
        assert np.max(np.abs(pt - pt.conj().T)) <= 1e-15


def test_schatten_values():
    assert np.isclose(schatten_p_norm(np.eye(3) / 3, 2), 1 / np.sqrt(3))
    assert np.isclose(schatten_p_norm(np.diag([2 / 3, 1 / 6, 1 / 6]), 2), np.sqrt(0.5))
    assert np.isclose(schatten_p_norm(np.diag([0, 0.5, 0.5]), 1.5), 0.7937005259840998)
    assert np.isclose(schatten_p_norm(np.diag([0.2, 0.8]), np.inf), 0.8)
    assert np.isclose(schatten_p_norm(np.diag([0.2, 0.8]), 1), 1.0)
    # dust below the clip is tolerated, anything larger is not
    assert schatten_p_norm(np.diag([1.0, -5e-11]), 2) == 1.0
    with pytest.raises(NotPSD):
        schatten_p_norm(np.diag([1.0, -1e-6]), 2)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(0, 2**32 - 1))
def test_schatten_monotone_in_p(d, seed):
    rho = random_density(np.random.default_rng(seed), d)
    vals = [schatten_p_norm(rho, p) for p in (1, 1.2, 1.5, 2, 3, 7, np.inf)]
    assert all(a >= b - 1e-13 for a, b in zip(vals, vals[1:]))


def test_entropy():
    assert von_neumann_entropy(projector([1, 0, 0])) == 0
    assert np.isclose(von_neumann_entropy(np.diag([0, 0.5, 0.5])), 1.0)
    assert np.isclose(von_neumann_entropy(np.eye(3) / 3), np.log2(3))
    with pytest.raises(NotDensity):
        von_neumann_entropy(np.eye(2))

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcorr.errors import DimensionMismatch, NotHermitian, NotPSD
from qcorr.linalg import (
    SZ,
    hermitian_eigensystem,
    matrix_sqrt_psd,
    partial_trace,
    tensor_product,
)
from qcorr.states import bell, random_state, validate

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_hermitian(rng, dim=4, scale=10.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = a + a.conj().T
    return scale * h / np.max(np.abs(h))


def test_pauli_z_spectrum():
    es = hermitian_eigensystem(SZ)
    np.testing.assert_allclose(es.eigenvalues, [1, -1])


def test_identity_spectrum():
    np.testing.assert_allclose(hermitian_eigensystem(np.eye(4)).eigenvalues, [1, 1, 1, 1])


def test_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        hermitian_eigensystem(np.array([[0, 1], [0, 0]]))


def test_rejects_bad_dimension():
    with pytest.raises(DimensionMismatch):
        hermitian_eigensystem(np.eye(3))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_eigen_reconstruction(seed):
    rng = np.random.default_rng(seed)
    h = random_hermitian(rng)
    es = hermitian_eigensystem(h)
    v, w = es.eigenvectors, es.eigenvalues
    assert np.all(np.diff(w) <= 0)
    assert np.max(np.abs(h - es.reconstruct())) < 1e-9
    assert np.max(np.abs(v.conj().T @ v - np.eye(4))) < 1e-10
    for k in range(4):
        assert np.linalg.norm(h @ v[:, k] - w[k] * v[:, k]) < 1e-10


def test_eigenvector_phase_convention():
    es = hermitian_eigensystem(np.diag([1.0, 2.0, 3.0, 4.0]) + 0j)
    for k in range(4):
        col = es.eigenvectors[:, k]
        first = col[np.argmax(np.abs(col) > 1e-12)]
        assert first.real > 0 and abs(first.imag) < 1e-15


def test_tensor_identity_and_projector():
    np.testing.assert_array_equal(tensor_product(np.eye(2), np.eye(2)), np.eye(4))
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    expect = np.zeros((4, 4))
    expect[1, 1] = 1
    np.testing.assert_array_equal(tensor_product(p0, p1), expect)


def test_tensor_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        tensor_product(np.eye(4), np.eye(2))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_tensor_matches_elementwise_definition(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2)) for _ in range(3))
    k = tensor_product(a, b)
    for i in range(2):
        for j in range(2):
            for m in range(2):
                for n in range(2):
                    assert abs(k[2 * i + m, 2 * j + n] - a[i, j] * b[m, n]) < 1e-13
    assert abs(np.trace(k) - np.trace(a) * np.trace(b)) < 1e-12
    # bilinearity
    assert np.allclose(tensor_product(a + 2 * c, b), k + 2 * tensor_product(c, b))


def test_partial_trace_product_and_bell():
    rng = np.random.default_rng(1)
    ra, rb = random_state(rng, 2), random_state(rng, 2)
    np.testing.assert_allclose(partial_trace(np.kron(ra, rb), 1), ra, atol=1e-14)
    np.testing.assert_allclose(partial_trace(np.kron(ra, rb), 2), rb, atol=1e-14)
    np.testing.assert_allclose(partial_trace(bell(1), 1), np.eye(2) / 2, atol=1e-15)


def test_partial_trace_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(2), 1)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_marginals_are_states(seed):
    rho = random_state(np.random.default_rng(seed))
    for keep in (1, 2):
        m = partial_trace(rho, keep)
        assert abs(np.trace(m) - 1) < 1e-12
        assert validate(m).min_eigenvalue >= -1e-10
        assert validate(m).passed


def test_sqrt_simple():
    np.testing.assert_allclose(matrix_sqrt_psd(np.eye(4)), np.eye(4), atol=1e-15)
    np.testing.assert_allclose(matrix_sqrt_psd(0.25 * np.eye(4)), 0.5 * np.eye(4), atol=1e-15)


def test_sqrt_clips_tiny_negative_and_rejects_large():
    a = np.diag([0.5, 0.5, 0.0, -5e-10]) + 0j
    s = matrix_sqrt_psd(a)
    assert np.min(np.linalg.eigvalsh(s)) >= 0
    with pytest.raises(NotPSD):
        matrix_sqrt_psd(np.diag([1.0, -1e-6]))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_sqrt_squares_back(seed):
    rng = np.random.default_rng(seed)
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    a = g @ g.conj().T
    s = matrix_sqrt_psd(a)
    assert np.max(np.abs(s - s.conj().T)) < 1e-12
    assert np.max(np.abs(s @ s - a)) < 1e-8

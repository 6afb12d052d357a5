import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import central_difference, random_hermitian, taylor_expm
from robust_cr.errors import ContractError, DimensionError
from robust_cr.operators import annihilation, embed, expm_derivative, expm_hermitian

SX = np.array([[0, 1], [1, 0]], dtype=complex)


def test_annihilation_matrix_elements():
    np.testing.assert_array_equal(annihilation(2), [[0, 1], [0, 0]])
    b = annihilation(3)
    assert b[1, 2] == pytest.approx(np.sqrt(2))
    np.testing.assert_allclose(b.conj().T @ b, np.diag([0, 1, 2]), atol=1e-15)


def test_annihilation_rejects_single_level():
    with pytest.raises(DimensionError):
        annihilation(1)


def test_embed_slots():
    np.testing.assert_array_equal(embed(SX, 1, (2, 2)), np.kron(SX, np.eye(2)))
    np.testing.assert_array_equal(embed(np.eye(3), 2, (3, 3)), np.eye(9))
    lower2 = embed(annihilation(3), 2, (3, 3))
    ket01 = np.zeros(9)
    ket01[1] = 1.0
    expected = np.zeros(9)
    expected[0] = 1.0
    np.testing.assert_allclose(lower2 @ ket01, expected)


def test_embed_dimension_mismatch():
    with pytest.raises(DimensionError):
        embed(np.eye(2), 1, (3, 3))


def test_expm_diagonal_and_pauli():
    w, t = 2.3, 0.7
    np.testing.assert_allclose(expm_hermitian(np.diag([0.0, w]), t), np.diag([1, np.exp(-1j * w * t)]), atol=1e-15)
    np.testing.assert_allclose(expm_hermitian(SX, np.pi / 2), -1j * SX, atol=1e-15)


def test_expm_matches_taylor_oracle(rng):
    for _ in range(10):
        h = random_hermitian(rng, 9)
        np.testing.assert_allclose(expm_hermitian(h, 1.0), taylor_expm(-1j * h), atol=1e-10, rtol=0)


def test_expm_rejects_non_hermitian(rng):
    with pytest.raises(ContractError):
        expm_hermitian(rng.normal(size=(3, 3)) + 1j, 1.0)


@pytest.mark.parametrize("dim", [4, 9])
def test_expm_unitarity(rng, dim):
    for _ in range(100):
        u = expm_hermitian(random_hermitian(rng, dim, scale=5.0), rng.uniform(-3, 3))
        assert np.max(np.abs(u.conj().T @ u - np.eye(dim))) < 1e-11


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(-5, 5), st.floats(-5, 5))
def test_group_property(seed, t1, t2):
    h = random_hermitian(np.random.default_rng(seed), 4)
    np.testing.assert_allclose(expm_hermitian(h, t1) @ expm_hermitian(h, t2), expm_hermitian(h, t1 + t2), atol=1e-10)


def test_derivative_commuting_and_zero(rng):
    h = np.diag(rng.normal(size=4)).astype(complex)
    d = np.diag(rng.normal(size=4)).astype(complex)
    t = 0.8
    np.testing.assert_allclose(expm_derivative(h, d, t), -1j * t * d @ expm_hermitian(h, t), atol=1e-14)
    g = random_hermitian(rng, 4)
    np.testing.assert_allclose(expm_derivative(np.zeros((4, 4), complex), g, t), -1j * t * g, atol=1e-14)


def test_derivative_matches_finite_differences(rng):
    for _ in range(10):
        h, d = random_hermitian(rng, 9), random_hermitian(rng, 9)
        exact = expm_derivative(h, d, 1.0)
        errs = []
        for step in (1e-5, 1e-6, 1e-7):
            fd = central_difference(lambda c: taylor_expm(-1j * (h + c * d)), 0.0, step)
            errs.append(np.max(np.abs(fd - exact)) / np.max(np.abs(exact)))
        assert min(errs) < 1e-6


def test_derivative_degenerate_spectrum():
    # exactly degenerate pair takes the coincident branch; result still matches the commuting rule
    h = np.diag([1.0, 1.0, -0.5]).astype(complex)
    d = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 2]], dtype=complex)
    t = 0.3
    expected = -1j * t * d @ expm_hermitian(h, t)
    np.testing.assert_allclose(expm_derivative(h, d, t), expected, atol=1e-14)


def test_derivative_near_degenerate_is_continuous(rng):
    d = random_hermitian(rng, 3)
    base = expm_derivative(np.diag([0.2, 0.2, -1.0]).astype(complex), d, 1.0)
    for eps in (1e-12, 1e-10, 1e-8):
        near = expm_derivative(np.diag([0.2, 0.2 + eps, -1.0]).astype(complex), d, 1.0)
        assert np.max(np.abs(near - base)) < 10 * eps + 1e-14

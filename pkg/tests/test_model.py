import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_cr.errors import DegenerateQubitsError, StrongCouplingError
from robust_cr.model import (GHZ, MHZ, SystemModel, build_controls, build_static, dress,
                             dressed_frequencies, effective_zx_coefficient)
from robust_cr.operators import annihilation, embed

SX = np.array([[0, 1], [1, 0]], dtype=complex)


def hermitian_dev(m):
    return np.max(np.abs(m - np.swapaxes(m.conj(), -1, -2)))


def test_static_vanishes_on_resonance_without_coupling():
    m = SystemModel(levels=2, coupling_j=0.0, drive_freq=5.0 * GHZ, omega1=5.0 * GHZ, omega2=5.0 * GHZ)
    np.testing.assert_array_equal(build_static(m), np.zeros((4, 4)))


def test_static_duffing_ladder():
    m = SystemModel(coupling_j=0.0)
    h = build_static(m)
    detuning1 = m.omega1 - m.frame_frequency
    # bare |2,0> is product index 2*3 + 0
    assert h[6, 6].real == pytest.approx(2 * detuning1 + m.delta1, rel=1e-14)


def test_static_default_spectrum_matches_eigensolver():
    import scipy.linalg

    h = build_static(SystemModel())
    assert h.shape == (9, 9)
    assert hermitian_dev(h) < 1e-12
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(h)), scipy.linalg.eigh(h, eigvals_only=True, driver="ev"), atol=1e-12)


def test_controls_direct_drive():
    c = build_controls(SystemModel(levels=2))
    np.testing.assert_allclose(c[0], np.kron(SX, np.eye(2)))
    np.testing.assert_allclose(c[2], np.kron(np.eye(2), SX))


def test_controls_crosstalk():
    m = SystemModel(alpha1=0.1, alpha2=0.1)
    b = annihilation(3)
    x1 = embed(b + b.conj().T, 1, (3, 3))
    x2 = embed(b + b.conj().T, 2, (3, 3))
    c = build_controls(m)
    np.testing.assert_allclose(c[0], x1 + 0.1 * x2)
    np.testing.assert_allclose(c[2], x2 + 0.1 * x1)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.sampled_from([2, 3]), st.floats(0, 20))
def test_operators_hermitian(a1, a2, levels, j_mhz):
    m = SystemModel(alpha1=a1, alpha2=a2, levels=levels, coupling_j=j_mhz * MHZ)
    assert hermitian_dev(build_static(m)) < 1e-12
    assert hermitian_dev(build_controls(m)) < 1e-12
    s = dress(m)
    assert hermitian_dev(s.controls) < 1e-12
    p = s.projector
    np.testing.assert_allclose(p @ p, p)
    assert np.trace(p).real == 4


def test_dress_without_coupling_is_identity():
    s = dress(SystemModel(coupling_j=0.0))
    np.testing.assert_allclose(s.transform, np.eye(9), atol=1e-15)
    np.testing.assert_array_equal(np.diag(s.projector).real, [1, 1, 0, 1, 1, 0, 0, 0, 0])


def test_dressed_diagonal_equals_eigenvalues():
    m = SystemModel()
    s = dress(m)
    h = s.transform.conj().T @ build_static(m) @ s.transform
    scale = np.max(np.abs(s.energies))
    assert np.max(np.abs(h - np.diag(s.energies))) / scale < 1e-10
    np.testing.assert_allclose(np.sort(s.energies), np.linalg.eigvalsh(build_static(m)), atol=1e-12)


def test_dressed_shift_of_target():
    m = SystemModel()
    s = dress(m)
    j, d12 = m.coupling_j, m.qubit_detuning
    expected = (m.omega2 - m.frame_frequency) - j**2 / d12
    assert abs(s.energies[1] - expected) < 2 * j**4 / abs(d12) ** 3


def test_two_level_matches_three_level_computational_block():
    kw = dict(coupling_j=0.0, drive_freq=4.9 * GHZ)
    e2 = dress(SystemModel(levels=2, **kw)).energies
    e3 = dress(SystemModel(levels=3, **kw)).energies
    np.testing.assert_allclose(e2, e3[[0, 1, 3, 4]], atol=1e-12)


def test_dressed_frequencies_formula():
    m = SystemModel(coupling_j=0.0)
    assert dressed_frequencies(m) == (m.omega1, m.omega2)
    m = SystemModel(omega1=5.2 * GHZ, omega2=5.0 * GHZ, coupling_j=4 * MHZ)
    w1, w2 = dressed_frequencies(m)
    assert (w1 - m.omega1) == pytest.approx(0.08 * MHZ, rel=1e-9)
    assert (m.omega2 - w2) == pytest.approx(0.08 * MHZ, rel=1e-9)


def test_dressed_frequencies_degenerate():
    with pytest.raises(DegenerateQubitsError):
        dressed_frequencies(SystemModel(omega1=5 * GHZ, omega2=5 * GHZ))


def test_exact_two_level_splitting_vs_perturbative():
    m = SystemModel(levels=2)
    s = dress(m)
    exact = s.energies[1] - s.energies[0] + m.frame_frequency
    j, d12 = m.coupling_j, m.qubit_detuning
    assert abs(exact - (m.omega2 - j**2 / d12)) <= 2 * j**4 / abs(d12) ** 3


def test_zx_coefficient():
    m = SystemModel(omega1=5.2 * GHZ, omega2=5.0 * GHZ, coupling_j=4 * MHZ)
    assert effective_zx_coefficient(m) == pytest.approx(0.02)
    assert effective_zx_coefficient(SystemModel(coupling_j=0.0)) == 0.0
    flipped = SystemModel(omega1=5.0 * GHZ, omega2=5.2 * GHZ, coupling_j=4 * MHZ)
    assert effective_zx_coefficient(flipped) == pytest.approx(-0.02)


def test_weak_coupling_flag():
    assert not SystemModel().weak_coupling_warning
    assert SystemModel(coupling_j=30 * MHZ).weak_coupling_warning


def test_invalid_model_parameters():
    with pytest.raises(ValueError):
        SystemModel(levels=4)
    with pytest.raises(ValueError):
        SystemModel(alpha1=1.5)


def test_strong_coupling_rejected():
    with pytest.raises(StrongCouplingError):
        dress(SystemModel(omega1=4.92 * GHZ, coupling_j=100 * MHZ))

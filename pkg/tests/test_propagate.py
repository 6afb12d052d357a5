import numpy as np
import pytest

from oracles import central_difference, taylor_expm
from robust_cr.errors import DimensionError
from robust_cr.model import SystemModel, dress
from robust_cr.propagate import leakage_profile, propagate, propagate_with_gradients, step_generators
from robust_cr.pulse import PulseSet, random_pulse, zero_pulse


def refined_total(system, pulse, sub=100):
    """Product of Taylor exponentials over dt/sub slices of each step."""
    u = np.eye(system.dim, dtype=complex)
    for h in step_generators(system, pulse):
        piece = taylor_expm(-1j * h * pulse.dt / sub)
        for _ in range(sub):
            u = piece @ u
    return u


def test_total_matches_refined_slicing(transmons):
    pulse = random_pulse(20, seed=11)
    exact = propagate(transmons, pulse).total
    assert np.max(np.abs(exact - refined_total(transmons, pulse))) < 1e-8


def test_free_evolution_is_diagonal(transmons):
    pulse = zero_pulse(10)
    u = propagate(transmons, pulse).total
    np.testing.assert_allclose(u, np.diag(np.exp(-1j * transmons.energies * pulse.duration)), atol=1e-12)


def test_cumulative_products(transmons):
    rec = propagate(transmons, random_pulse(6, seed=2))
    acc = np.eye(9)
    for k in range(6):
        acc = rec.step_props[k] @ acc
        np.testing.assert_allclose(rec.cumulative[k], acc, atol=1e-13)


def test_concatenation(transmons):
    a, b = random_pulse(5, seed=1), random_pulse(7, seed=2)
    joined = PulseSet(a.dt, np.hstack([a.amplitudes, b.amplitudes]), a.amp_max)
    u = propagate(transmons, joined).total
    np.testing.assert_allclose(u, propagate(transmons, b).total @ propagate(transmons, a).total, atol=1e-12)


def test_unitarity_long_pulse(transmons):
    u = propagate(transmons, random_pulse(400, init_fraction=1.0, seed=5)).total
    assert np.max(np.abs(u.conj().T @ u - np.eye(9))) < 1e-10


def test_channel_mismatch(transmons):
    bad = PulseSet.__new__(PulseSet)
    object.__setattr__(bad, "dt", 0.5)
    object.__setattr__(bad, "amplitudes", np.zeros((3, 2)))
    with pytest.raises(DimensionError):
        step_generators(transmons, bad)


def test_propagator_gradient_against_finite_differences(transmons):
    pulse = random_pulse(8, init_fraction=1.0, seed=4)
    _, grad = propagate_with_gradients(transmons, pulse)

    def total_with(channel, step):
        def f(c):
            amps = pulse.amplitudes.copy()
            amps[channel, step] = c
            return propagate(transmons, pulse.with_amplitudes(amps)).total
        return f

    for m, k in [(0, 0), (1, 3), (2, 7), (3, 5)]:
        fd = central_difference(total_with(m, k), pulse.amplitudes[m, k], 1e-6)
        assert np.max(np.abs(fd - grad[m, k])) < 1e-7


def test_leakage_zero_for_qubits(qubits):
    prof = leakage_profile(qubits, random_pulse(40, init_fraction=1.0, seed=9))
    np.testing.assert_array_equal(prof, np.zeros(40))


def test_leakage_zero_without_drive(transmons):
    assert np.max(leakage_profile(transmons, zero_pulse(40))) < 1e-12


def test_leakage_positive_for_strong_drive(transmons):
    prof = leakage_profile(transmons, random_pulse(80, init_fraction=1.0, seed=9))
    assert prof.shape == (80,)
    assert np.all((prof >= 0) & (prof <= 1))
    assert np.max(prof) > 1e-3



def test_leakage_tracks_population_loss(rng):
    # L = 1 - (1 - p)^2 with p the mean population lost from the subspace
    from oracles import random_unitary

    comp = [0, 1, 3, 4]
    for _ in range(200):
        u = random_unitary(rng, 9)
        block = u[np.ix_(comp, comp)]
        loss = np.mean(1 - np.sum(np.abs(u[:, comp][comp]) ** 2, axis=0))
        metric = 1 - np.sum(np.abs(block) ** 2) ** 2 / 16
        assert metric == pytest.approx(1 - (1 - loss) ** 2, abs=1e-12)
        assert loss - 1e-12 <= metric <= 2 * loss + 1e-12

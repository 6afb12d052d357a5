"""Piecewise-constant time evolution, exact propagator derivatives and leakage."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .model import DressedSystem
from .operators import dagger, divided_differences
from .pulse import PulseSet


@dataclass(frozen=True, eq=False)
class PropagationRecord:
    """Step propagators ``U_k`` and running products ``P_k = U_k ... U_1``.

    ``eigvals``/``eigvecs`` hold the eigendecomposition of each step generator
    and are reused for derivatives.
    """

    step_props: np.ndarray
    cumulative: np.ndarray
    eigvals: np.ndarray
    eigvecs: np.ndarray
    dt: float

    @property
    def total(self) -> np.ndarray:
        return self.cumulative[-1]

    @property
    def n_steps(self) -> int:
        return len(self.step_props)


def step_generators(system: DressedSystem, pulse: PulseSet) -> np.ndarray:
    if pulse.amplitudes.shape[0] != len(system.controls):
        raise DimensionError(
            f"pulse has {pulse.amplitudes.shape[0]} channels, system has {len(system.controls)}"
        )
    return system.h0_dressed[None] + np.einsum("mk,mij->kij", pulse.amplitudes, system.controls)


def propagate(system: DressedSystem, pulse: PulseSet) -> PropagationRecord:
    gens = step_generators(system, pulse)
    lam, v = np.linalg.eigh(gens)
    steps = (v * np.exp(-1j * pulse.dt * lam)[:, None, :]) @ dagger(v)
    cumulative = np.empty_like(steps)
    acc = steps[0]
    cumulative[0] = acc
    for k in range(1, len(steps)):
        acc = steps[k] @ acc
        cumulative[k] = acc
    return PropagationRecord(steps, cumulative, lam, v, pulse.dt)


def suffix_products(record: PropagationRecord) -> np.ndarray:
    """``S[k] = U_n ... U_{k+1}`` (the evolution after step k), with ``S[n-1] = I``."""
    steps = record.step_props
    out = np.empty_like(steps)
    acc = np.eye(steps.shape[-1], dtype=complex)
    out[-1] = acc
    for k in range(len(steps) - 1, 0, -1):
        acc = acc @ steps[k]
        out[k - 1] = acc
    return out


def prefix_products(record: PropagationRecord) -> np.ndarray:
    """``P[k] = U_{k-1} ... U_1`` (the evolution before step k), with ``P[0] = I``."""
    d = record.step_props.shape[-1]
    return np.concatenate([np.eye(d, dtype=complex)[None], record.cumulative[:-1]])


def step_derivatives(system: DressedSystem, record: PropagationRecord) -> tuple[np.ndarray, np.ndarray]:
    """Control matrices in each step's eigenbasis and the divided-difference kernel.

    Returns ``G[k, m] = V_k^dag H_m V_k`` and ``Phi[k]`` so that
    dU_k/dc_m[k] = V_k (G[k, m] * Phi[k]) V_k^dag.
    """
    v = record.eigvecs
    g = dagger(v)[:, None] @ system.controls[None] @ v[:, None]
    phi = divided_differences(record.eigvals, record.dt)
    return g, phi


def propagate_with_gradients(system: DressedSystem, pulse: PulseSet):
    """Return the record and ``grad[m, k] = dU(T)/dc_m[k]`` of shape (4, n, d, d)."""
    record = propagate(system, pulse)
    g, phi = step_derivatives(system, record)
    v = record.eigvecs
    d_steps = v[:, None] @ (g * phi[:, None]) @ dagger(v)[:, None]  # (n, 4, d, d)
    grad = suffix_products(record)[:, None] @ d_steps @ prefix_products(record)[:, None]
    return record, np.swapaxes(grad, 0, 1)


def leakage_profile(system: DressedSystem, pulse: PulseSet) -> np.ndarray:
    """``1 - |tr(P_k^dag O P_k O)|^2 / n_s^2`` after every step.

    With O diagonal the trace reduces to the summed squared moduli of the
    computational block of ``P_k``.
    """
    comp = system.comp_indices
    if len(comp) == system.dim:
        # no levels outside the computational space: nothing can leak
        return np.zeros(pulse.n_steps)
    record = propagate(system, pulse)
    block = record.cumulative[:, comp][:, :, comp]
    overlap = np.sum(np.abs(block) ** 2, axis=(1, 2))
    return np.clip(1.0 - overlap**2 / system.n_s**2, 0.0, 1.0)

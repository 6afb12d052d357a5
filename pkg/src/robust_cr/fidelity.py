"""Target gate and projected trace fidelity with its exact gradient."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import ContractError, DimensionError
from .model import DressedSystem
from .operators import dagger
from .propagate import PropagationRecord, prefix_products, propagate, step_derivatives, suffix_products
from .pulse import PulseSet

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)


@dataclass(frozen=True, eq=False)
class TargetGate:
    w: np.ndarray

    def embedded(self, dim: int, comp_indices) -> np.ndarray:
        """Full-dimension matrix acting as ``w`` on the computational states, zero elsewhere."""
        full = np.zeros((dim, dim), dtype=complex)
        full[np.ix_(comp_indices, comp_indices)] = self.w
        return full


def target_zx() -> TargetGate:
    """exp(-i pi/4 Z(x)X) = cos(pi/4) I - i sin(pi/4) Z(x)X."""
    zx = np.kron(SIGMA_Z, SIGMA_X)
    c = np.cos(np.pi / 4)
    return TargetGate(c * np.eye(4) - 1j * c * zx)


def cnot_from_zx(w: np.ndarray) -> np.ndarray:
    """exp(i pi/4 Z1) W exp(i pi/4 X2); equals CNOT up to a global phase for W = ZX(pi/4)."""
    z1 = expm(1j * np.pi / 4 * np.kron(SIGMA_Z, np.eye(2)))
    x2 = expm(1j * np.pi / 4 * np.kron(np.eye(2), SIGMA_X))
    return z1 @ w @ x2


def align_global_phase(u: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate ``u`` so its entry at the reference's first nonzero position matches in phase."""
    flat = np.flatnonzero(np.abs(reference) > 1e-12)
    i, j = np.unravel_index(flat[0], reference.shape)
    phase = reference[i, j] / u[i, j]
    return u * (phase / abs(phase))


def _projected_overlap(u_total, target, projector, n_s):
    if u_total.shape != projector.shape:
        raise DimensionError(f"U has shape {u_total.shape}, projector {projector.shape}")
    rank = np.trace(projector).real
    if abs(rank - n_s) > 1e-9:
        raise ContractError(f"n_s = {n_s} but tr(projector) = {rank}")
    comp = np.flatnonzero(np.abs(np.diag(projector)) > 0.5)
    w_full = target.embedded(len(projector), comp)
    a = projector @ dagger(w_full) @ projector
    return a, np.trace(a @ u_total) / n_s


def gate_fidelity(u_total: np.ndarray, target: TargetGate, projector: np.ndarray, n_s: int = 4) -> float:
    """|tr(W^dag O U O) / n_s|^2."""
    _, z = _projected_overlap(u_total, target, projector, n_s)
    return float(abs(z) ** 2)


def fidelity_gradient(record: PropagationRecord, grads: np.ndarray, target: TargetGate,
                      projector: np.ndarray, n_s: int = 4) -> np.ndarray:
    """dF/dc_m[k] from full propagator derivatives ``grads[m, k]``."""
    if grads.shape[1] != record.n_steps or grads.shape[2:] != projector.shape:
        raise DimensionError(f"gradient stack of shape {grads.shape} does not match the record")
    a, z = _projected_overlap(record.total, target, projector, n_s)
    dz = np.einsum("ij,mkji->mk", a, grads) / n_s
    return 2.0 * np.real(np.conj(z) * dz)


def fidelity_and_gradient(system: DressedSystem, pulse: PulseSet, target: TargetGate):
    """Fidelity and its (4, n_steps) gradient without forming full derivative matrices.

    Uses tr(A S_{k+1} dU_k P_{k-1}) = tr(V^dag P_{k-1} A S_{k+1} V (G * Phi)).
    """
    record = propagate(system, pulse)
    a, z = _projected_overlap(record.total, target, system.projector, system.n_s)
    x = prefix_products(record) @ a[None] @ suffix_products(record)
    v = record.eigvecs
    y = dagger(v) @ x @ v
    g, phi = step_derivatives(system, record)
    dz = np.einsum("kba,kmab,kab->mk", y, g, phi) / system.n_s
    return float(abs(z) ** 2), 2.0 * np.real(np.conj(z) * dz)


def pulse_fidelity(system: DressedSystem, pulse: PulseSet, target: TargetGate) -> float:
    return gate_fidelity(propagate(system, pulse).total, target, system.projector, system.n_s)

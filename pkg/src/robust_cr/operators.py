"""Small dense complex matrix helpers.

Everything here works on plain ``numpy`` arrays.  The exponential and its
parameter derivative share one eigendecomposition, which is what makes exact
per-step gradients cheap for the optimizer.
"""
from __future__ import annotations

import numpy as np

from .errors import ContractError, DimensionError

HERMITIAN_TOL = 1e-12
DEGENERACY_TOL = 1e-9


def annihilation(n_levels: int) -> np.ndarray:
    """Bosonic lowering operator truncated to ``n_levels``."""
    if n_levels < 2:
        raise DimensionError(f"n_levels must be >= 2, got {n_levels}")
    return np.diag(np.sqrt(np.arange(1, n_levels)), k=1).astype(complex)


def embed(op: np.ndarray, slot: int, dims: tuple[int, int]) -> np.ndarray:
    """Place a single-mode operator into the two-mode product space.

    ``slot`` is 1 or 2; slot 1 is the left tensor factor.
    """
    n1, n2 = dims
    if slot not in (1, 2):
        raise DimensionError(f"slot must be 1 or 2, got {slot}")
    expected = n1 if slot == 1 else n2
    if op.shape != (expected, expected):
        raise DimensionError(f"operator of shape {op.shape} does not fit slot {slot} of dims {dims}")
    if slot == 1:
        return np.kron(op, np.eye(n2))
    return np.kron(np.eye(n1), op)


def check_hermitian(h: np.ndarray, tol: float = HERMITIAN_TOL) -> None:
    if h.ndim < 2 or h.shape[-1] != h.shape[-2]:
        raise DimensionError(f"expected square matrix, got shape {h.shape}")
    dev = np.max(np.abs(h - np.swapaxes(h.conj(), -1, -2))) if h.size else 0.0
    if dev > tol:
        raise ContractError(f"matrix is not Hermitian (max |H - H^dag| = {dev:.3e})")


def expm_hermitian(h: np.ndarray, t: float) -> np.ndarray:
    """Return exp(-i t H) for Hermitian ``H`` via its eigendecomposition.

    Accepts a stack of matrices (``[..., d, d]``).
    """
    check_hermitian(h)
    if not np.isfinite(t):
        raise ContractError("t must be finite")
    lam, v = np.linalg.eigh(h)
    return _from_eig(lam, v, t)


def _from_eig(lam, v, t):
    phases = np.exp(-1j * t * lam)
    return (v * phases[..., None, :]) @ np.swapaxes(v.conj(), -1, -2)


def divided_differences(lam: np.ndarray, t: float) -> np.ndarray:
    """Kernel ``Phi[a, b]`` such that d/dc exp(-it(H + cD)) = V (G * Phi) V^dag.

    ``Phi[a, b] = (e^{-it l_a} - e^{-it l_b}) / (l_a - l_b)``, evaluated in the
    cancellation-free form ``-it e^{-it(l_a+l_b)/2} sinc(t(l_a-l_b)/2)``.  Pairs
    with ``|l_a - l_b| t`` below ``DEGENERACY_TOL`` use the coincident limit
    ``-it e^{-it l_a}`` directly.
    """
    la = lam[..., :, None]
    lb = lam[..., None, :]
    half = 0.5 * t * (la - lb)
    mean_phase = np.exp(-0.5j * t * (la + lb))
    # np.sinc(x) = sin(pi x)/(pi x)
    kernel = -1j * t * mean_phase * np.sinc(half / np.pi)
    degenerate = np.abs(la - lb) * abs(t) < DEGENERACY_TOL
    coincident = -1j * t * np.exp(-1j * t * la) * np.ones_like(lb)
    return np.where(degenerate, coincident, kernel)


def expm_derivative(h: np.ndarray, d: np.ndarray, t: float) -> np.ndarray:
    """Exact derivative of exp(-i t (H + c D)) with respect to ``c`` at c = 0."""
    check_hermitian(h)
    check_hermitian(d)
    if h.shape != d.shape:
        raise DimensionError(f"shape mismatch {h.shape} vs {d.shape}")
    lam, v = np.linalg.eigh(h)
    vh = np.swapaxes(v.conj(), -1, -2)
    g = vh @ d @ v
    return v @ (g * divided_differences(lam, t)) @ vh


def dagger(m: np.ndarray) -> np.ndarray:
    return np.swapaxes(m.conj(), -1, -2)

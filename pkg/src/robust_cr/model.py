"""Two-transmon drive-frame Hamiltonian, dressed basis and perturbative diagnostics.

Units throughout the package: angular frequencies in rad/ns, times in ns.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from functools import cached_property

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import DegenerateQubitsError, StrongCouplingError
from .operators import annihilation, dagger, embed

TWO_PI = 2.0 * np.pi
GHZ = TWO_PI  # 1 GHz in rad/ns
MHZ = TWO_PI * 1e-3

N_COMPUTATIONAL = 4
CHANNELS = ("c1", "c2", "c3", "c4")


@dataclass(frozen=True)
class SystemModel:
    """Physical parameters of two coupled transmons (rad/ns).

    ``drive_freq=None`` selects the perturbatively shifted target frequency
    omega2 - J^2/(omega1 - omega2), the usual cross-resonance choice.
    For ``levels == 2`` the anharmonicities are ignored.
    """

    omega1: float = 5.114 * GHZ
    omega2: float = 4.914 * GHZ
    delta1: float = -330.0 * MHZ
    delta2: float = -330.0 * MHZ
    coupling_j: float = 3.8 * MHZ
    drive_freq: float | None = None
    alpha1: float = 0.0
    alpha2: float = 0.0
    levels: int = 3

    def __post_init__(self):
        if self.levels not in (2, 3):
            raise ValueError(f"levels must be 2 or 3, got {self.levels}")
        for name in ("alpha1", "alpha2"):
            a = getattr(self, name)
            if not 0.0 <= a <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {a}")

    @property
    def qubit_detuning(self) -> float:
        return self.omega1 - self.omega2

    @property
    def weak_coupling_warning(self) -> bool:
        """True when |J / (omega1 - omega2)| > 0.1 (perturbative picture unreliable)."""
        d12 = self.qubit_detuning
        if d12 == 0:
            return True
        return abs(self.coupling_j / d12) > 0.1

    @property
    def frame_frequency(self) -> float:
        if self.drive_freq is not None:
            return self.drive_freq
        return dressed_frequencies(self)[1]

    @property
    def dims(self) -> tuple[int, int]:
        return (self.levels, self.levels)

    def with_coupling(self, coupling_j: float) -> "SystemModel":
        """Copy with a different J but the same rotating frame."""
        return replace(self, coupling_j=coupling_j, drive_freq=self.frame_frequency)


def dressed_frequencies(model: SystemModel) -> tuple[float, float]:
    """Second-order shifted qubit frequencies (omega1', omega2')."""
    d12 = model.qubit_detuning
    if d12 == 0:
        raise DegenerateQubitsError("omega1 == omega2: dispersive shifts diverge")
    shift = model.coupling_j**2 / d12
    return model.omega1 + shift, model.omega2 - shift


def effective_zx_coefficient(model: SystemModel) -> float:
    """Weight J / (omega1 - omega2) of the ZX term per unit control-qubit drive."""
    d12 = model.qubit_detuning
    if d12 == 0:
        raise DegenerateQubitsError("omega1 == omega2: ZX coefficient undefined")
    return model.coupling_j / d12


def _ladders(model: SystemModel):
    b = annihilation(model.levels)
    return embed(b, 1, model.dims), embed(b, 2, model.dims)


def build_static(model: SystemModel) -> np.ndarray:
    """Drift Hamiltonian in the drive frame, bare product basis."""
    b1, b2 = _ladders(model)
    wd = model.frame_frequency
    h = np.zeros_like(b1)
    for b, omega, delta in ((b1, model.omega1, model.delta1), (b2, model.omega2, model.delta2)):
        n = dagger(b) @ b
        h = h + (omega - wd) * n
        if model.levels > 2:
            h = h + 0.5 * delta * n @ (n - np.eye(len(n)))
    h = h + model.coupling_j * (dagger(b1) @ b2 + b1 @ dagger(b2))
    return 0.5 * (h + dagger(h))


def build_controls(model: SystemModel) -> np.ndarray:
    """Bare-basis control operators, shape (4, d, d), ordered c1..c4.

    c1/c2 are the x/y quadratures of the drive line on transmon 1, c3/c4 on
    transmon 2.  Each line leaks onto the other transmon with weight alpha.
    """
    b1, b2 = _ladders(model)
    x1, x2 = dagger(b1) + b1, dagger(b2) + b2
    y1, y2 = 1j * (dagger(b1) - b1), 1j * (dagger(b2) - b2)
    a1, a2 = model.alpha1, model.alpha2
    return np.stack([x1 + a1 * x2, y1 + a1 * y2, x2 + a2 * x1, y2 + a2 * y1])


def computational_indices(levels: int) -> np.ndarray:
    """Product-basis indices of |00>, |01>, |10>, |11>."""
    return np.array([0, 1, levels, levels + 1])


def bare_label(index: int, levels: int) -> str:
    return f"|{index // levels},{index % levels}>"


@dataclass(frozen=True, eq=False)
class DressedSystem:
    """Static problem in the dressed basis.

    Dressed state ``k`` is the eigenstate assigned to bare product state ``k``,
    so the dressed basis inherits the bare labelling.
    """

    model: SystemModel
    energies: np.ndarray
    controls: np.ndarray
    projector: np.ndarray
    transform: np.ndarray
    basis_map: np.ndarray
    comp_indices: np.ndarray
    n_s: int = N_COMPUTATIONAL

    @cached_property
    def h0_dressed(self) -> np.ndarray:
        return np.diag(self.energies).astype(complex)

    @property
    def dim(self) -> int:
        return len(self.energies)


def dress(model: SystemModel) -> DressedSystem:
    """Diagonalize the drift and express controls in its eigenbasis."""
    h0 = build_static(model)
    lam, vecs = np.linalg.eigh(h0)
    overlap = np.abs(vecs) ** 2  # [bare, eigen]
    bare_idx, eig_idx = linear_sum_assignment(-overlap)
    basis_map = np.empty(len(lam), dtype=int)
    basis_map[bare_idx] = eig_idx
    for k in range(len(lam)):
        if overlap[k, basis_map[k]] <= 0.5:
            raise StrongCouplingError(
                f"dressed state for bare {bare_label(k, model.levels)} has overlap "
                f"{overlap[k, basis_map[k]]:.3f} <= 0.5 (J = {model.coupling_j:.6g} rad/ns)"
            )
    v = vecs[:, basis_map]
    energies = lam[basis_map]
    dominant = v[np.arange(len(lam)), np.arange(len(lam))]
    v = v * (np.abs(dominant) / dominant)[None, :]
    vh = dagger(v)
    controls = vh[None] @ build_controls(model) @ v[None]
    controls = 0.5 * (controls + dagger(controls))
    comp = computational_indices(model.levels)
    projector = np.zeros((len(lam), len(lam)), dtype=complex)
    projector[comp, comp] = 1.0
    return DressedSystem(
        model=model,
        energies=energies,
        controls=controls,
        projector=projector,
        transform=v,
        basis_map=basis_map,
        comp_indices=comp,
    )

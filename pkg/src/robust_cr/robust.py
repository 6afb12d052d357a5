"""Sampled uncertainty in the qubit-qubit coupling and ensemble evaluation."""
from __future__ import annotations

from concurrent.futures import Executor
from dataclasses import dataclass

import numpy as np

from .errors import StrongCouplingError
from .fidelity import TargetGate, fidelity_and_gradient, target_zx
from .model import DressedSystem, SystemModel, dress
from .pulse import PulseSet

MAX_FRACTION = 0.10
SUPPORTED_PARAMETERS = ("coupling_j",)


@dataclass(frozen=True)
class UncertaintySpec:
    fraction: float = 0.0
    n_samples: int = 1
    parameter: str = "coupling_j"

    def __post_init__(self):
        if self.parameter not in SUPPORTED_PARAMETERS:
            raise ValueError(f"unsupported uncertain parameter {self.parameter!r}")
        if not 0.0 <= self.fraction <= MAX_FRACTION:
            raise ValueError(f"fraction must lie in [0, {MAX_FRACTION}], got {self.fraction}")
        if self.n_samples < 1 or self.n_samples % 2 == 0:
            raise ValueError(f"n_samples must be odd and >= 1, got {self.n_samples}")
        if self.fraction == 0.0 and self.n_samples != 1:
            raise ValueError("fraction = 0 requires n_samples = 1")


@dataclass(frozen=True, eq=False)
class UncertaintyEnsemble:
    systems: tuple
    couplings: np.ndarray
    nominal_index: int
    target: TargetGate

    @property
    def weights(self) -> np.ndarray:
        return np.full(len(self.systems), 1.0 / len(self.systems))

    @property
    def nominal(self) -> DressedSystem:
        return self.systems[self.nominal_index]

    def evaluate(self, pulse: PulseSet) -> "EnsembleEvaluation":
        return evaluate_ensemble(self, pulse)


@dataclass(frozen=True, eq=False)
class EnsembleEvaluation:
    fidelities: np.ndarray
    gradients: np.ndarray  # (n_samples, 4, n_steps)

    @property
    def worst_case(self) -> float:
        return float(self.fidelities.min())

    @property
    def average(self) -> float:
        return float(self.fidelities.mean())

    @property
    def best_case(self) -> float:
        return float(self.fidelities.max())


def coupling_grid(j_nominal: float, fraction: float, n_points: int) -> np.ndarray:
    """``n_points`` evenly spaced couplings on [J(1-fraction), J(1+fraction)]."""
    if n_points == 1 or fraction == 0.0:
        return np.full(n_points, float(j_nominal))
    return j_nominal * (1.0 + fraction * np.linspace(-1.0, 1.0, n_points))


def dress_at_coupling(model: SystemModel, coupling_j: float) -> DressedSystem:
    try:
        return dress(model.with_coupling(coupling_j))
    except StrongCouplingError as exc:
        raise StrongCouplingError(f"sample J = {coupling_j!r} rad/ns: {exc}") from exc


def sample_ensemble(model: SystemModel, spec: UncertaintySpec, target: TargetGate | None = None):
    """Dress one system per sampled coupling.  The rotating frame stays at the nominal value."""
    couplings = coupling_grid(model.coupling_j, spec.fraction, spec.n_samples)
    systems = tuple(dress_at_coupling(model, j) for j in couplings)
    return UncertaintyEnsemble(systems, couplings, spec.n_samples // 2, target or target_zx())


def evaluate_ensemble(ensemble: UncertaintyEnsemble, pulse: PulseSet,
                      executor: Executor | None = None) -> EnsembleEvaluation:
    """Per-sample fidelity and gradient.  Results are ordered by sample index."""
    def one(system):
        return fidelity_and_gradient(system, pulse, ensemble.target)

    if executor is None:
        results = [one(s) for s in ensemble.systems]
    else:
        results = list(executor.map(one, ensemble.systems))
    fids = np.array([r[0] for r in results])
    grads = np.stack([r[1] for r in results])
    return EnsembleEvaluation(fids, grads)

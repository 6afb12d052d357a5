"""Minimal-time robust cross-resonance gates via sequential convex programming."""
from .fidelity import TargetGate, fidelity_and_gradient, gate_fidelity, target_zx
from .model import DressedSystem, SystemModel, dress
from .pulse import PulseSet, random_pulse, read_pulse, write_pulse
from .robust import UncertaintyEnsemble, UncertaintySpec, evaluate_ensemble, sample_ensemble
from .scp import OptimizationResult, ScpConfig, scp_optimize
from .search import SweepConfig, run_sweep, verify_robustness

__all__ = [
    "DressedSystem",
    "OptimizationResult",
    "PulseSet",
    "ScpConfig",
    "SweepConfig",
    "SystemModel",
    "TargetGate",
    "UncertaintyEnsemble",
    "UncertaintySpec",
    "dress",
    "evaluate_ensemble",
    "fidelity_and_gradient",
    "gate_fidelity",
    "random_pulse",
    "read_pulse",
    "run_sweep",
    "sample_ensemble",
    "scp_optimize",
    "target_zx",
    "verify_robustness",
    "write_pulse",
]

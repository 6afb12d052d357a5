"""Multi-start, multi-duration sweeps and post-hoc robustness checks."""
from __future__ import annotations

import hashlib
import logging
import math
from concurrent.futures import Executor, as_completed
from dataclasses import dataclass, field

import numpy as np

from .errors import SchemaError, SolverError, StrongCouplingError, SweepError
from .fidelity import TargetGate, pulse_fidelity, target_zx
from .model import MHZ, SystemModel
from .pulse import DEFAULT_AMP_MAX, DEFAULT_DT, DEFAULT_INIT_FRACTION, PulseSet, random_pulse
from .robust import UncertaintySpec, coupling_grid, dress_at_coupling, sample_ensemble
from .scp import OptimizationResult, ScpConfig, scp_optimize

log = logging.getLogger(__name__)

ROBUSTNESS_GAP = 0.005


@dataclass(frozen=True)
class SweepConfig:
    """Durations in ns.  ``scp=None`` uses amplitude-scaled defaults."""

    t_min: float = 1.0
    t_max: float = 100.0
    t_step: float = 1.0
    n_starts: int = 20
    base_seed: int = 0
    model: SystemModel = field(default_factory=SystemModel)
    uncertainty: UncertaintySpec = field(default_factory=UncertaintySpec)
    scp: ScpConfig | None = None
    verify_grid: int = 21
    dt: float = DEFAULT_DT
    amp_max: float = DEFAULT_AMP_MAX
    init_fraction: float = DEFAULT_INIT_FRACTION

    def __post_init__(self):
        if self.n_starts < 1:
            raise ValueError("n_starts must be >= 1")
        if self.verify_grid < 2:
            raise ValueError("verify_grid must be >= 2")
        if not 0 < self.t_min <= self.t_max:
            raise ValueError("need 0 < t_min <= t_max")
        if self.t_step <= 0:
            raise ValueError("t_step must be positive")
        steps_of(self.t_step, self.dt)
        for t in self.durations():
            steps_of(t, self.dt)

    @property
    def scp_config(self) -> ScpConfig:
        return self.scp or ScpConfig.for_amplitude(self.amp_max)

    def durations(self) -> list[float]:
        n = int(math.floor((self.t_max - self.t_min) / self.t_step + 1e-9)) + 1
        return [self.t_min + i * self.t_step for i in range(n)]


def steps_of(duration: float, dt: float) -> int:
    """Number of dt steps in ``duration``; raises if it is not a whole multiple."""
    n = round(duration / dt)
    if n < 1 or abs(n * dt - duration) > 1e-9 * max(1.0, duration):
        raise SchemaError(f"duration {duration!r} ns is not a positive multiple of dt = {dt!r} ns")
    return n


def start_seed(base_seed: int, duration: float, start: int) -> int:
    """Seed for one start: ``base_seed`` XOR a stable hash of (duration, start)."""
    key = f"{round(duration * 1000)}:{start}".encode()
    h = int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
    return (base_seed ^ h) & (2**63 - 1)


@dataclass(frozen=True, eq=False)
class StartOutcome:
    start: int
    seed: int
    result: OptimizationResult | None
    error: str | None = None


@dataclass(frozen=True, eq=False)
class DurationRecord:
    duration: float
    best: float
    mean: float
    best_seed: int
    best_pulse: PulseSet
    seeds: list
    objectives: list
    verified_min: float
    verified_argmin: float
    robustness_gap: bool
    failures: list = field(default_factory=list)


@dataclass(frozen=True, eq=False)
class SweepResult:
    records: list


def run_start(config: SweepConfig, duration: float, start: int) -> StartOutcome:
    seed = start_seed(config.base_seed, duration, start)
    try:
        ensemble = sample_ensemble(config.model, config.uncertainty)
        pulse0 = random_pulse(steps_of(duration, config.dt), config.amp_max,
                              config.init_fraction, seed=seed, dt=config.dt)
        return StartOutcome(start, seed, scp_optimize(ensemble, pulse0, config.scp_config))
    except (StrongCouplingError, SolverError, np.linalg.LinAlgError) as exc:
        return StartOutcome(start, seed, None, f"{type(exc).__name__}: {exc}")


def _run_start_task(args):
    return run_start(*args)


def aggregate(config: SweepConfig, duration: float, outcomes: list[StartOutcome]) -> DurationRecord:
    outcomes = sorted(outcomes, key=lambda o: o.start)
    ok = [o for o in outcomes if o.result is not None]
    failures = [(o.start, o.error) for o in outcomes if o.result is None]
    for start, err in failures:
        log.warning("T=%g ns start %d failed: %s", duration, start, err)
    if not ok:
        raise SweepError(f"all {len(outcomes)} starts failed at T = {duration} ns")
    kind = config.scp_config.objective
    objectives = [o.result.objective(kind) for o in ok]
    best_i = int(np.argmax(objectives))
    best = ok[best_i]
    vmin, vj = verify_robustness(best.result.pulse, config.model, config.uncertainty.fraction,
                                 config.verify_grid)
    sampled = best.result.worst_case
    gap = sampled >= 0.99 and sampled - vmin > ROBUSTNESS_GAP
    if gap:
        log.warning("T=%g ns: dense-grid worst case %.6f is %.2e below the sampled %.6f",
                    duration, vmin, sampled - vmin, sampled)
    return DurationRecord(
        duration=duration,
        best=objectives[best_i],
        mean=float(np.mean(objectives)),
        best_seed=best.seed,
        best_pulse=best.result.pulse,
        seeds=[o.seed for o in ok],
        objectives=objectives,
        verified_min=vmin,
        verified_argmin=vj,
        robustness_gap=gap,
        failures=failures,
    )


def run_sweep(config: SweepConfig, executor: Executor | None = None, progress=None) -> SweepResult:
    """Optimize from ``n_starts`` seeded random pulses at every duration.

    ``progress(duration, start)`` is called as runs finish (in completion order
    when an executor is used).  Aggregation is always by index.
    """
    tasks = [(config, t, s) for t in config.durations() for s in range(config.n_starts)]
    outcomes = {}
    if executor is None:
        for task in tasks:
            outcomes[task[1:]] = run_start(*task)
            if progress:
                progress(*task[1:])
    else:
        futures = {executor.submit(_run_start_task, task): task[1:] for task in tasks}
        for fut in as_completed(futures):
            outcomes[futures[fut]] = fut.result()
            if progress:
                progress(*futures[fut])
    records = []
    for t in config.durations():
        records.append(aggregate(config, t, [outcomes[(t, s)] for s in range(config.n_starts)]))
    return SweepResult(records)


def fidelity_vs_parameter_curve(pulse: PulseSet, model: SystemModel, fraction: float,
                                grid_points: int, target: TargetGate | None = None):
    """``(J, F)`` rows over an even grid of couplings, ascending in J (rad/ns)."""
    if grid_points < 2:
        raise ValueError("grid_points must be >= 2")
    target = target or target_zx()
    rows = []
    for j in coupling_grid(model.coupling_j, fraction, grid_points):
        rows.append((float(j), pulse_fidelity(dress_at_coupling(model, j), pulse, target)))
    return rows


def verify_robustness(pulse: PulseSet, model: SystemModel, fraction: float, grid_points: int,
                      target: TargetGate | None = None) -> tuple[float, float]:
    """Minimum fidelity over a dense coupling grid and the coupling where it occurs."""
    rows = fidelity_vs_parameter_curve(pulse, model, fraction, grid_points, target)
    j, f = min(rows, key=lambda r: r[1])
    return f, j


def format_curve(rows, header_lines=()) -> str:
    out = list(header_lines) + ["j_mhz,fidelity"]
    out += [f"{j / MHZ!r},{f!r}" for j, f in rows]
    return "\n".join(out) + "\n"

"""Sequential convex programming for worst-case (max-min) pulse optimization.

Each iteration linearizes every ensemble member's fidelity around the current
pulse, solves the resulting LP inside an infinity-norm trust region and the
amplitude box, and keeps the trial only if the true objective strictly
improves.  Rejected trials shrink the trust region and retry from the same
pulse with the stored linearization.

The trust region is a box with one radius per amplitude.  In ``uniform`` mode
all radii move together (grow on acceptance, shrink on rejection).  In
``adaptive`` mode (the default) an accepted step grows the radius only where
the new linearization still pushes in the direction just taken and shrinks it
where the direction reversed; rejections shrink every radius.  Sign-type LP
steps with a single radius converge very slowly on badly scaled problems, and
the per-amplitude radii remove most of that penalty without changing the LP.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import SolverError
from .pulse import PulseSet, clip
from .simplex import bounded_simplex

log = logging.getLogger(__name__)

WORST_CASE = "worst_case"
AVERAGE = "average"
OBJECTIVES = (WORST_CASE, AVERAGE)
UNIFORM = "uniform"
ADAPTIVE = "adaptive"
TRUST_MODES = (UNIFORM, ADAPTIVE)

TARGET_REACHED = "target_reached"
RHO_COLLAPSED = "rho_collapsed"
MAX_ITERS = "max_iters"


@dataclass(frozen=True)
class ScpConfig:
    """Trust-region settings.  Radii are in rad/ns (per-amplitude bound on the increment)."""

    rho0: float
    rho_grow: float = 1.2
    rho_shrink: float = 0.5
    rho_min: float = 1e-6
    max_iters: int = 3000
    target_fidelity: float = 0.9999
    objective: str = WORST_CASE
    trust_region: str = ADAPTIVE

    def __post_init__(self):
        if not 0 < self.rho_min < self.rho0:
            raise ValueError("need 0 < rho_min < rho0")
        if not 0 < self.rho_shrink < 1 < self.rho_grow:
            raise ValueError("need 0 < rho_shrink < 1 < rho_grow")
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.trust_region not in TRUST_MODES:
            raise ValueError(f"trust_region must be one of {TRUST_MODES}")
        if self.max_iters < 0:
            raise ValueError("max_iters must be non-negative")

    @classmethod
    def for_amplitude(cls, amp_max: float, **overrides) -> "ScpConfig":
        """Defaults scaled to the amplitude bound: rho0 = 5%, rho_min = 1e-6 of amp_max."""
        kw = dict(rho0=0.05 * amp_max, rho_min=1e-6 * amp_max)
        kw.update(overrides)
        return cls(**kw)


@dataclass(frozen=True)
class TraceEntry:
    iteration: int
    worst_case: float
    average: float
    rho: float
    accepted: bool


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    pulse: PulseSet
    fidelities: np.ndarray
    worst_case: float
    average: float
    trace: list = field(default_factory=list)
    termination: str = MAX_ITERS

    def objective(self, kind: str = WORST_CASE) -> float:
        return self.worst_case if kind == WORST_CASE else self.average


def _box(current, rho, amp_max):
    hi = np.clip(np.minimum(rho, amp_max - current), 0.0, None)
    lo = np.clip(np.maximum(-rho, -amp_max - current), None, 0.0)
    return lo, hi


def _bang_bang(direction, lo, hi):
    return np.where(direction > 0, hi, np.where(direction < 0, lo, 0.0))


def _solve(fidelities, gradients, current, rho, amp_max, objective, tol):
    """Increment and the sample weights certifying it (LP duals)."""
    fid = np.asarray(fidelities, float).ravel()
    grads = np.atleast_2d(np.asarray(gradients, float))
    current = np.asarray(current, float).ravel()
    n, dim = grads.shape
    if grads.shape != (len(fid), len(current)):
        raise ValueError(f"gradients of shape {grads.shape} do not match ({len(fid)}, {len(current)})")
    if not np.all(np.asarray(rho) > 0):
        raise ValueError("rho must be positive")
    if objective not in OBJECTIVES:
        raise ValueError(f"unknown objective {objective!r}")
    lo, hi = _box(current, rho, amp_max)
    if objective == AVERAGE or n == 1:
        return _bang_bang(grads.mean(axis=0), lo, hi), np.full(n, 1.0 / n)

    # Warm start at the best of a few box vertices.  Any feasible point's value
    # lower-bounds the optimum, so t = t0 + tau with tau >= 0 loses nothing.
    starts = [np.zeros_like(current), _bang_bang(grads.mean(axis=0), lo, hi)]
    starts += [_bang_bang(g, lo, hi) for g in grads]
    values = [np.min(fid + grads @ s) for s in starts]
    best = int(np.argmax(values))
    x0, t0 = starts[best], values[best]

    a = np.hstack([np.ones((n, 1)), -grads, grads])
    c = np.zeros(1 + 2 * dim)
    c[0] = 1.0
    upper = np.concatenate([[np.inf], hi, -lo])
    at_upper = np.concatenate([[False], (x0 > 0) & (x0 == hi), (x0 < 0) & (x0 == lo)])
    try:
        z, _, weights = bounded_simplex(c, a, fid - t0, upper, start_at_upper=at_upper,
                                        tol=tol, duals=True)
    except SolverError as exc:
        raise SolverError(
            f"{exc}\n  subproblem: n={n} D={dim} max rho={np.max(rho)!r} "
            f"F={fid.tolist()} t0={t0!r}"
        ) from exc
    step = np.clip(z[1 : 1 + dim] - z[1 + dim :], lo, hi)
    return step, np.clip(weights, 0.0, None)


def solve_subproblem(fidelities, gradients, current, rho, amp_max, objective=WORST_CASE, tol=1e-9):
    """Increment maximizing the linearized objective inside the trust box.

    ``gradients`` has shape (n, D), ``current`` shape (D,), and ``rho`` is a
    scalar or per-coordinate radius.  Worst-case mode solves
    ``max t  s.t.  t <= F_i + g_i.e,  |e_d| <= rho_d,  |current_d + e_d| <= amp_max``.
    The average objective and the single-sample worst case separate per
    coordinate and are solved in closed form.
    """
    return _solve(fidelities, gradients, current, rho, amp_max, objective, tol)[0]


def linearized_value(fidelities, gradients, increment, objective=WORST_CASE) -> float:
    vals = np.asarray(fidelities) + np.atleast_2d(gradients) @ increment
    return float(vals.min() if objective == WORST_CASE else vals.mean())


def _objective(ev, kind: str) -> float:
    return ev.worst_case if kind == WORST_CASE else ev.average


def scp_optimize(ensemble, pulse0: PulseSet, config: ScpConfig) -> OptimizationResult:
    """Run SCP from ``pulse0``.

    ``ensemble`` is anything with ``evaluate(pulse)`` returning an object with
    ``fidelities``, ``gradients`` (n, 4, n_steps), ``worst_case`` and ``average``.
    """
    if not pulse0.within_bounds():
        raise ValueError("initial pulse violates the amplitude bound")
    kind = config.objective
    adaptive = config.trust_region == ADAPTIVE
    pulse = pulse0
    current = ensemble.evaluate(pulse)
    radii = np.full(pulse.amplitudes.size, float(config.rho0))
    rho_cap = 100.0 * config.rho0
    trace = [TraceEntry(0, current.worst_case, current.average, config.rho0, True)]
    termination = MAX_ITERS
    shape = pulse.amplitudes.shape

    def done():
        if _objective(current, kind) >= config.target_fidelity:
            return TARGET_REACHED
        if radii.max() < config.rho_min:
            return RHO_COLLAPSED
        return None

    for it in range(1, config.max_iters + 1):
        status = done()
        if status:
            termination = status
            break
        n = len(current.fidelities)
        grads = current.gradients.reshape(n, -1)
        step, weights = _solve(current.fidelities, grads, pulse.amplitudes.ravel(), radii,
                               pulse.amp_max, kind, 1e-9)
        trial_pulse = clip(pulse.with_amplitudes(pulse.amplitudes + step.reshape(shape)))
        trial = ensemble.evaluate(trial_pulse)
        accepted = _objective(trial, kind) > _objective(current, kind)
        trace.append(TraceEntry(it, trial.worst_case, trial.average, float(radii.max()), accepted))
        if not accepted:
            radii *= config.rho_shrink
            continue
        if adaptive:
            push = weights @ trial.gradients.reshape(n, -1)
            agree = np.sign(push) * np.sign(step)
            radii = np.where(agree > 0, radii * config.rho_grow, radii)
            radii = np.where(agree < 0, np.maximum(radii * config.rho_shrink, config.rho_min), radii)
            radii = np.minimum(radii, rho_cap)
        else:
            radii = np.minimum(radii * config.rho_grow, rho_cap)
        pulse, current = trial_pulse, trial
    else:
        termination = done() or MAX_ITERS

    log.debug("scp finished: %s after %d trials, objective %.8f", termination, len(trace) - 1,
              _objective(current, kind))
    return OptimizationResult(
        pulse=pulse,
        fidelities=current.fidelities,
        worst_case=current.worst_case,
        average=current.average,
        trace=trace,
        termination=termination,
    )


def grape_average_step(ensemble, pulse: PulseSet, alpha: float) -> PulseSet:
    """One fixed-size gradient-ascent step on the ensemble-mean fidelity, clipped to bounds."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    ev = ensemble.evaluate(pulse)
    return clip(pulse.with_amplitudes(pulse.amplitudes + alpha * ev.gradients.mean(axis=0)))

"""Piecewise-constant four-channel controls and their CSV format.

File layout::

    dt_ns=0.5,amp_max_radns=1.8849555921538759[,key=value...]
    0,c1,c2,c3,c4
    1,...

Amplitudes are in rad/ns and written with 17 significant digits, which
round-trips IEEE doubles exactly.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import PulseFormatError, SchemaError
from .model import MHZ

N_CHANNELS = 4
DEFAULT_DT = 0.5
DEFAULT_AMP_MAX = 300.0 * MHZ
DEFAULT_INIT_FRACTION = 0.1


@dataclass(frozen=True, eq=False)
class PulseSet:
    dt: float
    amplitudes: np.ndarray
    amp_max: float

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=float)
        if amps.ndim != 2 or amps.shape[0] != N_CHANNELS:
            raise SchemaError(f"amplitudes must have shape (4, n_steps), got {amps.shape}")
        if amps.shape[1] < 1:
            raise SchemaError("a pulse needs at least one step")
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_steps(self) -> int:
        return self.amplitudes.shape[1]

    @property
    def duration(self) -> float:
        return self.dt * self.n_steps

    def within_bounds(self) -> bool:
        return bool(np.all(np.abs(self.amplitudes) <= self.amp_max))

    def with_amplitudes(self, amplitudes) -> "PulseSet":
        return PulseSet(self.dt, amplitudes, self.amp_max)

    def __eq__(self, other):
        if not isinstance(other, PulseSet):
            return NotImplemented
        return (
            self.dt == other.dt
            and self.amp_max == other.amp_max
            and np.array_equal(self.amplitudes, other.amplitudes)
        )


def zero_pulse(n_steps: int, dt: float = DEFAULT_DT, amp_max: float = DEFAULT_AMP_MAX) -> PulseSet:
    return PulseSet(dt, np.zeros((N_CHANNELS, n_steps)), amp_max)


def random_pulse(
    n_steps: int,
    amp_max: float = DEFAULT_AMP_MAX,
    init_fraction: float = DEFAULT_INIT_FRACTION,
    seed: int = 0,
    dt: float = DEFAULT_DT,
) -> PulseSet:
    """Uniform i.i.d. amplitudes on [-init_fraction*amp_max, init_fraction*amp_max]."""
    if not 0 < init_fraction <= 1:
        raise ValueError(f"init_fraction must be in (0, 1], got {init_fraction}")
    rng = np.random.default_rng(seed)
    bound = init_fraction * amp_max
    return PulseSet(dt, rng.uniform(-bound, bound, size=(N_CHANNELS, n_steps)), amp_max)


def clip(pulse: PulseSet) -> PulseSet:
    return pulse.with_amplitudes(np.clip(pulse.amplitudes, -pulse.amp_max, pulse.amp_max))


def format_pulse(pulse: PulseSet, extra: dict[str, str] | None = None) -> str:
    head = [f"dt_ns={pulse.dt!r}", f"amp_max_radns={pulse.amp_max!r}"]
    head += [f"{k}={v}" for k, v in (extra or {}).items()]
    lines = [",".join(head)]
    for k in range(pulse.n_steps):
        lines.append(",".join([str(k)] + ["%.17g" % a for a in pulse.amplitudes[:, k]]))
    return "\n".join(lines) + "\n"


def write_pulse(pulse: PulseSet, path, extra: dict[str, str] | None = None) -> None:
    Path(path).write_text(format_pulse(pulse, extra))


def parse_pulse(text: str) -> PulseSet:
    lines = text.splitlines()
    if not lines:
        raise PulseFormatError("empty pulse file", line=1)
    header = {}
    for field in lines[0].split(","):
        key, sep, value = field.partition("=")
        if not sep:
            raise PulseFormatError(f"bad header field {field!r}", line=1)
        header[key.strip()] = value.strip()
    try:
        dt = float(header["dt_ns"])
        amp_max = float(header["amp_max_radns"])
    except KeyError as exc:
        raise PulseFormatError(f"header is missing {exc.args[0]}", line=1) from None
    except ValueError as exc:
        raise PulseFormatError(str(exc), line=1) from None

    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        cells = line.split(",")
        if len(cells) != N_CHANNELS + 1:
            if len(cells) > 1 and lineno == len(lines) and not text.endswith("\n"):
                raise PulseFormatError("truncated row", line=lineno)
            raise SchemaError(
                f"line {lineno}: expected {N_CHANNELS} channels, found {len(cells) - 1}"
            )
        try:
            k = int(cells[0])
            values = [float(c) for c in cells[1:]]
        except ValueError as exc:
            raise PulseFormatError(str(exc), line=lineno) from None
        if k != len(rows):
            raise PulseFormatError(f"step index {k}, expected {len(rows)}", line=lineno)
        rows.append(values)
    if not rows:
        raise PulseFormatError("no amplitude rows", line=len(lines) + 1)
    return PulseSet(dt, np.array(rows).T, amp_max)


def read_pulse(path) -> PulseSet:
    return parse_pulse(Path(path).read_text())

"""INI run configuration with explicit units in every key name.

Example::

    [model]
    omega1_ghz = 5.114
    omega2_ghz = 4.914
    delta1_mhz = -330
    delta2_mhz = -330
    j_mhz = 3.8
    levels = 3

    [pulse]
    dt_ns = 0.5
    amp_max_mhz = 300

    [uncertainty]
    fraction = 0.1
    n_samples = 3

Frequencies are ordinary (not angular) and converted to rad/ns on load.
Unknown sections or keys are rejected.
"""
from __future__ import annotations

import configparser
import hashlib
import json
import logging
import os
from dataclasses import dataclass, field
from pathlib import Path

from .errors import ConfigError
from .model import GHZ, MHZ, SystemModel
from .pulse import DEFAULT_AMP_MAX, DEFAULT_DT, DEFAULT_INIT_FRACTION
from .robust import UncertaintySpec
from .scp import ScpConfig
from .search import SweepConfig

log = logging.getLogger(__name__)

OUTPUT_ENV = "ROBUST_CR_OUTPUT_DIR"
STANDARD_DT = (0.5, 1.0, 2.0)

# section -> key -> (type, default)
SCHEMA = {
    "model": {
        "omega1_ghz": (float, 5.114),
        "omega2_ghz": (float, 4.914),
        "delta1_mhz": (float, -330.0),
        "delta2_mhz": (float, -330.0),
        "j_mhz": (float, 3.8),
        "drive_ghz": (float, None),
        "alpha1": (float, 0.0),
        "alpha2": (float, 0.0),
        "levels": (int, 3),
    },
    "pulse": {
        "dt_ns": (float, DEFAULT_DT),
        "amp_max_mhz": (float, DEFAULT_AMP_MAX / MHZ),
        "init_fraction": (float, DEFAULT_INIT_FRACTION),
    },
    "uncertainty": {
        "parameter": (str, "coupling_j"),
        "fraction": (float, 0.0),
        "n_samples": (int, None),
    },
    "scp": {
        "rho0_mhz": (float, None),
        "rho_grow": (float, 1.2),
        "rho_shrink": (float, 0.5),
        "rho_min_mhz": (float, None),
        "max_iters": (int, 3000),
        "target_fidelity": (float, 0.9999),
        "objective": (str, "worst_case"),
        "trust_region": (str, "adaptive"),
    },
    "sweep": {
        "t_min_ns": (float, 1.0),
        "t_max_ns": (float, 100.0),
        "t_step_ns": (float, 1.0),
        "n_starts": (int, 20),
        "base_seed": (int, 0),
        "verify_grid": (int, 21),
        "workers": (int, 1),
    },
    "output": {
        "dir": (str, "results"),
    },
}


@dataclass(frozen=True)
class RunConfig:
    values: dict = field(default_factory=dict)

    def get(self, section: str, key: str):
        return self.values[section][key]

    @property
    def model(self) -> SystemModel:
        m = self.values["model"]
        drive = m["drive_ghz"]
        return SystemModel(
            omega1=m["omega1_ghz"] * GHZ,
            omega2=m["omega2_ghz"] * GHZ,
            delta1=m["delta1_mhz"] * MHZ,
            delta2=m["delta2_mhz"] * MHZ,
            coupling_j=m["j_mhz"] * MHZ,
            drive_freq=None if drive is None else drive * GHZ,
            alpha1=m["alpha1"],
            alpha2=m["alpha2"],
            levels=m["levels"],
        )

    @property
    def dt(self) -> float:
        return self.values["pulse"]["dt_ns"]

    @property
    def amp_max(self) -> float:
        return self.values["pulse"]["amp_max_mhz"] * MHZ

    @property
    def uncertainty(self) -> UncertaintySpec:
        u = self.values["uncertainty"]
        return UncertaintySpec(u["fraction"], u["n_samples"], u["parameter"])

    @property
    def scp(self) -> ScpConfig:
        s = self.values["scp"]
        return ScpConfig(
            rho0=s["rho0_mhz"] * MHZ,
            rho_grow=s["rho_grow"],
            rho_shrink=s["rho_shrink"],
            rho_min=s["rho_min_mhz"] * MHZ,
            max_iters=s["max_iters"],
            target_fidelity=s["target_fidelity"],
            objective=s["objective"],
            trust_region=s["trust_region"],
        )

    @property
    def sweep(self) -> SweepConfig:
        s = self.values["sweep"]
        return SweepConfig(
            t_min=s["t_min_ns"],
            t_max=s["t_max_ns"],
            t_step=s["t_step_ns"],
            n_starts=s["n_starts"],
            base_seed=s["base_seed"],
            model=self.model,
            uncertainty=self.uncertainty,
            scp=self.scp,
            verify_grid=s["verify_grid"],
            dt=self.dt,
            amp_max=self.amp_max,
            init_fraction=self.values["pulse"]["init_fraction"],
        )

    @property
    def output_dir(self) -> Path:
        return Path(os.environ.get(OUTPUT_ENV) or self.values["output"]["dir"])

    def canonical(self) -> str:
        """Sorted-key JSON of every resolved setting except the output location."""
        body = {k: v for k, v in self.values.items() if k != "output"}
        return json.dumps(body, sort_keys=True, separators=(",", ":"))

    @property
    def hash(self) -> str:
        return hashlib.sha256(self.canonical().encode()).hexdigest()[:16]


def _convert(section, key, kind, raw):
    try:
        if kind is int:
            return int(raw)
        if kind is float:
            return float(raw)
        return raw.strip().strip('"')
    except ValueError:
        raise ConfigError(f"{section}.{key}: cannot parse {raw!r} as {kind.__name__}") from None


def _resolve(values: dict) -> dict:
    u = values["uncertainty"]
    if u["n_samples"] is None:
        u["n_samples"] = 1 if u["fraction"] == 0 else 3
    s = values["scp"]
    amp_mhz = values["pulse"]["amp_max_mhz"]
    if s["rho0_mhz"] is None:
        s["rho0_mhz"] = 0.05 * amp_mhz
    if s["rho_min_mhz"] is None:
        s["rho_min_mhz"] = 1e-6 * amp_mhz
    return values


def _validate(cfg: RunConfig) -> None:
    m = cfg.values["model"]
    for key in ("omega1_ghz", "omega2_ghz", "drive_ghz"):
        if m[key] is not None and not m[key] > 0:
            raise ConfigError(f"model.{key}: frequencies must be positive, got {m[key]}")
    if not cfg.values["pulse"]["amp_max_mhz"] > 0:
        raise ConfigError("pulse.amp_max_mhz must be positive")
    if not cfg.dt > 0:
        raise ConfigError(f"pulse.dt_ns must be positive, got {cfg.dt}")
    if cfg.dt not in STANDARD_DT:
        log.warning("pulse.dt_ns = %g is not one of the usual AWG resolutions %s", cfg.dt, STANDARD_DT)
    checks = {
        "model": lambda: cfg.model,
        "uncertainty": lambda: cfg.uncertainty,
        "scp": lambda: cfg.scp,
        "sweep": lambda: cfg.sweep,
    }
    for section, build in checks.items():
        try:
            build()
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"{section}: {exc}") from None


def parse_config(text: str = "") -> RunConfig:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=(";", "#"))
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config: {exc}") from None
    values = {sec: {k: d for k, (_, d) in keys.items()} for sec, keys in SCHEMA.items()}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"{section}.{key}: unknown key")
            values[section][key] = _convert(section, key, SCHEMA[section][key][0], raw)
    cfg = RunConfig(_resolve(values))
    _validate(cfg)
    return cfg


def load_config(path=None) -> RunConfig:
    if path is None:
        return parse_config("")
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)

"""Command-line entry point.

    robust-cr [--config FILE] dress-info
    robust-cr [--config FILE] optimize --t 60 --seed 1
    robust-cr [--config FILE] sweep
    robust-cr [--config FILE] leakage --pulse best_T60ns.csv

Exit codes: 0 success (optimize: target reached), 1 usage or config error,
2 optimization finished without reaching the target fidelity.
"""
from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .config import load_config
from .errors import (ConfigError, DegenerateQubitsError, DimensionError, PulseFormatError,
                     SchemaError, StrongCouplingError, SweepError)
from .model import GHZ, MHZ, dress, dressed_frequencies, effective_zx_coefficient
from .propagate import leakage_profile
from .pulse import read_pulse, random_pulse, write_pulse
from .robust import sample_ensemble
from .scp import TARGET_REACHED, scp_optimize
from .search import fidelity_vs_parameter_curve, format_curve, run_sweep, start_seed, steps_of

log = logging.getLogger("robust_cr")

EXIT_OK, EXIT_USAGE, EXIT_NOT_CONVERGED = 0, 1, 2
# ±range used for the robustness curve when the run itself has no uncertainty
DEFAULT_CURVE_FRACTION = 0.10


def _hash_line(cfg) -> str:
    return f"# config_hash={cfg.hash}"


def _write(path: Path, text: str) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path


def format_trace(trace, header) -> str:
    lines = [header, "iter,worst_case,average,rho,accepted"]
    lines += [f"{e.iteration},{e.worst_case!r},{e.average!r},{e.rho!r},{int(e.accepted)}" for e in trace]
    return "\n".join(lines) + "\n"


def format_leakage(values, dt, header) -> str:
    lines = [header, "k,t_ns,leakage"]
    lines += [f"{k},{(k + 1) * dt!r},{float(v)!r}" for k, v in enumerate(values)]
    return "\n".join(lines) + "\n"


def format_sweep(result, header) -> str:
    lines = [header, "T_ns,best_worst_case_F,mean_worst_case_F,best_seed,verified_worst_case_F,robustness_gap"]
    for r in result.records:
        lines.append(f"{r.duration!r},{r.best!r},{r.mean!r},{r.best_seed},{r.verified_min!r},{int(r.robustness_gap)}")
    return "\n".join(lines) + "\n"


def cmd_dress_info(cfg, args, out=None) -> int:
    out = out or sys.stdout
    model = cfg.model
    system = dress(model)
    w1p, w2p = dressed_frequencies(model)
    frame = model.frame_frequency
    levels = model.levels
    exact1 = system.energies[levels] - system.energies[0] + frame
    exact2 = system.energies[1] - system.energies[0] + frame
    print(f"config_hash            {cfg.hash}", file=out)
    print(f"drive frame            {frame / GHZ:.9f} GHz", file=out)
    print(f"omega1' perturbative   {w1p / GHZ:.9f} GHz", file=out)
    print(f"omega1' exact          {exact1 / GHZ:.9f} GHz", file=out)
    print(f"omega2' perturbative   {w2p / GHZ:.9f} GHz", file=out)
    print(f"omega2' exact          {exact2 / GHZ:.9f} GHz", file=out)
    shift = model.coupling_j**2 / model.qubit_detuning
    print(f"J^2/Delta12            {shift / MHZ:.6f} MHz", file=out)
    print(f"ZX coefficient J/D12   {effective_zx_coefficient(model):.6f}", file=out)
    print(f"weak-coupling warning  {'yes' if model.weak_coupling_warning else 'no'}", file=out)
    return EXIT_OK


def cmd_optimize(cfg, args, out=None) -> int:
    out = out or sys.stdout
    n_steps = steps_of(args.t, cfg.dt)
    model = cfg.model
    ensemble = sample_ensemble(model, cfg.uncertainty)
    seed = args.seed
    pulse0 = random_pulse(n_steps, cfg.amp_max, cfg.get("pulse", "init_fraction"), seed=seed, dt=cfg.dt)
    result = scp_optimize(ensemble, pulse0, cfg.scp)

    header = _hash_line(cfg)
    stem = f"T{args.t:g}ns_seed{seed}"
    base = cfg.output_dir / f"optimize-{cfg.hash}"
    base.mkdir(parents=True, exist_ok=True)
    write_pulse(result.pulse, base / f"{stem}_pulse.csv", extra={"config_hash": cfg.hash})
    _write(base / f"{stem}_trace.csv", format_trace(result.trace, header))
    leak = leakage_profile(ensemble.nominal, result.pulse)
    _write(base / f"{stem}_leakage.csv", format_leakage(leak, cfg.dt, header))
    fraction = cfg.uncertainty.fraction or DEFAULT_CURVE_FRACTION
    rows = fidelity_vs_parameter_curve(result.pulse, model, fraction, cfg.get("sweep", "verify_grid"))
    _write(base / f"{stem}_robustness.csv", format_curve(rows, [header]))

    print(f"termination={result.termination} worst_case={result.worst_case:.10f} "
          f"average={result.average:.10f} iterations={len(result.trace) - 1}", file=out)
    print(f"outputs in {base}", file=out)
    return EXIT_OK if result.termination == TARGET_REACHED else EXIT_NOT_CONVERGED


def cmd_sweep(cfg, args, out=None) -> int:
    out = out or sys.stdout
    sweep = cfg.sweep
    workers = cfg.get("sweep", "workers")

    def progress(t, s):
        log.info("finished T=%g ns start %d", t, s)

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            result = run_sweep(sweep, executor=pool, progress=progress)
    else:
        result = run_sweep(sweep, progress=progress)
    base = cfg.output_dir / f"sweep-{cfg.hash}"
    header = _hash_line(cfg)
    _write(base / "sweep.csv", format_sweep(result, header))
    for r in result.records:
        write_pulse(r.best_pulse, base / f"best_T{r.duration:g}ns.csv", extra={"config_hash": cfg.hash})
    print(f"{len(result.records)} durations written to {base}", file=out)
    return EXIT_OK


def cmd_leakage(cfg, args, out=None) -> int:
    out = out or sys.stdout
    pulse = read_pulse(args.pulse)
    if abs(pulse.dt - cfg.dt) > 1e-12:
        log.warning("pulse dt %g ns differs from config dt %g ns; using the pulse's", pulse.dt, cfg.dt)
    values = leakage_profile(dress(cfg.model), pulse)
    path = cfg.output_dir / f"leakage-{cfg.hash}" / f"{Path(args.pulse).stem}_leakage.csv"
    _write(path, format_leakage(values, pulse.dt, _hash_line(cfg)))
    print(f"max leakage {np.max(values):.6e}; written to {path}", file=out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="robust-cr", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="INI configuration file")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("dress-info", help="dressed frequencies and ZX coefficient")
    p = sub.add_parser("optimize", help="optimize one pulse")
    p.add_argument("--t", type=float, required=True, help="gate duration in ns")
    p.add_argument("--seed", type=int, default=0)
    sub.add_parser("sweep", help="multi-start sweep over durations")
    p = sub.add_parser("leakage", help="leakage profile of a pulse file")
    p.add_argument("--pulse", required=True)
    return parser


COMMANDS = {
    "dress-info": cmd_dress_info,
    "optimize": cmd_optimize,
    "sweep": cmd_sweep,
    "leakage": cmd_leakage,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except (ConfigError, SchemaError, PulseFormatError, DimensionError, DegenerateQubitsError,
            StrongCouplingError, SweepError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

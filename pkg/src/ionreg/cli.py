"""Command-line runner: reproducible experiments from JSON configuration files.

    ionreg <subcommand> --config <path> [--out <dir>] [--seed <u64>]
                        [--shots <n> | --exact]

Subcommands mirror the experiment kinds (rabi, crosstalk, parity-scan,
cycle-bench, zeeman-sweep, transpile) plus ``validate``, which checks a
configuration without running anything.  Each run writes a manifest
(resolved configuration, seed, generator algorithm), a flat CSV of the
measured points, and an analysis JSON; transpile writes the lowered
program instead of a CSV.  Identical configuration and seed give
byte-identical output files.  Exit codes: 0 success, 2 configuration
error, 3 runtime error.  The environment variable ``IONREG_LOG`` sets
log verbosity (debug, info, warning, error).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import CircuitParseError, parse_circuit
from .cycle_bench import CBConfig, outcomes_to_json, run_cycle_benchmark
from .experiments import (
    calibrate_phase_offset,
    find_shift_scale,
    local_maxima,
    rabi_flop_experiment,
    run_crosstalk_experiment,
    zeeman_sweep,
)
from .fitting import NoCrossingError, SingularFitError, fit_crosstalk_decay, fit_sine
from .noise import RNG_ALGORITHM
from .runconfig import ConfigError, RunConfig, load_config
from .transpile import lower, minimize_transports

_LOG = logging.getLogger("ionreg")

_RUN_COMMANDS = ("rabi", "crosstalk", "parity-scan", "cycle-bench", "zeeman-sweep", "transpile")


def _setup_logging():
    levels = {
        "debug": logging.DEBUG,
        "info": logging.INFO,
        "warning": logging.WARNING,
        "error": logging.ERROR,
    }
    name = os.environ.get("IONREG_LOG", "warning").strip().lower()
    logging.basicConfig(
        level=levels.get(name, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ionreg",
        description="Simulate and analyze two-ion register experiments from a JSON config.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUN_COMMANDS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--out", default=None, help="output directory (default: config out_dir or '.')")
        p.add_argument("--seed", type=int, default=None, help="override the master seed")
        g = p.add_mutually_exclusive_group()
        g.add_argument("--shots", type=int, default=None, help="override the shot count")
        g.add_argument("--exact", action="store_true", help="force exact (infinite-shot) mode")
    v = sub.add_parser("validate", help="check a configuration file without running")
    v.add_argument("--config", required=True, help="path to the JSON run configuration")
    return parser


# --------------------------------------------------------------------------- #
# output helpers


def _fmt_cell(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.12g}"


def _write_csv(path: Path, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt_cell(v) for v in row])


def _write_json(path: Path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2)
        fh.write("\n")


def _params_json(params) -> dict:
    out = {}
    for f in dataclasses.fields(params):
        v = getattr(params, f.name)
        if hasattr(v, "to_json_dict"):
            v = v.to_json_dict()
        elif isinstance(v, tuple):
            v = list(v)
        out[f.name] = v
    return out


def _binomial_sigma(fraction: np.ndarray, shots: int) -> np.ndarray:
    smoothed = (fraction * shots + 1.0) / (shots + 2.0)
    return np.sqrt(smoothed * (1.0 - smoothed) / shots)


def _sine_fit_json(params: dict, fit) -> dict:
    sig = fit.sigmas
    return {
        "offset": params["offset"],
        "amplitude": params["amplitude"],
        "omega_rad_per_s": params["omega"],
        "phase_rad": params["phase"],
        "sigma_offset": float(sig[0]),
        "sigma_amplitude": float(sig[1]),
        "sigma_omega_rad_per_s": float(sig[2]),
        "sigma_phase_rad": float(sig[3]),
        "chi2": fit.chi2,
        "reduced_chi2": fit.reduced_chi2,
        "converged": fit.converged,
        "iterations": fit.iterations,
        "notes": list(fit.notes),
    }


# --------------------------------------------------------------------------- #
# per-experiment runners; each returns (csv header, rows, analysis, extra files)


def _run_rabi(config: RunConfig, seed: int, shots: int):
    p = config.params
    noise = replace(config.noise, seed=seed)
    t_grid = np.linspace(0.0, p.t_max, p.points)
    data = rabi_flop_experiment(t_grid, p.omega, noise, shots=shots, ion=p.ion, seed=seed)
    rows = [
        (t, f2, f1, f0)
        for t, f2, f1, f0 in zip(data.t, data.p2bright, data.p1bright, data.p0bright)
    ]
    sigma = _binomial_sigma(data.p2bright, shots) if shots > 0 else None
    analysis: dict = {
        "ion": p.ion,
        "omega_true_rad_per_s": p.omega,
        "p1bright_peak_indices": [int(i) for i in local_maxima(data.p1bright)],
        "p0bright_peak_indices": [int(i) for i in local_maxima(data.p0bright)],
    }
    try:
        fit_params, fit = fit_sine(data.t, data.p2bright, sigma=sigma)
        analysis["sine_fit"] = _sine_fit_json(fit_params, fit)
    except SingularFitError as exc:
        analysis["sine_fit"] = {"error": str(exc)}
    return ("t_s", "p2bright", "p1bright", "p0bright"), rows, analysis, {}


def _run_crosstalk(config: RunConfig, seed: int, shots: int):
    p = config.params
    noise = replace(config.noise, seed=seed)
    data = run_crosstalk_experiment(
        p.n_list,
        noise,
        shots=shots,
        experiment=p.variant,
        sequences_per_point=p.sequences_per_point,
        ion=p.ion,
        seed=seed,
    )
    rows = list(zip(data.n, data.fidelity, data.sigma))
    analysis: dict = {
        "variant": p.variant,
        "sequences_per_point": p.sequences_per_point,
        "ion": p.ion,
    }
    sigma = data.sigma if shots > 0 else None
    try:
        fit_params, fit = fit_crosstalk_decay(data.n, data.fidelity, sigma=sigma)
        sig = fit.sigmas
        analysis["decay_fit"] = {
            "p0": fit_params["p0"],
            "C": fit_params["C"],
            "sigma_p0": float(sig[0]),
            "sigma_C": float(sig[1]),
            "chi2": fit.chi2,
            "reduced_chi2": fit.reduced_chi2,
            "converged": fit.converged,
            "iterations": fit.iterations,
            "notes": list(fit.notes),
        }
    except SingularFitError as exc:
        analysis["decay_fit"] = {"error": str(exc)}
    return ("N", "F", "sigma"), rows, analysis, {}


def _run_parity_scan(config: RunConfig, seed: int, shots: int):
    p = config.params
    noise = replace(config.noise, seed=seed)
    grid = np.linspace(p.phi_min, p.phi_max, p.points)
    cal = calibrate_phase_offset(grid, noise, shots=shots, seed=seed)
    sig = cal.parity_sigma if cal.parity_sigma is not None else np.zeros(grid.size)
    rows = list(zip(cal.phi_dds, cal.parity, sig))
    analysis = {
        "phi_offset_rad": cal.phi_offset,
        "sigma_rad": cal.sigma,
        "crossing_rad": -cal.phi_offset,
        "phi_offset_true_rad": config.noise.phi_offset,
    }
    return ("phi_dds_rad", "parity", "sigma"), rows, analysis, {}


def _run_cycle_bench(config: RunConfig, seed: int, shots: int):
    p = config.params
    noise = replace(config.noise, seed=seed)
    cb = CBConfig(m1=p.m1, m2=p.m2, dressings_per_basis=p.dressings_per_basis, seed=seed)
    run = run_cycle_benchmark(
        cb,
        noise,
        mode="exact" if shots == 0 else "sampled",
        shots=shots,
        seed=seed,
        bootstrap_resamples=p.bootstrap_resamples,
    )
    rows = []
    for basis in cb.bases:
        for m in (cb.m1, cb.m2):
            for l in range(1, cb.dressings_per_basis + 1):
                rows.append((basis[0], basis[1], m, l, run.f_values[(basis, m, l)]))
    return ("P1", "P2", "m", "l", "f"), rows, outcomes_to_json(run), {}


def _run_zeeman_sweep(config: RunConfig, seed: int, shots: int):
    p = config.params
    if shots > 0:
        raise ValueError("the sweep runs in exact mode; use --exact or shots = 0")
    noise = replace(config.noise, seed=seed)
    cb = CBConfig(dressings_per_basis=p.dressings_per_basis, seed=seed)
    model = p.model
    analysis: dict = {"contour_level": p.contour_level, "scale": model.scale}
    if p.auto_scale_target is not None:
        scale, f_at = find_shift_scale(
            model, cb, noise,
            target=p.auto_scale_target,
            lo=0.0, hi=p.auto_scale_hi,
        )
        model = model.scaled(scale)
        analysis["auto_scale"] = {
            "target": p.auto_scale_target,
            "scale": scale,
            "fidelity_at_origin": f_at,
        }
        analysis["scale"] = scale
    xs = np.linspace(p.dx_min, p.dx_max, p.dx_points)
    ys = np.linspace(p.dy_min, p.dy_max, p.dy_points)
    sweep = zeeman_sweep(xs, ys, model, cb, noise, contour_level=p.contour_level)
    rows = []
    for i, dx in enumerate(sweep.dx):
        for j, dy in enumerate(sweep.dy):
            rows.append((dx, dy, sweep.fidelity[i, j]))
    analysis.update({
        "contour_closed": sweep.contour_closed,
        "contour_points_um": [[float(a), float(b)] for a, b in sweep.contour],
        "point_errors": {f"{i},{j}": msg for (i, j), msg in sorted(sweep.errors.items())},
        "fidelity_min": float(np.nanmin(sweep.fidelity)),
        "fidelity_max": float(np.nanmax(sweep.fidelity)),
    })
    return ("dx_um", "dy_um", "F"), rows, analysis, {}


def _run_transpile(config: RunConfig, seed: int, shots: int):
    p = config.params
    path = Path(p.circuit_file)
    if not path.is_absolute():
        path = Path(config.raw.get("__config_dir__", ".")) / path
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"transpile.circuit_file: cannot read {path} ({exc.strerror or exc})"]) from exc
    circuit = parse_circuit(text)
    program = lower(circuit, phi_offset=config.noise.phi_offset)
    before = program.transport_count()
    duration_before = program.duration()
    minimized = minimize_transports(program) if p.minimize else program
    analysis = {
        "gates": len(circuit),
        "phi_offset_rad": config.noise.phi_offset,
        "minimize": p.minimize,
        "transports_before": before,
        "transports_after": minimized.transport_count(),
        "duration_before_s": duration_before,
        "duration_after_s": minimized.duration(),
    }
    extra = {"program.json": {"ops": minimized.to_json_obj()}}
    return None, None, analysis, extra


_RUNNERS = {
    "rabi": _run_rabi,
    "crosstalk": _run_crosstalk,
    "parity-scan": _run_parity_scan,
    "cycle-bench": _run_cycle_bench,
    "zeeman-sweep": _run_zeeman_sweep,
    "transpile": _run_transpile,
}


def _dispatch_run(args) -> int:
    config = load_config(args.config)
    if config.experiment != args.command:
        raise ConfigError([
            f"experiment: config declares {config.experiment!r} but the "
            f"{args.command!r} subcommand was invoked"
        ])
    # remember where the config lives so relative file references resolve
    config.raw["__config_dir__"] = str(Path(args.config).resolve().parent)

    seed = config.seed if args.seed is None else args.seed
    if seed < 0:
        raise ConfigError(["--seed: must be non-negative"])
    if args.exact:
        shots = 0
    elif args.shots is not None:
        if args.shots < 0:
            raise ConfigError(["--shots: must be non-negative"])
        shots = args.shots
    else:
        shots = config.shots

    out_dir = Path(args.out or config.out_dir or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    _LOG.info("running %s (seed=%d, shots=%d) -> %s", args.command, seed, shots, out_dir)

    header, rows, analysis, extra = _RUNNERS[args.command](config, seed, shots)

    raw_echo = {k: v for k, v in config.raw.items() if k != "__config_dir__"}
    manifest = {
        "tool": "ionreg",
        "version": __version__,
        "experiment": config.experiment,
        "seed": seed,
        "shots": shots,
        "mode": "exact" if shots == 0 else "sampled",
        "rng_algorithm": RNG_ALGORITHM,
        "noise": replace(config.noise, seed=seed).to_json_dict(),
        "params": _params_json(config.params),
        "config": raw_echo,
    }
    _write_json(out_dir / "manifest.json", manifest)
    if header is not None:
        _write_csv(out_dir / "data.csv", header, rows)
    _write_json(out_dir / "analysis.json", analysis)
    for name, obj in extra.items():
        _write_json(out_dir / name, obj)
    _LOG.info("wrote %s", ", ".join(
        ["manifest.json"] + (["data.csv"] if header else []) + ["analysis.json"] + list(extra)
    ))
    return 0


def _dispatch_validate(args) -> int:
    try:
        load_config(args.config)
    except ConfigError as exc:
        print("configuration is invalid:", file=sys.stderr)
        for violation in exc.violations:
            print(f"  - {violation}", file=sys.stderr)
        return 2
    print(f"OK: {args.config} is a valid run configuration")
    return 0


def main(argv=None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return _dispatch_validate(args)
    try:
        return _dispatch_run(args)
    except (ConfigError, CircuitParseError) as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except NoCrossingError as exc:
        print(json.dumps({"error": {"type": "NoCrossingError", "message": str(exc)}}), file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - boundary: report and signal failure
        _LOG.debug("unhandled error", exc_info=True)
        print(
            json.dumps({"error": {"type": type(exc).__name__, "message": str(exc)}}),
            file=sys.stderr,
        )
        return 3


if __name__ == "__main__":
    sys.exit(main())

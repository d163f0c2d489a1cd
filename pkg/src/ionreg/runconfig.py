"""Run configuration files: schema, validation, and typed parameter blocks.

A run is described by one JSON object:

    {
      "experiment": "crosstalk",
      "seed": 7,
      "shots": 100,
      "noise": { ... },            # NoiseConfig fields, all optional
      "crosstalk": { ... },        # block named after the experiment
      "out_dir": "runs/xt"         # optional, overridden by --out
    }

Angles are radians and rates rad/s throughout, marked by ``_rad`` /
``_rad_per_s`` field-name suffixes.  Validation collects every violation
with its field path instead of stopping at the first.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .experiments import ShiftModel
from .gates import RABI_RATE_CONFIG1, TWO_PI
from .noise import NoiseConfig

__all__ = [
    "EXPERIMENTS",
    "ConfigError",
    "RabiParams",
    "CrosstalkParams",
    "ParityScanParams",
    "CycleBenchParams",
    "ZeemanSweepParams",
    "TranspileParams",
    "RunConfig",
    "validate_config_dict",
    "load_config",
]

EXPERIMENTS = ("rabi", "crosstalk", "parity-scan", "cycle-bench", "zeeman-sweep", "transpile")

_BLOCK_KEYS = {
    "rabi": "rabi",
    "crosstalk": "crosstalk",
    "parity-scan": "parity_scan",
    "cycle-bench": "cycle_bench",
    "zeeman-sweep": "zeeman_sweep",
    "transpile": "transpile",
}


class ConfigError(ValueError):
    """Invalid run configuration; ``violations`` lists field-precise messages."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        lines = "\n".join(f"  - {v}" for v in self.violations)
        super().__init__(f"invalid configuration:\n{lines}")


class _Checker:
    """Accumulates violations while pulling typed fields out of a dict."""

    def __init__(self, obj: dict, prefix: str, violations: list):
        self.obj = obj
        self.prefix = prefix
        self.violations = violations
        self.seen: set = set()

    def _path(self, key: str) -> str:
        return f"{self.prefix}.{key}" if self.prefix else key

    def fail(self, key: str, message: str):
        self.violations.append(f"{self._path(key)}: {message}")

    def int_field(self, key, default, minimum=None, maximum=None, multiple_of=None, choices=None):
        self.seen.add(key)
        if key not in self.obj:
            return default
        v = self.obj[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.fail(key, f"must be an integer, got {v!r}")
            return default
        if minimum is not None and v < minimum:
            self.fail(key, f"must be >= {minimum}, got {v}")
            return default
        if maximum is not None and v > maximum:
            self.fail(key, f"must be <= {maximum}, got {v}")
            return default
        if multiple_of is not None and v % multiple_of != 0:
            self.fail(key, f"must be a multiple of {multiple_of}, got {v}")
            return default
        if choices is not None and v not in choices:
            self.fail(key, f"must be one of {sorted(choices)}, got {v}")
            return default
        return v

    def float_field(self, key, default, minimum=None, maximum=None, exclusive_minimum=None):
        self.seen.add(key)
        if key not in self.obj:
            return default
        v = self.obj[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.fail(key, f"must be a number, got {v!r}")
            return default
        v = float(v)
        if not math.isfinite(v):
            self.fail(key, f"must be finite, got {v!r}")
            return default
        if exclusive_minimum is not None and v <= exclusive_minimum:
            self.fail(key, f"must be > {exclusive_minimum}, got {v}")
            return default
        if minimum is not None and v < minimum:
            self.fail(key, f"must be >= {minimum}, got {v}")
            return default
        if maximum is not None and v > maximum:
            self.fail(key, f"must be <= {maximum}, got {v}")
            return default
        return v

    def str_field(self, key, default, choices=None):
        self.seen.add(key)
        if key not in self.obj:
            return default
        v = self.obj[key]
        if not isinstance(v, str):
            self.fail(key, f"must be a string, got {v!r}")
            return default
        if choices is not None and v not in choices:
            self.fail(key, f"must be one of {list(choices)}, got {v!r}")
            return default
        return v

    def bool_field(self, key, default):
        self.seen.add(key)
        if key not in self.obj:
            return default
        v = self.obj[key]
        if not isinstance(v, bool):
            self.fail(key, f"must be true or false, got {v!r}")
            return default
        return v

    def reject_unknown(self):
        for key in sorted(set(self.obj) - self.seen):
            self.fail(key, "unknown field")


@dataclass(frozen=True)
class RabiParams:
    omega: float = RABI_RATE_CONFIG1
    t_max: float = 0.0  # 0 means "2.5 periods of omega", resolved below
    points: int = 101
    ion: int = 1

    @classmethod
    def resolve(cls, obj: dict, prefix: str, violations: list) -> "RabiParams":
        c = _Checker(obj, prefix, violations)
        omega = c.float_field("omega_rad_per_s", RABI_RATE_CONFIG1, exclusive_minimum=0.0)
        t_max = c.float_field("t_max_s", 0.0, minimum=0.0)
        points = c.int_field("points", 101, minimum=8)
        ion = c.int_field("ion", 1, choices=(1, 2))
        c.reject_unknown()
        if t_max == 0.0:
            t_max = 2.5 * TWO_PI / omega
        return cls(omega=omega, t_max=t_max, points=points, ion=ion)


@dataclass(frozen=True)
class CrosstalkParams:
    n_list: tuple = (0, 50, 100, 150, 200, 300, 400, 500, 650, 800, 1000)
    variant: str = "two-ion"
    sequences_per_point: int = 4
    ion: int = 1

    @classmethod
    def resolve(cls, obj: dict, prefix: str, violations: list) -> "CrosstalkParams":
        c = _Checker(obj, prefix, violations)
        variant = c.str_field("variant", "two-ion", choices=("two-ion", "single-ion"))
        seqs = c.int_field("sequences_per_point", 4, minimum=1)
        ion = c.int_field("ion", 1, choices=(1, 2))
        n_list = cls.n_list
        c.seen.add("n_list")
        if "n_list" in obj:
            raw = obj["n_list"]
            if not isinstance(raw, list) or not raw:
                c.fail("n_list", f"must be a non-empty list of even integers, got {raw!r}")
            else:
                ok = True
                for idx, v in enumerate(raw):
                    if isinstance(v, bool) or not isinstance(v, int) or v < 0 or v % 2 != 0:
                        c.fail(f"n_list[{idx}]", f"must be an even integer >= 0, got {v!r}")
                        ok = False
                if ok:
                    n_list = tuple(raw)
        c.reject_unknown()
        return cls(n_list=n_list, variant=variant, sequences_per_point=seqs, ion=ion)


@dataclass(frozen=True)
class ParityScanParams:
    phi_min: float = -0.5 * math.pi
    phi_max: float = 0.5 * math.pi
    points: int = 37

    @classmethod
    def resolve(cls, obj: dict, prefix: str, violations: list) -> "ParityScanParams":
        c = _Checker(obj, prefix, violations)
        phi_min = c.float_field("phi_min_rad", cls.phi_min)
        phi_max = c.float_field("phi_max_rad", cls.phi_max)
        points = c.int_field("points", 37, minimum=8)
        c.reject_unknown()
        if phi_max <= phi_min:
            c.fail("phi_max_rad", f"must exceed phi_min_rad, got [{phi_min}, {phi_max}]")
        return cls(phi_min=phi_min, phi_max=phi_max, points=points)


@dataclass(frozen=True)
class CycleBenchParams:
    m1: int = 4
    m2: int = 8
    dressings_per_basis: int = 1
    bootstrap_resamples: int = 1000

    @classmethod
    def resolve(cls, obj: dict, prefix: str, violations: list) -> "CycleBenchParams":
        c = _Checker(obj, prefix, violations)
        m1 = c.int_field("m1", 4, minimum=4, multiple_of=4)
        m2 = c.int_field("m2", 8, minimum=4, multiple_of=4)
        dressings = c.int_field("dressings_per_basis", 1, minimum=1)
        resamples = c.int_field("bootstrap_resamples", 1000, minimum=1)
        c.reject_unknown()
        if m1 >= m2:
            c.fail("m2", f"must exceed m1, got m1={m1}, m2={m2}")
        return cls(m1=m1, m2=m2, dressings_per_basis=dressings, bootstrap_resamples=resamples)


@dataclass(frozen=True)
class ZeemanSweepParams:
    model: ShiftModel = field(default_factory=ShiftModel.zero)
    dx_min: float = -0.6
    dx_max: float = 0.6
    dx_points: int = 13
    dy_min: float = -0.04
    dy_max: float = 0.04
    dy_points: int = 9
    contour_level: float = 0.966
    auto_scale_target: float | None = None
    auto_scale_hi: float = 1.0
    dressings_per_basis: int = 6

    @classmethod
    def resolve(cls, obj: dict, prefix: str, violations: list) -> "ZeemanSweepParams":
        c = _Checker(obj, prefix, violations)
        dx_min = c.float_field("dx_min_um", cls.dx_min)
        dx_max = c.float_field("dx_max_um", cls.dx_max)
        dx_points = c.int_field("dx_points", cls.dx_points, minimum=3)
        dy_min = c.float_field("dy_min_um", cls.dy_min)
        dy_max = c.float_field("dy_max_um", cls.dy_max)
        dy_points = c.int_field("dy_points", cls.dy_points, minimum=3)
        level = c.float_field("contour_level", 0.966, exclusive_minimum=0.0, maximum=1.0)
        target = c.float_field("auto_scale_target", None, exclusive_minimum=0.0, maximum=1.0)
        hi = c.float_field("auto_scale_hi", 1.0, exclusive_minimum=0.0)
        dressings = c.int_field("dressings_per_basis", cls.dressings_per_basis, minimum=1)
        model = cls.__dataclass_fields__["model"].default_factory()
        c.seen.add("model")
        if "model" in obj:
            if not isinstance(obj["model"], dict):
                c.fail("model", f"must be an object, got {obj['model']!r}")
            else:
                try:
                    model = ShiftModel.from_json_dict(obj["model"])
                except (KeyError, TypeError, ValueError) as exc:
                    c.fail("model", str(exc) or repr(exc))
        c.reject_unknown()
        if dx_max <= dx_min:
            c.fail("dx_max_um", f"must exceed dx_min_um, got [{dx_min}, {dx_max}]")
        if dy_max <= dy_min:
            c.fail("dy_max_um", f"must exceed dy_min_um, got [{dy_min}, {dy_max}]")
        return cls(
            model=model,
            dx_min=dx_min, dx_max=dx_max, dx_points=dx_points,
            dy_min=dy_min, dy_max=dy_max, dy_points=dy_points,
            contour_level=level, auto_scale_target=target, auto_scale_hi=hi,
            dressings_per_basis=dressings,
        )


@dataclass(frozen=True)
class TranspileParams:
    circuit_file: str = ""
    minimize: bool = True

    @classmethod
    def resolve(cls, obj: dict, prefix: str, violations: list) -> "TranspileParams":
        c = _Checker(obj, prefix, violations)
        circuit_file = c.str_field("circuit_file", "")
        minimize = c.bool_field("minimize", True)
        c.reject_unknown()
        if not circuit_file:
            c.fail("circuit_file", "is required for the transpile experiment")
        return cls(circuit_file=circuit_file, minimize=minimize)


_PARAM_TYPES = {
    "rabi": RabiParams,
    "crosstalk": CrosstalkParams,
    "parity-scan": ParityScanParams,
    "cycle-bench": CycleBenchParams,
    "zeeman-sweep": ZeemanSweepParams,
    "transpile": TranspileParams,
}


@dataclass(frozen=True)
class RunConfig:
    """Fully resolved description of one run."""

    experiment: str
    seed: int
    shots: int
    noise: NoiseConfig
    params: object
    out_dir: str | None
    raw: dict


def validate_config_dict(obj) -> tuple[list, "RunConfig | None"]:
    """Check a parsed JSON object; returns (violations, config-or-None)."""
    violations: list = []
    if not isinstance(obj, dict):
        return ([f"top level: must be a JSON object, got {type(obj).__name__}"], None)
    c = _Checker(obj, "", violations)
    experiment = c.str_field("experiment", None, choices=EXPERIMENTS)
    if "experiment" not in obj:
        c.fail("experiment", f"is required (one of {list(EXPERIMENTS)})")
    seed = c.int_field("seed", 0, minimum=0)
    shots = c.int_field("shots", 0, minimum=0)
    out_dir = c.str_field("out_dir", None)

    c.seen.add("noise")
    noise = NoiseConfig()
    if "noise" in obj:
        if not isinstance(obj["noise"], dict):
            c.fail("noise", f"must be an object, got {obj['noise']!r}")
        else:
            try:
                noise = NoiseConfig.from_json_dict(obj["noise"])
            except (TypeError, ValueError) as exc:
                c.fail("noise", str(exc))

    params = None
    if experiment in _PARAM_TYPES:
        block_key = _BLOCK_KEYS[experiment]
        c.seen.add(block_key)
        block = obj.get(block_key, {})
        if not isinstance(block, dict):
            c.fail(block_key, f"must be an object, got {block!r}")
            block = {}
        params = _PARAM_TYPES[experiment].resolve(block, block_key, violations)
        # a parameter block for a different experiment is a config mistake
        for other in _BLOCK_KEYS.values():
            if other != block_key and other in obj:
                c.fail(other, f"parameter block does not match experiment {experiment!r}")
                c.seen.add(other)
    c.reject_unknown()

    if violations:
        return (violations, None)
    config = RunConfig(
        experiment=experiment,
        seed=seed,
        shots=shots,
        noise=noise,
        params=params,
        out_dir=out_dir,
        raw=obj,
    )
    return ([], config)


def load_config(path) -> RunConfig:
    """Read, parse, and validate a configuration file.

    Raises :class:`ConfigError` carrying every violation found.
    """
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError([f"{p}: cannot read file ({exc.strerror or exc})"]) from exc
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError([f"{p}: not valid JSON ({exc.msg} at line {exc.lineno} column {exc.colno})"]) from exc
    violations, config = validate_config_dict(obj)
    if violations:
        raise ConfigError(violations)
    return config

"""Characterization experiments for the two-ion register.

Four drivers, each mirroring one measurement routine:

- :func:`rabi_flop_experiment` — addressed-ion flopping versus pulse
  duration, the raw data behind Rabi-rate extraction.
- :func:`run_crosstalk_experiment` — survival of random even-length
  pi-pulse trains, bounding the per-gate error seen by the spectator ion
  (or by the addressed ion itself in single-ion mode).
- :func:`calibrate_phase_offset` — parity scan of an entangled state
  against the drive phase, locating the frame offset between single-qubit
  pulses and the entangling gate.
- :func:`zeeman_sweep` — composite-fidelity heatmap over a grid of
  field-geometry displacements, with contour extraction.

All drivers consume a NoiseConfig, run through the standard lowering and
scheduling path, and are deterministic given a master seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .circuits import Circuit, ms, rphi
from .cycle_bench import CBConfig, generate_cb_circuits, run_cycle_benchmark
from .fitting import find_zero_crossing
from .gates import RABI_RATE_CONFIG1, RABI_RATE_CONFIG2
from .noise import NoiseConfig, derive_rng
from .qstate import TwoQubitState
from .transpile import lower, minimize_transports, run_program, simulate

__all__ = [
    "parity",
    "parity_from_bright_probs",
    "local_maxima",
    "RabiFlopData",
    "rabi_flop_experiment",
    "crosstalk_per_gate",
    "spectator_rate_for_crosstalk",
    "generate_crosstalk_sequence",
    "CrosstalkData",
    "run_crosstalk_experiment",
    "PhaseCalibration",
    "parity_scan",
    "calibrate_phase_offset",
    "ShiftModel",
    "SweepResult",
    "contour_points",
    "has_closed_contour",
    "zeeman_sweep",
    "find_shift_scale",
]


def parity(state: TwoQubitState) -> float:
    """Two-ion parity: p_uu + p_dd - (p_ud + p_du), in [-1, 1]."""
    p_uu, p_ud, p_du, p_dd = state.populations()
    return float(p_uu + p_dd - p_ud - p_du)


def parity_from_bright_probs(p2: float, p1: float, p0: float) -> float:
    """Parity from the global-fluorescence histogram: even-bright minus odd-bright."""
    return float(p2 + p0 - p1)


def local_maxima(y) -> np.ndarray:
    """Indices of interior local maxima of a sampled trace.

    A point counts when it is >= both neighbors and > at least one, so
    flat tops report their edges but strictly flat stretches do not.
    """
    y = np.asarray(y, dtype=float)
    if y.ndim != 1 or y.size < 3:
        return np.array([], dtype=int)
    left = y[1:-1] - y[:-2]
    right = y[1:-1] - y[2:]
    hit = (left >= 0) & (right >= 0) & ((left > 0) | (right > 0))
    return np.nonzero(hit)[0] + 1


# --------------------------------------------------------------------------- #
# Rabi flopping


@dataclass(frozen=True)
class RabiFlopData:
    """Bright-population traces versus pulse duration for one addressed ion."""

    t: np.ndarray
    p2bright: np.ndarray
    p1bright: np.ndarray
    p0bright: np.ndarray
    ion: int
    omega: float
    mode: str
    shots: int


def rabi_flop_experiment(
    t_grid,
    omega: float,
    noise: NoiseConfig,
    shots: int = 0,
    ion: int = 1,
    seed: int | None = None,
) -> RabiFlopData:
    """Drive one ion for each duration in ``t_grid`` and record bright fractions.

    The other ion idles (accruing spectator noise).  ``shots`` = 0 runs in
    exact mode; otherwise each duration is sampled with its own derived
    detection generator.  With preparation/detection flips enabled, the
    zero-bright trace shows small peaks wherever the one-bright trace
    peaks: both require the addressed ion dark, and the zero-bright
    outcome then needs only a single detection flip of the idle ion.
    """
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega!r}")
    if ion not in (1, 2):
        raise ValueError(f"ion must be 1 or 2, got {ion!r}")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0):
        raise ValueError("pulse durations must be non-negative")
    master = noise.seed if seed is None else seed
    mode = "exact" if shots == 0 else "sampled"
    rates = {"omega1": omega, "omega2": RABI_RATE_CONFIG2} if ion == 1 else {
        "omega1": RABI_RATE_CONFIG1, "omega2": omega}
    p2 = np.empty(t_grid.size)
    p1 = np.empty(t_grid.size)
    p0 = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        program = lower(Circuit([rphi(omega * t, 0.0, ion)]), phi_offset=noise.phi_offset)
        if mode == "exact":
            p2[i], p1[i], p0[i] = simulate(program, noise, mode="exact", **rates)
        else:
            hist = simulate(
                program, noise, mode="sampled", shots=shots,
                rng=derive_rng(master, i), **rates,
            )
            p2[i], p1[i], p0[i] = (hist.n2 / shots, hist.n1 / shots, hist.n0 / shots)
    return RabiFlopData(
        t=t_grid, p2bright=p2, p1bright=p1, p0bright=p0,
        ion=ion, omega=omega, mode=mode, shots=shots,
    )


# --------------------------------------------------------------------------- #
# crosstalk bounding


def crosstalk_per_gate(omega_na: float, omega: float) -> float:
    """Per-gate spectator error rate produced by a residual drive.

    During an addressed pi pulse the spectator turns by a = pi*omega_na/omega
    about a random equatorial axis, which shrinks its mean polar component
    by cos(a) per gate; matching exp(-2C) per gate gives
    C = -ln(cos(a))/2.
    """
    if omega <= 0:
        raise ValueError("omega must be positive")
    alpha = math.pi * omega_na / omega
    if not 0 <= alpha < 0.5 * math.pi:
        raise ValueError("residual rotation per gate must lie in [0, pi/2)")
    return -0.5 * math.log(math.cos(alpha))


def spectator_rate_for_crosstalk(c: float, omega: float) -> float:
    """Residual Rabi rate that produces a target per-gate error rate C."""
    if c < 0:
        raise ValueError("C must be non-negative")
    if omega <= 0:
        raise ValueError("omega must be positive")
    return omega * math.acos(math.exp(-2.0 * c)) / math.pi


def generate_crosstalk_sequence(n: int, rng: np.random.Generator, ion: int = 1) -> Circuit:
    """Random train of ``n`` pi pulses on one ion, axes uniform in [0, 2pi).

    ``n`` must be even so the ideal addressed ion returns to its pole.
    """
    if n < 0 or n % 2 != 0:
        raise ValueError(f"pulse count must be even and non-negative, got {n}")
    if ion not in (1, 2):
        raise ValueError(f"ion must be 1 or 2, got {ion!r}")
    phases = rng.uniform(0.0, 2.0 * math.pi, size=n)
    return Circuit([rphi(math.pi, float(phi), ion) for phi in phases])


@dataclass(frozen=True)
class CrosstalkData:
    """Survival fraction versus pulse-train length."""

    n: np.ndarray
    fidelity: np.ndarray
    sigma: np.ndarray
    mode: str
    experiment: str
    shots: int
    sequences_per_point: int


def _addressed_bright_prob(state: TwoQubitState, noise: NoiseConfig, ion: int) -> float:
    """Probability the addressed ion alone is measured bright."""
    z = state.reduced_bloch(ion)[2]
    p_up = 0.5 * (1.0 + z)
    eps = noise.eps1 if ion == 1 else noise.eps2
    return (1.0 - eps) * p_up + eps * (1.0 - p_up)


def run_crosstalk_experiment(
    n_list,
    noise: NoiseConfig,
    shots: int = 0,
    experiment: str = "two-ion",
    sequences_per_point: int = 4,
    ion: int = 1,
    seed: int | None = None,
    omega: float | None = None,
) -> CrosstalkData:
    """Survival fraction after random even-length pi-pulse trains.

    ``experiment`` selects the observable: "two-ion" scores the two-ion
    bright fraction (addressed ion ideally returns bright, so any loss is
    spectator error plus preparation/detection flips), "single-ion"
    scores the addressed ion's own bright fraction as if it were trapped
    alone.  Each length in ``n_list`` averages ``sequences_per_point``
    independently drawn pulse trains; with ``shots`` > 0 every train is
    sampled and the pooled fraction carries a smoothed binomial sigma
    (zero in exact mode).
    """
    if experiment not in ("two-ion", "single-ion"):
        raise ValueError(f"experiment must be 'two-ion' or 'single-ion', got {experiment!r}")
    if sequences_per_point < 1:
        raise ValueError("sequences_per_point must be >= 1")
    n_arr = np.asarray(n_list, dtype=int)
    if n_arr.ndim != 1 or n_arr.size == 0:
        raise ValueError("n_list must be a non-empty 1-d sequence")
    master = noise.seed if seed is None else seed
    mode = "exact" if shots == 0 else "sampled"
    default_rate = RABI_RATE_CONFIG1 if ion == 1 else RABI_RATE_CONFIG2
    rate = default_rate if omega is None else omega
    rates = {"omega1": rate, "omega2": RABI_RATE_CONFIG2} if ion == 1 else {
        "omega1": RABI_RATE_CONFIG1, "omega2": rate}

    fidelity = np.empty(n_arr.size)
    sigma = np.zeros(n_arr.size)
    for i, n in enumerate(n_arr):
        exact_acc = 0.0
        successes = 0
        for s in range(sequences_per_point):
            circ_rng = derive_rng(master, i, s, 0)
            circuit = generate_crosstalk_sequence(int(n), circ_rng, ion=ion)
            program = lower(circuit, phi_offset=noise.phi_offset)
            if experiment == "two-ion":
                if mode == "exact":
                    p2, _, _ = simulate(program, noise, mode="exact", **rates)
                    exact_acc += p2
                else:
                    hist = simulate(
                        program, noise, mode="sampled", shots=shots,
                        rng=derive_rng(master, i, s, 1), **rates,
                    )
                    successes += hist.n2
            else:
                state = run_program(program, noise, **rates)
                b = _addressed_bright_prob(state, noise, ion)
                if mode == "exact":
                    exact_acc += b
                else:
                    det_rng = derive_rng(master, i, s, 1)
                    successes += int(det_rng.binomial(shots, b))
        if mode == "exact":
            fidelity[i] = exact_acc / sequences_per_point
        else:
            total = shots * sequences_per_point
            fidelity[i] = successes / total
            smoothed = (successes + 1.0) / (total + 2.0)
            sigma[i] = math.sqrt(smoothed * (1.0 - smoothed) / total)
    return CrosstalkData(
        n=n_arr, fidelity=fidelity, sigma=sigma,
        mode=mode, experiment=experiment, shots=shots,
        sequences_per_point=sequences_per_point,
    )


# --------------------------------------------------------------------------- #
# parity-scan phase calibration


@dataclass(frozen=True)
class PhaseCalibration:
    """Result of the parity-scan frame calibration."""

    phi_offset: float
    sigma: float
    phi_dds: np.ndarray
    parity: np.ndarray
    parity_sigma: np.ndarray | None
    mode: str
    shots: int


def parity_scan(
    phi_grid,
    noise: NoiseConfig,
    shots: int = 0,
    seed: int | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """Measured parity of the calibration state versus programmed drive phase.

    For each phase the circuit entangles the ions and then applies a
    pi/2 analysis pulse at that phase to each ion; the programmed phase
    is taken at face value (offset zero) so any frame offset in the noise
    model shifts the resulting parity fringe.  Returns (grid, parity,
    sigma) with sigma None in exact mode.
    """
    phi_grid = np.asarray(phi_grid, dtype=float)
    if phi_grid.ndim != 1 or phi_grid.size < 4:
        raise ValueError("phi_grid must be a 1-d array with at least 4 points")
    master = noise.seed if seed is None else seed
    par = np.empty(phi_grid.size)
    sig = None if shots == 0 else np.empty(phi_grid.size)
    for i, phi in enumerate(phi_grid):
        circuit = Circuit([
            ms(),
            rphi(0.5 * math.pi, float(phi), 2),
            rphi(0.5 * math.pi, float(phi), 1),
        ])
        program = lower(circuit, phi_offset=0.0)
        if shots == 0:
            p2, p1, p0 = simulate(program, noise, mode="exact")
            par[i] = parity_from_bright_probs(p2, p1, p0)
        else:
            hist = simulate(
                program, noise, mode="sampled", shots=shots,
                rng=derive_rng(master, i),
            )
            par[i] = (hist.n2 + hist.n0 - hist.n1) / shots
            sig[i] = math.sqrt(max(1.0 - par[i] ** 2, 1.0 / shots) / shots)
    return phi_grid, par, sig


def calibrate_phase_offset(
    phi_grid,
    noise: NoiseConfig,
    shots: int = 0,
    seed: int | None = None,
) -> PhaseCalibration:
    """Estimate the single-qubit frame offset from a parity scan.

    The fringe crosses zero with negative slope where the programmed
    phase cancels the frame offset, so the estimate is minus the crossing
    position.  The uncertainty comes from the local line-fit covariance
    at the crossing.  Raises :class:`ionreg.fitting.NoCrossingError` when
    the grid contains no negative-slope crossing.
    """
    grid, par, sig = parity_scan(phi_grid, noise, shots=shots, seed=seed)
    x0, x0_sigma = find_zero_crossing(grid, par, slope="negative", sigma=sig)
    return PhaseCalibration(
        phi_offset=-x0,
        sigma=x0_sigma,
        phi_dds=grid,
        parity=par,
        parity_sigma=sig,
        mode="exact" if shots == 0 else "sampled",
        shots=shots,
    )


# --------------------------------------------------------------------------- #
# addressing-shift sensitivity sweep


@dataclass(frozen=True)
class ShiftModel:
    """Detuning landscape of the four addressing shifts over displacements.

    ``coeffs[k-1][m-1]`` holds six polynomial coefficients
    (c0, cx, cy, cxx, cxy, cyy) mapping a displacement (dx, dy) in
    micrometers to the shift (rad/s) seen by ion m while ion k is
    addressed; the whole landscape is multiplied by ``scale``.
    """

    coeffs: tuple
    scale: float = 1.0

    def __post_init__(self):
        coeffs = tuple(tuple(tuple(float(c) for c in row) for row in cfg) for cfg in self.coeffs)
        if len(coeffs) != 2 or any(len(cfg) != 2 for cfg in coeffs):
            raise ValueError("coeffs must be a 2 x 2 table of coefficient tuples")
        for cfg in coeffs:
            for row in cfg:
                if len(row) != 6:
                    raise ValueError("each coefficient tuple must have 6 entries (c0, cx, cy, cxx, cxy, cyy)")
                if not all(math.isfinite(c) for c in row):
                    raise ValueError("coefficients must be finite")
        if not math.isfinite(self.scale):
            raise ValueError("scale must be finite")
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scale", float(self.scale))

    def deltas(self, dx: float, dy: float) -> tuple[tuple[float, float], tuple[float, float]]:
        """Evaluate the four shifts at displacement (dx, dy) micrometers."""
        basis = (1.0, dx, dy, dx * dx, dx * dy, dy * dy)
        return tuple(
            tuple(self.scale * sum(c * b for c, b in zip(row, basis)) for row in cfg)
            for cfg in self.coeffs
        )

    def scaled(self, scale: float) -> "ShiftModel":
        """Copy of the model with the overall scale replaced."""
        return replace(self, scale=scale)

    def to_json_dict(self) -> dict:
        return {
            "coeffs_rad_per_s_um": [[list(row) for row in cfg] for cfg in self.coeffs],
            "scale": self.scale,
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "ShiftModel":
        return cls(coeffs=obj["coeffs_rad_per_s_um"], scale=obj.get("scale", 1.0))

    @classmethod
    def zero(cls) -> "ShiftModel":
        return cls(coeffs=(((0.0,) * 6, (0.0,) * 6), ((0.0,) * 6, (0.0,) * 6)))

    @classmethod
    def quadratic_bowl(
        cls,
        amplitudes,
        center: tuple[float, float] = (0.15, 0.008),
        widths: tuple[float, float] = (0.4, 0.03),
        floors=None,
    ) -> "ShiftModel":
        """Shift magnitudes growing quadratically away from a minimum point.

        Each of the four shifts is
        floor + amplitude * (((dx-x0)/wx)^2 + ((dy-y0)/wy)^2), expanded
        into the polynomial basis.  ``amplitudes`` and ``floors`` are
        2x2 tables (rad/s) indexed like :attr:`coeffs`.
        """
        x0, y0 = center
        wx, wy = widths
        if wx <= 0 or wy <= 0:
            raise ValueError("widths must be positive")
        if floors is None:
            floors = ((0.0, 0.0), (0.0, 0.0))
        coeffs = []
        for k in range(2):
            cfg = []
            for m in range(2):
                a = float(amplitudes[k][m])
                f0 = float(floors[k][m])
                cfg.append((
                    f0 + a * (x0 * x0 / (wx * wx) + y0 * y0 / (wy * wy)),
                    -2.0 * a * x0 / (wx * wx),
                    -2.0 * a * y0 / (wy * wy),
                    a / (wx * wx),
                    0.0,
                    a / (wy * wy),
                ))
            coeffs.append(tuple(cfg))
        return cls(coeffs=tuple(coeffs))


@dataclass(frozen=True)
class SweepResult:
    """Composite-fidelity heatmap over displacement space."""

    dx: np.ndarray
    dy: np.ndarray
    fidelity: np.ndarray  # shape (len(dx), len(dy))
    errors: dict
    contour_level: float
    contour: np.ndarray  # (n, 2) interpolated level-crossing points
    contour_closed: bool


def contour_points(xs, ys, f, level: float) -> np.ndarray:
    """Level-crossing points of a gridded field, by edge interpolation.

    Scans every grid edge whose endpoint values straddle ``level`` and
    linearly interpolates the crossing.  Returns an (n, 2) array of
    (x, y) points; edges touching non-finite values are skipped.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    f = np.asarray(f, dtype=float)
    if f.shape != (xs.size, ys.size):
        raise ValueError("f must have shape (len(xs), len(ys))")
    pts = []

    def cut(v0, v1):
        if not (np.isfinite(v0) and np.isfinite(v1)):
            return None
        if (v0 - level) * (v1 - level) > 0 or v0 == v1:
            return None
        return (level - v0) / (v1 - v0)

    for i in range(xs.size):
        for j in range(ys.size):
            if i + 1 < xs.size:
                t = cut(f[i, j], f[i + 1, j])
                if t is not None:
                    pts.append((xs[i] + t * (xs[i + 1] - xs[i]), ys[j]))
            if j + 1 < ys.size:
                t = cut(f[i, j], f[i, j + 1])
                if t is not None:
                    pts.append((xs[i], ys[j] + t * (ys[j + 1] - ys[j])))
    return np.array(pts) if pts else np.empty((0, 2))


def has_closed_contour(f, level: float) -> bool:
    """Whether the superlevel set {f >= level} is non-empty and avoids the grid edge.

    In that case its boundary is a closed curve strictly inside the
    window.  Non-finite interior values are ignored; a non-finite value
    on the grid edge counts as a failure (the contour cannot be certified
    closed).
    """
    f = np.asarray(f, dtype=float)
    if f.ndim != 2 or f.shape[0] < 3 or f.shape[1] < 3:
        return False
    edge = np.concatenate([f[0, :], f[-1, :], f[:, 0], f[:, -1]])
    if not np.all(np.isfinite(edge) & (edge < level)):
        return False
    interior = f[1:-1, 1:-1]
    return bool(np.any(np.isfinite(interior) & (interior >= level)))


def zeeman_sweep(
    dx_grid,
    dy_grid,
    model: ShiftModel,
    cb_config: CBConfig,
    noise_base: NoiseConfig,
    contour_level: float = 0.966,
    minimize: bool = True,
) -> SweepResult:
    """Composite fidelity over a displacement grid of the shift landscape.

    Benchmarking circuits are generated once from ``cb_config`` and
    reused at every grid point with that point's shifts substituted into
    the noise model (exact mode).  A failing point records its error and
    leaves NaN in the map instead of aborting the sweep.
    """
    dx_grid = np.asarray(dx_grid, dtype=float)
    dy_grid = np.asarray(dy_grid, dtype=float)
    if dx_grid.ndim != 1 or dy_grid.ndim != 1 or dx_grid.size < 2 or dy_grid.size < 2:
        raise ValueError("dx_grid and dy_grid must be 1-d arrays with >= 2 points")
    circuits = generate_cb_circuits(cb_config)
    fid = np.full((dx_grid.size, dy_grid.size), np.nan)
    errors: dict = {}
    for i, dx in enumerate(dx_grid):
        for j, dy in enumerate(dy_grid):
            try:
                noise = noise_base.with_delta(model.deltas(float(dx), float(dy)))
                run = run_cycle_benchmark(
                    cb_config, noise, mode="exact",
                    minimize=minimize, circuits=circuits,
                )
                fid[i, j] = run.fidelity
            except Exception as exc:  # noqa: BLE001 - sweep must survive bad points
                errors[(i, j)] = f"{type(exc).__name__}: {exc}"
    contour = contour_points(dx_grid, dy_grid, fid, contour_level)
    closed = has_closed_contour(fid, contour_level)
    return SweepResult(
        dx=dx_grid, dy=dy_grid, fidelity=fid, errors=errors,
        contour_level=contour_level, contour=contour, contour_closed=closed,
    )


def find_shift_scale(
    model: ShiftModel,
    cb_config: CBConfig,
    noise_base: NoiseConfig,
    target: float = 0.966,
    point: tuple[float, float] = (0.0, 0.0),
    lo: float = 0.0,
    hi: float = 1.0,
    tol: float = 1e-4,
    max_iter: int = 60,
) -> tuple[float, float]:
    """Bisect the landscape scale until the fidelity at ``point`` hits ``target``.

    Assumes the exact-mode composite fidelity decreases monotonically in
    the scale over [lo, hi]; raises ValueError when the endpoints do not
    bracket the target.  Returns (scale, fidelity at that scale).
    """
    circuits = generate_cb_circuits(cb_config)

    def fidelity_at(scale: float) -> float:
        noise = noise_base.with_delta(model.scaled(scale).deltas(*point))
        return run_cycle_benchmark(
            cb_config, noise, mode="exact", circuits=circuits,
        ).fidelity

    f_lo = fidelity_at(lo)
    f_hi = fidelity_at(hi)
    if not (f_hi <= target <= f_lo):
        raise ValueError(
            f"target {target} not bracketed: fidelity is {f_lo:.6f} at scale {lo} "
            f"and {f_hi:.6f} at scale {hi}"
        )
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        f_mid = fidelity_at(mid)
        if f_mid >= target:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
        if hi - lo < tol:
            break
    return lo, f_lo

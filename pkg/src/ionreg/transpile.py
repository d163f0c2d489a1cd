"""Lowering of gate circuits to pulse schedules, and their simulation.

Only one ion can sit at the addressing site at a time, and the
entangling gate needs both ions at the gate site, so the schedule
interleaves pulses with ion transports.  ``lower`` translates gates to
pulses one by one; ``minimize_transports`` then regroups pulses that act
on different ions (they commute exactly) inside each entangling-gate /
barrier delimited block so that the number of transports is minimal.
``simulate`` executes a schedule under a :class:`~ionreg.noise.NoiseConfig`
and returns either analytic bright-state probabilities or a sampled
histogram.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations

import numpy as np

from .circuits import Circuit
from .gates import (
    MS_GATE_TIME,
    RABI_RATE_CONFIG1,
    RABI_RATE_CONFIG2,
    TRANSPORT_TIME,
    SQGateParams,
    ms_gate,
    r_phi,
    rz_sequence,
)
from .noise import (
    NoiseConfig,
    apply_spam_and_detect,
    derive_rng,
    exact_bright_probs,
    noisy_ms,
    noisy_sq_pulse,
)
from .qstate import ID4, SIGMA_Z, TwoQubitState, embed_single

TWO_PI = 2.0 * math.pi

#: transport targets: single-ion addressing sites and the two-ion gate site
TARGET_ION1 = "1"
TARGET_ION2 = "2"
TARGET_GATE = "gate"


class TranspileError(ValueError):
    """Raised for malformed programs or unlowerable circuits."""


@dataclass(frozen=True)
class SQPulse:
    """Single-qubit pulse: non-negative area ``theta`` about synthesizer phase ``phi_dds``."""

    ion: int
    theta: float
    phi_dds: float

    def __post_init__(self):
        if self.ion not in (1, 2):
            raise ValueError(f"ion must be 1 or 2, got {self.ion!r}")
        if not (math.isfinite(self.theta) and math.isfinite(self.phi_dds)):
            raise ValueError("pulse parameters must be finite")


@dataclass(frozen=True)
class MSPulse:
    """Entangling-gate pulse; parameters are fixed by the gate calibration."""


@dataclass(frozen=True)
class Transport:
    """Reconfiguration moving an ion to the addressing site or both to the gate site."""

    target: str

    def __post_init__(self):
        if self.target not in (TARGET_ION1, TARGET_ION2, TARGET_GATE):
            raise ValueError(f"transport target must be '1', '2' or 'gate', got {self.target!r}")


@dataclass(frozen=True)
class BarrierOp:
    """Scheduling fence: pulses never move across it."""


ProgramOp = SQPulse | MSPulse | Transport | BarrierOp


@dataclass(frozen=True)
class NativeProgram:
    """Immutable ordered pulse/transport schedule."""

    ops: tuple[ProgramOp, ...]

    def __init__(self, ops=()):
        ops = tuple(ops)
        for op in ops:
            if not isinstance(op, (SQPulse, MSPulse, Transport, BarrierOp)):
                raise ValueError(f"unsupported program op {op!r}")
        object.__setattr__(self, "ops", ops)

    def __iter__(self):
        return iter(self.ops)

    def __len__(self) -> int:
        return len(self.ops)

    def transport_count(self) -> int:
        return sum(1 for op in self.ops if isinstance(op, Transport))

    def duration(self, omega1: float = RABI_RATE_CONFIG1, omega2: float = RABI_RATE_CONFIG2) -> float:
        """Schedule length (s) from pulse areas, gate time and transport time."""
        total = 0.0
        for op in self.ops:
            if isinstance(op, SQPulse):
                total += abs(op.theta) / (omega1 if op.ion == 1 else omega2)
            elif isinstance(op, MSPulse):
                total += MS_GATE_TIME
            elif isinstance(op, Transport):
                total += TRANSPORT_TIME
        return total

    def to_json_obj(self) -> list[dict]:
        out = []
        for op in self.ops:
            if isinstance(op, SQPulse):
                out.append({"op": "sq_pulse", "ion": op.ion, "theta_rad": op.theta, "phi_dds_rad": op.phi_dds})
            elif isinstance(op, MSPulse):
                out.append({"op": "ms_pulse"})
            elif isinstance(op, Transport):
                out.append({"op": "transport", "target": op.target})
            else:
                out.append({"op": "barrier"})
        return out

    @classmethod
    def from_json_obj(cls, obj) -> "NativeProgram":
        ops: list[ProgramOp] = []
        for i, entry in enumerate(obj):
            kind = entry.get("op")
            if kind == "sq_pulse":
                ops.append(SQPulse(entry["ion"], entry["theta_rad"], entry["phi_dds_rad"]))
            elif kind == "ms_pulse":
                ops.append(MSPulse())
            elif kind == "transport":
                ops.append(Transport(entry["target"]))
            elif kind == "barrier":
                ops.append(BarrierOp())
            else:
                raise TranspileError(f"program entry {i}: unknown op {kind!r}")
        return cls(ops)


def validate_program(program: NativeProgram) -> None:
    """Check the transport discipline of a schedule.

    Every single-qubit pulse must be preceded by a transport to its ion
    with no other transport in between, and every entangling pulse by a
    transport to the gate site likewise.
    """
    config: str | None = None
    for i, op in enumerate(program):
        if isinstance(op, Transport):
            config = op.target
        elif isinstance(op, SQPulse):
            if config != str(op.ion):
                raise TranspileError(
                    f"op {i}: pulse on ion {op.ion} while configuration is {config!r}"
                )
        elif isinstance(op, MSPulse):
            if config != TARGET_GATE:
                raise TranspileError(
                    f"op {i}: entangling pulse while configuration is {config!r}"
                )


def _normalized_pulse(ion: int, theta: float, phi_logical: float, phi_offset: float) -> SQPulse:
    # negative areas are realized as positive areas about the opposite axis,
    # so physical pulse durations stay non-negative
    phi_dds = phi_logical - phi_offset
    if theta < 0.0:
        theta = -theta
        phi_dds += math.pi
    return SQPulse(ion, theta, phi_dds % TWO_PI)


def lower(circuit: Circuit, phi_offset: float = 0.0) -> NativeProgram:
    """Translate a gate circuit into a transport-correct pulse schedule.

    Axis angles are shifted by ``-phi_offset`` so that the physical axis
    (synthesizer phase plus frame offset) matches the logical one.
    z rotations become their three-pulse equatorial decomposition.
    Transports are inserted exactly where the addressing configuration
    changes; no reordering is performed here.
    """
    if not math.isfinite(phi_offset):
        raise TranspileError(f"phi_offset must be finite, got {phi_offset!r}")
    ops: list[ProgramOp] = []
    config: str | None = None

    def emit_sq(pulse: SQPulse):
        nonlocal config
        if config != str(pulse.ion):
            config = str(pulse.ion)
            ops.append(Transport(config))
        ops.append(pulse)

    for gate in circuit:
        if gate.kind == "rx":
            emit_sq(_normalized_pulse(gate.qubit, gate.theta, 0.0, phi_offset))
        elif gate.kind == "ry":
            emit_sq(_normalized_pulse(gate.qubit, gate.theta, 0.5 * math.pi, phi_offset))
        elif gate.kind == "rphi":
            emit_sq(_normalized_pulse(gate.qubit, gate.theta, gate.phi, phi_offset))
        elif gate.kind == "rz":
            for p in rz_sequence(gate.theta):
                emit_sq(_normalized_pulse(gate.qubit, p.theta, p.phi, phi_offset))
        elif gate.kind == "ms":
            if config != TARGET_GATE:
                config = TARGET_GATE
                ops.append(Transport(TARGET_GATE))
            ops.append(MSPulse())
        elif gate.kind == "barrier":
            ops.append(BarrierOp())
        else:  # pragma: no cover - Gate validation makes this unreachable
            raise TranspileError(f"cannot lower gate kind {gate.kind!r}")
    return NativeProgram(ops)


# --------------------------------------------------------------------------- #
# transport minimization

def _segments(program: NativeProgram):
    """Split into pulse blocks and delimiters, dropping existing transports."""
    segs: list[tuple] = []
    block: list[SQPulse] = []
    for op in program:
        if isinstance(op, SQPulse):
            block.append(op)
        elif isinstance(op, (MSPulse, BarrierOp)):
            segs.append(("block", block))
            segs.append(("ms",) if isinstance(op, MSPulse) else ("barrier",))
            block = []
        # transports are reconstructed later
    segs.append(("block", block))
    return segs


def _block_orderings(block: list[SQPulse]):
    """Candidate pulse orders: stable per-ion partitions, each ion group contiguous."""
    ions_in_order = []
    for p in block:
        if p.ion not in ions_in_order:
            ions_in_order.append(p.ion)
    by_ion = {ion: [p for p in block if p.ion == ion] for ion in ions_in_order}
    orderings = []
    for perm in permutations(ions_in_order):
        pulses = [p for ion in perm for p in by_ion[ion]]
        orderings.append((perm, pulses))
    if not orderings:
        orderings.append(((), []))
    return orderings


def minimize_transports(program: NativeProgram) -> NativeProgram:
    """Rebuild the schedule with the minimum number of transports.

    Within each block delimited by entangling pulses or barriers, pulses
    are stably partitioned by ion (order within an ion is preserved;
    pulses on distinct ions commute exactly).  The order of the ion
    groups is chosen by dynamic programming over the addressing
    configuration carried across blocks, which is optimal; ties prefer
    first-appearance order.  The operation is idempotent.
    """
    segs = _segments(program)
    # dp maps configuration after the processed prefix -> (cost, choice trail)
    dp: dict[str | None, tuple[int, tuple]] = {None: (0, ())}
    for seg in segs:
        new_dp: dict[str | None, tuple[int, tuple]] = {}

        def offer(cfg, cost, trail):
            best = new_dp.get(cfg)
            if best is None or cost < best[0]:
                new_dp[cfg] = (cost, trail)

        if seg[0] == "block":
            orderings = _block_orderings(seg[1])
            for entry_cfg, (entry_cost, trail) in dp.items():
                for choice_idx, (_, pulses) in enumerate(orderings):
                    cfg = entry_cfg
                    cost = entry_cost
                    for p in pulses:
                        if cfg != str(p.ion):
                            cfg = str(p.ion)
                            cost += 1
                    offer(cfg, cost, trail + (choice_idx,))
        elif seg[0] == "ms":
            for entry_cfg, (entry_cost, trail) in dp.items():
                cost = entry_cost + (0 if entry_cfg == TARGET_GATE else 1)
                offer(TARGET_GATE, cost, trail)
        else:  # barrier: configuration flows through unchanged
            new_dp = dict(dp)
        dp = new_dp

    final_cfg = min(dp, key=lambda c: (dp[c][0], str(c)))
    _, trail = dp[final_cfg]

    # replay the winning choices, emitting transports where needed
    ops: list[ProgramOp] = []
    cfg: str | None = None
    trail_iter = iter(trail)
    for seg in segs:
        if seg[0] == "block":
            orderings = _block_orderings(seg[1])
            _, pulses = orderings[next(trail_iter)]
            for p in pulses:
                if cfg != str(p.ion):
                    cfg = str(p.ion)
                    ops.append(Transport(cfg))
                ops.append(p)
        elif seg[0] == "ms":
            if cfg != TARGET_GATE:
                cfg = TARGET_GATE
                ops.append(Transport(TARGET_GATE))
            ops.append(MSPulse())
        else:
            ops.append(BarrierOp())
    return NativeProgram(ops)


def _interleavings(groups: list[list[SQPulse]]):
    """All merges of the per-ion pulse lists that preserve each list's order."""
    if not any(groups):
        yield []
        return
    for i, g in enumerate(groups):
        if g:
            rest = [list(x) for x in groups]
            head = rest[i].pop(0)
            for tail in _interleavings(rest):
                yield [head] + tail


def min_transports_bruteforce(program: NativeProgram, max_block: int = 8) -> int:
    """Exhaustive minimum transport count over all commuting reorderings.

    Considers every interleaving of the per-ion pulse subsequences within
    each block (not only contiguous partitions).  Exponential in block
    size; blocks larger than ``max_block`` raise.
    """
    segs = _segments(program)
    dp: dict[str | None, int] = {None: 0}
    for seg in segs:
        new_dp: dict[str | None, int] = {}

        def offer(cfg, cost):
            if cfg not in new_dp or cost < new_dp[cfg]:
                new_dp[cfg] = cost

        if seg[0] == "block":
            block = seg[1]
            if len(block) > max_block:
                raise ValueError(f"block of {len(block)} pulses is too large for brute force")
            groups = [[p for p in block if p.ion == ion] for ion in (1, 2)]
            variants = list(_interleavings(groups))
            for entry_cfg, entry_cost in dp.items():
                for pulses in variants:
                    cfg = entry_cfg
                    cost = entry_cost
                    for p in pulses:
                        if cfg != str(p.ion):
                            cfg = str(p.ion)
                            cost += 1
                    offer(cfg, cost)
        elif seg[0] == "ms":
            for entry_cfg, entry_cost in dp.items():
                offer(TARGET_GATE, entry_cost + (0 if entry_cfg == TARGET_GATE else 1))
        else:
            new_dp = dict(dp)
        dp = new_dp
    return min(dp.values())


# --------------------------------------------------------------------------- #
# execution

def program_unitary(program: NativeProgram) -> np.ndarray:
    """Ideal composed unitary of a schedule (transports and barriers are identity)."""
    u = ID4.copy()
    for op in program:
        if isinstance(op, SQPulse):
            u = embed_single(r_phi(op.theta, op.phi_dds), op.ion) @ u
        elif isinstance(op, MSPulse):
            u = ms_gate() @ u
    return u


def _transport_dephase(state: TwoQubitState, p: float) -> TwoQubitState:
    for ion in (1, 2):
        z = embed_single(SIGMA_Z, ion)
        rho = (1.0 - p) * state.density_matrix + p * (z @ state.density_matrix @ z)
        state = TwoQubitState(rho=rho, validate=False)
    return state


def run_program(
    program: NativeProgram,
    noise: NoiseConfig,
    omega1: float = RABI_RATE_CONFIG1,
    omega2: float = RABI_RATE_CONFIG2,
) -> TwoQubitState:
    """Execute a schedule on |uu> under the given noise and return the final state."""
    validate_program(program)
    has_ms = any(isinstance(op, MSPulse) for op in program)
    has_transport = any(isinstance(op, Transport) for op in program)
    state = TwoQubitState.up_up()
    if (noise.p_dep > 0 and has_ms) or (noise.p_transport_dephase > 0 and has_transport):
        state = state.as_mixed()
    for op in program:
        if isinstance(op, SQPulse):
            params = SQGateParams(op.theta, op.phi_dds, omega=omega1 if op.ion == 1 else omega2)
            state = state.apply(noisy_sq_pulse(op.ion, params, noise))
        elif isinstance(op, MSPulse):
            state = noisy_ms(state, noise)
        elif isinstance(op, Transport) and noise.p_transport_dephase > 0:
            state = _transport_dephase(state, noise.p_transport_dephase)
    return state


def simulate(
    program: NativeProgram,
    noise: NoiseConfig,
    mode: str = "exact",
    shots: int = 0,
    rng: np.random.Generator | None = None,
    omega1: float = RABI_RATE_CONFIG1,
    omega2: float = RABI_RATE_CONFIG2,
):
    """Run a schedule and detect.

    mode "exact" returns the analytic tuple (p2bright, p1bright,
    p0bright); mode "sampled" returns a :class:`BrightHistogram` of
    ``shots`` draws using ``rng`` (derived from the noise seed when not
    given).
    """
    if mode not in ("exact", "sampled"):
        raise ValueError(f"mode must be 'exact' or 'sampled', got {mode!r}")
    state = run_program(program, noise, omega1=omega1, omega2=omega2)
    if mode == "exact":
        return exact_bright_probs(state, noise)
    if rng is None:
        rng = derive_rng(noise.seed)
    return apply_spam_and_detect(state, noise, shots, rng)

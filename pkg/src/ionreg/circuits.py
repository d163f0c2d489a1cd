"""Gate-level circuit representation, text round-trip and ideal semantics.

A circuit is an ordered tuple of gates drawn from {Rx, Ry, Rz, Rphi, MS,
Barrier} acting on qubits labelled 1 and 2.  The text form is one gate
per line, e.g. ``RX q1 3.14159`` or ``RPHI q2 1.5708 0.3``; ``MS`` and
``BARRIER`` take no arguments.  Barriers carry no unitary; they only
fence reordering in the pulse scheduler.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gates import ms_gate, r_phi
from .qstate import ID4, embed_single

GATE_KINDS = ("rx", "ry", "rz", "rphi", "ms", "barrier")
_SINGLE_QUBIT_KINDS = ("rx", "ry", "rz", "rphi")


class CircuitParseError(ValueError):
    """Raised for malformed circuit text; the message names the bad line."""


@dataclass(frozen=True)
class Gate:
    kind: str
    qubit: int | None = None
    theta: float = 0.0
    phi: float = 0.0

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}; expected one of {GATE_KINDS}")
        if self.kind in _SINGLE_QUBIT_KINDS:
            if self.qubit not in (1, 2):
                raise ValueError(f"{self.kind} needs qubit 1 or 2, got {self.qubit!r}")
            if not math.isfinite(self.theta):
                raise ValueError(f"{self.kind} angle must be finite, got {self.theta!r}")
            if self.kind == "rphi" and not math.isfinite(self.phi):
                raise ValueError(f"rphi axis angle must be finite, got {self.phi!r}")
        else:
            if self.qubit is not None:
                raise ValueError(f"{self.kind} takes no qubit argument")


def rx(theta: float, qubit: int) -> Gate:
    return Gate("rx", qubit, theta)


def ry(theta: float, qubit: int) -> Gate:
    return Gate("ry", qubit, theta)


def rz(theta: float, qubit: int) -> Gate:
    return Gate("rz", qubit, theta)


def rphi(theta: float, phi: float, qubit: int) -> Gate:
    return Gate("rphi", qubit, theta, phi)


def ms() -> Gate:
    return Gate("ms")


def barrier() -> Gate:
    return Gate("barrier")


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered list of gates."""

    gates: tuple[Gate, ...]

    def __init__(self, gates=()):
        object.__setattr__(self, "gates", tuple(gates))
        for g in self.gates:
            if not isinstance(g, Gate):
                raise ValueError(f"circuit entries must be Gate instances, got {g!r}")

    def __iter__(self):
        return iter(self.gates)

    def __len__(self) -> int:
        return len(self.gates)

    def __getitem__(self, idx):
        return self.gates[idx]

    def __add__(self, other: "Circuit") -> "Circuit":
        return Circuit(self.gates + tuple(other))

    def ms_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "ms")


def parse_circuit(text: str) -> Circuit:
    """Parse circuit text; blank lines and ``#`` comments are ignored.

    Raises :class:`CircuitParseError` naming the first offending line.
    """
    gates: list[Gate] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        mnemonic = tokens[0].upper()

        def fail(msg: str):
            raise CircuitParseError(f"line {lineno}: {msg} (in {raw.strip()!r})")

        def parse_qubit(tok: str) -> int:
            if tok not in ("q1", "q2"):
                fail(f"expected qubit token 'q1' or 'q2', got {tok!r}")
            return int(tok[1])

        def parse_angle(tok: str, what: str) -> float:
            try:
                val = float(tok)
            except ValueError:
                fail(f"could not parse {what} {tok!r} as a number")
            if not math.isfinite(val):
                fail(f"{what} must be finite, got {tok!r}")
            return val

        if mnemonic in ("RX", "RY", "RZ"):
            if len(tokens) != 3:
                fail(f"{mnemonic} expects 'q<n> <angle>'")
            q = parse_qubit(tokens[1])
            theta = parse_angle(tokens[2], "rotation angle")
            gates.append(Gate(mnemonic.lower(), q, theta))
        elif mnemonic == "RPHI":
            if len(tokens) != 4:
                fail("RPHI expects 'q<n> <theta> <phi>'")
            q = parse_qubit(tokens[1])
            theta = parse_angle(tokens[2], "rotation angle")
            phi = parse_angle(tokens[3], "axis angle")
            gates.append(Gate("rphi", q, theta, phi))
        elif mnemonic == "MS":
            if len(tokens) != 1:
                fail("MS takes no arguments")
            gates.append(Gate("ms"))
        elif mnemonic == "BARRIER":
            if len(tokens) != 1:
                fail("BARRIER takes no arguments")
            gates.append(Gate("barrier"))
        else:
            fail(f"unknown gate mnemonic {tokens[0]!r}")
    return Circuit(gates)


def circuit_to_text(circuit: Circuit) -> str:
    """Render a circuit to its text form (full float precision, round-trips)."""
    lines = []
    for g in circuit:
        if g.kind in ("rx", "ry", "rz"):
            lines.append(f"{g.kind.upper()} q{g.qubit} {g.theta!r}")
        elif g.kind == "rphi":
            lines.append(f"RPHI q{g.qubit} {g.theta!r} {g.phi!r}")
        else:
            lines.append(g.kind.upper())
    return "\n".join(lines) + ("\n" if lines else "")


def _rz_matrix(theta: float) -> np.ndarray:
    return np.array([[np.exp(-0.5j * theta), 0.0], [0.0, np.exp(0.5j * theta)]])


def gate_unitary(gate: Gate) -> np.ndarray:
    """Ideal 4x4 unitary of a single gate (identity for barriers)."""
    if gate.kind == "rx":
        return embed_single(r_phi(gate.theta, 0.0), gate.qubit)
    if gate.kind == "ry":
        return embed_single(r_phi(gate.theta, 0.5 * math.pi), gate.qubit)
    if gate.kind == "rz":
        return embed_single(_rz_matrix(gate.theta), gate.qubit)
    if gate.kind == "rphi":
        return embed_single(r_phi(gate.theta, gate.phi), gate.qubit)
    if gate.kind == "ms":
        return ms_gate()
    if gate.kind == "barrier":
        return ID4.copy()
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def circuit_unitary(circuit: Circuit) -> np.ndarray:
    """Ideal composed 4x4 unitary of the whole circuit (first gate acts first)."""
    u = ID4.copy()
    for g in circuit:
        if g.kind == "barrier":
            continue
        u = gate_unitary(g) @ u
    return u

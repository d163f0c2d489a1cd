"""Circuit representation, text round-trip and ideal-unitary tests."""

import math

import numpy as np
import pytest

from ionreg import (
    Circuit,
    CircuitParseError,
    Gate,
    barrier,
    circuit_to_text,
    circuit_unitary,
    gate_unitary,
    ms,
    ms_gate,
    parse_circuit,
    r_phi,
    rphi,
    rx,
    ry,
    rz,
    embed_single,
    is_unitary,
)

from helpers import random_circuit


def test_gate_constructors():
    g = rx(1.5, 1)
    assert (g.kind, g.qubit, g.theta) == ("rx", 1, 1.5)
    g = rphi(0.4, 2.2, 2)
    assert (g.kind, g.qubit, g.theta, g.phi) == ("rphi", 2, 0.4, 2.2)
    assert ms().kind == "ms"
    assert barrier().kind == "barrier"


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate("rx", 3, 1.0)
    with pytest.raises(ValueError):
        Gate("ry", None, 1.0)
    with pytest.raises(ValueError):
        Gate("ms", 1)  # ms takes no qubit
    with pytest.raises(ValueError):
        Gate("hadamard", 1, 1.0)
    with pytest.raises(ValueError):
        Gate("rx", 1, math.nan)


def test_parse_simple_program():
    text = """
    # prepare a bell state
    RY q1 1.5707963267948966
    MS

    BARRIER
    RPHI q2 0.5 0.25
    RZ q1 -0.7
    """
    c = parse_circuit(text)
    kinds = [g.kind for g in c]
    assert kinds == ["ry", "ms", "barrier", "rphi", "rz"]
    assert c[0].qubit == 1
    assert c[3].theta == 0.5 and c[3].phi == 0.25
    assert c[4].theta == -0.7
    assert c.ms_count() == 1
    assert len(c) == 5


def test_parse_case_insensitive_mnemonics():
    c = parse_circuit("rx q1 1.0\nMs\nbArRiEr\n")
    assert [g.kind for g in c] == ["rx", "ms", "barrier"]


def test_parse_errors_name_the_line():
    with pytest.raises(CircuitParseError, match="line 1"):
        parse_circuit("RQ q1 1.0")
    with pytest.raises(CircuitParseError, match="line 3"):
        parse_circuit("RX q1 1.0\nRY q2 0.2\nRX q3 0.5")
    with pytest.raises(CircuitParseError, match="rotation angle"):
        parse_circuit("RX q1 abc")
    with pytest.raises(CircuitParseError, match="MS takes no arguments"):
        parse_circuit("MS q1")
    with pytest.raises(CircuitParseError, match="RPHI expects"):
        parse_circuit("RPHI q1 0.5")
    with pytest.raises(CircuitParseError, match="finite"):
        parse_circuit("RX q1 inf")


def test_text_round_trip_random_circuits():
    rng = np.random.default_rng(55)
    for _ in range(30):
        c = random_circuit(rng, int(rng.integers(0, 15)))
        text = circuit_to_text(c)
        back = parse_circuit(text)
        assert back == c
        # and the text itself is stable under a second round trip
        assert circuit_to_text(back) == text


def test_empty_circuit():
    c = parse_circuit("# nothing\n\n")
    assert len(c) == 0
    assert circuit_to_text(c) == ""
    assert np.allclose(circuit_unitary(c), np.eye(4))


def test_gate_unitaries():
    assert np.allclose(gate_unitary(rx(0.8, 1)), embed_single(r_phi(0.8, 0.0), 1))
    assert np.allclose(gate_unitary(ry(0.8, 2)), embed_single(r_phi(0.8, 0.5 * math.pi), 2))
    assert np.allclose(gate_unitary(rphi(0.8, 1.1, 1)), embed_single(r_phi(0.8, 1.1), 1))
    assert np.allclose(gate_unitary(ms()), ms_gate())
    assert np.allclose(gate_unitary(barrier()), np.eye(4))
    rz_mat = gate_unitary(rz(0.6, 2))
    diag = np.diag([np.exp(-0.3j), np.exp(0.3j)])
    assert np.allclose(rz_mat, embed_single(diag, 2))


def test_circuit_unitary_order():
    """First gate listed acts first on the state (rightmost in the product)."""
    c = Circuit([rx(0.5 * math.pi, 1), rz(0.5 * math.pi, 1)])
    u = circuit_unitary(c)
    expect = gate_unitary(rz(0.5 * math.pi, 1)) @ gate_unitary(rx(0.5 * math.pi, 1))
    assert np.max(np.abs(u - expect)) < 1e-14
    # the two gates do not commute, so the reversed product must differ
    other = gate_unitary(rx(0.5 * math.pi, 1)) @ gate_unitary(rz(0.5 * math.pi, 1))
    assert np.max(np.abs(u - other)) > 0.1


def test_circuit_unitary_is_unitary():
    rng = np.random.default_rng(77)
    for _ in range(20):
        c = random_circuit(rng, 10)
        assert is_unitary(circuit_unitary(c), tol=1e-10)


def test_circuit_concatenation():
    a = Circuit([rx(0.3, 1)])
    b = Circuit([ms(), ry(0.2, 2)])
    c = a + b
    assert len(c) == 3
    u = circuit_unitary(c)
    expect = circuit_unitary(b) @ circuit_unitary(a)
    assert np.max(np.abs(u - expect)) < 1e-12


def test_circuit_rejects_non_gates():
    with pytest.raises(ValueError):
        Circuit([rx(0.3, 1), "ms"])

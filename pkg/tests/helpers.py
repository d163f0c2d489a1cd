"""Shared utilities for the test suite: random unitaries, states, circuits."""

import numpy as np

from ionreg import Circuit, barrier, ms, rphi, rx, ry, rz


def random_unitary(rng, dim=2):
    """Haar-ish random unitary from the QR decomposition of a Ginibre matrix."""
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    # fix the phase convention so the distribution is well defined
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_pure_state(rng, dim=4):
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_hermitian(rng, dim=2):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return 0.5 * (z + z.conj().T)


def same_up_to_phase(u, v, tol=1e-9):
    """True if u = e^{i alpha} v for some global phase alpha."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape != v.shape:
        return False
    k = np.argmax(np.abs(v))
    idx = np.unravel_index(k, v.shape)
    if np.abs(u[idx]) < 1e-14:
        return bool(np.max(np.abs(u - v)) <= tol)
    phase = v[idx] / u[idx]
    if abs(abs(phase) - 1.0) > tol:
        return False
    return bool(np.max(np.abs(u * phase - v)) <= tol)


def random_circuit(rng, n_gates, allow_barrier=True):
    """Random circuit over the full gate alphabet, angles in (-2pi, 2pi)."""
    kinds = ["rx", "ry", "rz", "rphi", "ms"]
    if allow_barrier:
        kinds.append("barrier")
    gates = []
    for _ in range(n_gates):
        kind = kinds[rng.integers(0, len(kinds))]
        q = int(rng.integers(1, 3))
        theta = float(rng.uniform(-2.0 * np.pi, 2.0 * np.pi))
        phi = float(rng.uniform(0.0, 2.0 * np.pi))
        if kind == "rx":
            gates.append(rx(theta, q))
        elif kind == "ry":
            gates.append(ry(theta, q))
        elif kind == "rz":
            gates.append(rz(theta, q))
        elif kind == "rphi":
            gates.append(rphi(theta, phi, q))
        elif kind == "ms":
            gates.append(ms())
        else:
            gates.append(barrier())
    return Circuit(gates)

"""Gate-constructor tests against the eigendecomposition reference exponential."""

import math

import numpy as np
import pytest
from scipy import constants
from scipy.linalg import expm

from ionreg import (
    B_GRADIENT,
    ID4,
    MSGateParams,
    MicromotionParams,
    RABI_RATE_CONFIG1,
    RABI_RATE_CONFIG2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    SQGateParams,
    exp_hermitian,
    generalized_rabi,
    is_unitary,
    micromotion_amplitude_for_rate,
    micromotion_rabi_rate,
    ms_gate,
    r_phi,
    rz_sequence,
)

from helpers import same_up_to_phase

# off-resonant flip probability at delta = omega, t = pi/omega:
# (1/2) sin^2(pi/sqrt(2)), evaluated independently with mpmath
FLIP_PROB_EQUAL_DETUNING = 0.3165638355103539

# micromotion amplitude reproducing the config-1 Rabi rate at B' = 12 T/m,
# mu = one Bohr magneton (frozen from an independent evaluation)
R_MM_CONFIG1 = 3.7554075667927477e-07


def _axis_hamiltonian(phi):
    return math.cos(phi) * SIGMA_X + math.sin(phi) * SIGMA_Y


def test_r_phi_special_angles():
    rt = 1.0 / math.sqrt(2.0)
    x90 = np.array([[rt, -1j * rt], [-1j * rt, rt]])
    assert np.allclose(r_phi(0.5 * math.pi, 0.0), x90, atol=1e-15)
    y90 = np.array([[rt, -rt], [rt, rt]])
    assert np.allclose(r_phi(0.5 * math.pi, 0.5 * math.pi), y90, atol=1e-15)
    # pi pulse about x is -i sigma_x
    assert np.allclose(r_phi(math.pi, 0.0), -1j * SIGMA_X, atol=1e-15)


def test_r_phi_matches_reference_exponential():
    rng = np.random.default_rng(101)
    for _ in range(50):
        theta = rng.uniform(-4 * math.pi, 4 * math.pi)
        phi = rng.uniform(-2 * math.pi, 2 * math.pi)
        ref = exp_hermitian(_axis_hamiltonian(phi), 0.5 * theta)
        assert np.max(np.abs(r_phi(theta, phi) - ref)) < 1e-12
        assert is_unitary(r_phi(theta, phi))


def test_r_phi_composition_and_inverse():
    rng = np.random.default_rng(7)
    for _ in range(25):
        a, b = rng.uniform(-math.pi, math.pi, size=2)
        phi = rng.uniform(0, 2 * math.pi)
        combined = r_phi(b, phi) @ r_phi(a, phi)
        assert np.max(np.abs(combined - r_phi(a + b, phi))) < 1e-12
        inv = r_phi(-a, phi)
        assert np.max(np.abs(r_phi(a, phi) @ inv - np.eye(2))) < 1e-12


def test_generalized_rabi_reduces_to_r_phi_on_resonance():
    rng = np.random.default_rng(13)
    for _ in range(25):
        omega = rng.uniform(1e3, 1e5)
        t = rng.uniform(0, 5e-4)
        phi = rng.uniform(0, 2 * math.pi)
        u = generalized_rabi(omega, 0.0, phi, t)
        assert np.max(np.abs(u - r_phi(omega * t, phi))) < 1e-12


def test_generalized_rabi_matches_reference_exponential():
    rng = np.random.default_rng(17)
    for _ in range(50):
        omega = rng.uniform(0, 1e5)
        delta = rng.uniform(-1e5, 1e5)
        phi = rng.uniform(0, 2 * math.pi)
        t = rng.uniform(0, 1e-3)
        h = omega * _axis_hamiltonian(phi) + delta * SIGMA_Z
        ref = exp_hermitian(h, 0.5 * t)
        assert np.max(np.abs(generalized_rabi(omega, delta, phi, t) - ref)) < 1e-11


def test_generalized_rabi_flip_probability():
    """Off-resonant flip probability follows omega^2/W^2 sin^2(W t / 2)."""
    rng = np.random.default_rng(29)
    up = np.array([1.0, 0.0])
    for _ in range(40):
        omega = rng.uniform(1e3, 1e5)
        delta = rng.uniform(-1e5, 1e5)
        t = rng.uniform(0, 1e-3)
        u = generalized_rabi(omega, delta, 0.3, t)
        w = math.hypot(omega, delta)
        expect = (omega / w) ** 2 * math.sin(0.5 * w * t) ** 2
        assert abs(abs(u[1, 0]) ** 2 - expect) < 1e-12
    # frozen value: delta = omega, t = pi/omega -> (1/2) sin^2(pi/sqrt(2))
    omega = RABI_RATE_CONFIG1
    u = generalized_rabi(omega, omega, 0.0, math.pi / omega)
    assert abs(abs(u[1, 0]) ** 2 - FLIP_PROB_EQUAL_DETUNING) < 1e-12


def test_generalized_rabi_zero_drive():
    u = generalized_rabi(0.0, 0.0, 0.0, 1e-3)
    assert np.allclose(u, np.eye(2))
    # pure detuning gives a z rotation
    u = generalized_rabi(0.0, 2e4, 0.0, 1e-4)
    ref = expm(-1j * 0.5 * 2e4 * 1e-4 * SIGMA_Z)
    assert np.max(np.abs(u - ref)) < 1e-12


def test_ms_gate_matches_literal_exponent():
    """Closed form equals exp(-i sum_jk Phi_jk s_j s_k) evaluated numerically."""
    for phase in (0.0, 0.3, -1.1, 2.0):
        sx1 = np.kron(SIGMA_X, np.eye(2))
        sx2 = np.kron(np.eye(2), SIGMA_X)
        sy1 = np.kron(SIGMA_Y, np.eye(2))
        sy2 = np.kron(np.eye(2), SIGMA_Y)
        s1 = 0.5 * (math.cos(phase) * sx1 - math.sin(phase) * sy1)
        s2 = 0.5 * (math.cos(phase) * sx2 - math.sin(phase) * sy2)
        quarter = 0.5 * math.pi
        gen = quarter * (s1 @ s1 + s2 @ s2) - quarter * (s1 @ s2 + s2 @ s1)
        ref = expm(-1j * gen)
        got = ms_gate(MSGateParams(phi_red=phase, phi_blue=phase))
        assert np.max(np.abs(got - ref)) < 1e-12


def test_ms_gate_zero_phase_form():
    u = ms_gate()
    rt = 1.0 / math.sqrt(2.0)
    xx = np.kron(SIGMA_X, SIGMA_X)
    expect = np.exp(-1j * math.pi / 4) * rt * (ID4 + 1j * xx)
    assert np.max(np.abs(u - expect)) < 1e-14
    assert is_unitary(u)
    # square is the XX flip (up to the accumulated global phase)
    assert same_up_to_phase(u @ u, xx, tol=1e-12)


def test_ms_gate_fourth_power_identity():
    u = ms_gate()
    u4 = np.linalg.matrix_power(u, 4)
    assert np.max(np.abs(u4 - ID4)) < 1e-12


def test_ms_gate_bell_state():
    u = ms_gate()
    out = u @ np.array([1.0, 0.0, 0.0, 0.0])
    # |uu> -> (|uu> + e^{-i pi/2}|dd>)/sqrt(2) up to global phase
    p = np.abs(out) ** 2
    assert abs(p[0] - 0.5) < 1e-12
    assert abs(p[3] - 0.5) < 1e-12
    assert p[1] < 1e-14 and p[2] < 1e-14
    rel = out[3] / out[0]
    assert abs(rel - 1j) < 1e-12


def test_ms_gate_mean_phase_only():
    a = ms_gate(MSGateParams(phi_red=0.4, phi_blue=0.8))
    b = ms_gate(MSGateParams(phi_red=0.6, phi_blue=0.6))
    assert np.max(np.abs(a - b)) < 1e-14


def test_rz_sequence_composition():
    """Left-fold of the returned pulses reproduces exp(-i theta sz / 2)."""
    rng = np.random.default_rng(31)
    thetas = np.concatenate([rng.uniform(-2 * math.pi, 2 * math.pi, size=97), [0.0, math.pi, -math.pi]])
    for theta in thetas:
        u = np.eye(2, dtype=complex)
        for p in rz_sequence(theta):
            u = r_phi(p.theta, p.phi) @ u
        ref = expm(-1j * 0.5 * theta * SIGMA_Z)
        assert np.max(np.abs(u - ref)) < 1e-12


def test_rz_sequence_structure():
    seq = rz_sequence(0.7)
    assert len(seq) == 3
    assert seq[0].theta == -0.5 * math.pi and seq[0].phi == 0.5 * math.pi
    assert seq[1].theta == -0.7 and seq[1].phi == 0.0
    assert seq[2].theta == 0.5 * math.pi and seq[2].phi == 0.5 * math.pi


def test_sq_gate_params_validation():
    with pytest.raises(ValueError):
        SQGateParams(math.nan, 0.0)
    with pytest.raises(ValueError):
        SQGateParams(1.0, 0.0, omega=-5.0)
    with pytest.raises(ValueError):
        SQGateParams(1.0, 0.0, omega=1e4, t=2.0)  # theta != omega * t
    p = SQGateParams(1.0, 0.0, omega=1e4, t=1e-4)
    assert p.duration == 1e-4
    assert SQGateParams(2.0, 0.0, omega=1e4).duration == 2e-4
    assert SQGateParams(2.0, 0.0).duration is None


def test_ms_gate_params_validation():
    with pytest.raises(ValueError):
        MSGateParams(tau=0.0)
    with pytest.raises(ValueError):
        MSGateParams(phi_red=math.inf)
    assert MSGateParams(phi_red=0.2, phi_blue=0.6).mean_phase == pytest.approx(0.4)


def test_micromotion_rate_and_inverse():
    mu = constants.value("Bohr magneton")
    params = MicromotionParams(b_gradient=B_GRADIENT, r_mm=R_MM_CONFIG1, mu=mu)
    assert micromotion_rabi_rate(params) == pytest.approx(RABI_RATE_CONFIG1, rel=1e-12)
    # inverse round trip at several targets
    for target in (RABI_RATE_CONFIG1, RABI_RATE_CONFIG2, 123.456):
        r = micromotion_amplitude_for_rate(params, target)
        back = micromotion_rabi_rate(MicromotionParams(B_GRADIENT, r, mu))
        assert back == pytest.approx(target, rel=1e-12)
    assert micromotion_amplitude_for_rate(params, RABI_RATE_CONFIG1) == pytest.approx(
        R_MM_CONFIG1, rel=1e-12
    )


def test_micromotion_validation():
    with pytest.raises(ValueError):
        MicromotionParams(-1.0, 1e-7, 1e-23)
    params = MicromotionParams(12.0, 1e-7, 1e-23)
    with pytest.raises(ValueError):
        micromotion_amplitude_for_rate(params, -1.0)
    zero = MicromotionParams(0.0, 1e-7, 1e-23)
    with pytest.raises(ValueError):
        micromotion_amplitude_for_rate(zero, 1e4)

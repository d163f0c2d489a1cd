"""Closed-form constructors for the native gate set of the register.

All single-qubit rotations are driven on the micromotion sideband; the
rotation axis lives in the equatorial plane and is set by the drive
phase.  The entangling gate is a two-quadrature geometric-phase gate
that equals an XX(-pi/2) interaction when the mean sideband phase is
zero.  Constructors return plain complex ndarrays; the eigendecomposition
exponential in :mod:`ionreg.qstate` serves as the independent reference.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import constants as _const

from .qstate import ID2, ID4, SIGMA_X, SIGMA_Y, SIGMA_Z

TWO_PI = 2.0 * math.pi

#: measured carrier-free Rabi rates of the two addressing configurations (rad/s)
RABI_RATE_CONFIG1 = TWO_PI * 11.15e3
RABI_RATE_CONFIG2 = TWO_PI * 5.49e3

#: nominal entangling-gate duration (s) and sideband detuning (rad/s)
MS_GATE_TIME = 1150e-6
MS_DETUNING = TWO_PI * 1.82e3

#: nominal duration of one ion transport between trap sites (s)
TRANSPORT_TIME = 100e-6

#: static magnetic-field gradient along the trap axis (T/m)
B_GRADIENT = 12.0

#: tolerance for the theta = Omega * t consistency check
_AREA_TOL = 1e-9


@dataclass(frozen=True)
class SQGateParams:
    """Parameters of one single-qubit rotation pulse.

    ``theta`` is the pulse area (rad), ``phi`` the equatorial axis angle
    (rad).  ``omega`` (Rabi rate, rad/s) and ``t`` (duration, s) are
    optional metadata; when both are given they must satisfy
    theta = omega * t.  Negative areas are allowed at this level and are
    normalized away when a pulse schedule is generated.
    """

    theta: float
    phi: float
    omega: float | None = None
    t: float | None = None

    def __post_init__(self):
        for name in ("theta", "phi"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.omega is not None and not self.omega > 0:
            raise ValueError(f"omega must be positive, got {self.omega!r}")
        if self.omega is not None and self.t is not None:
            if abs(self.theta - self.omega * self.t) > _AREA_TOL:
                raise ValueError(
                    f"inconsistent pulse parameters: theta={self.theta!r} but "
                    f"omega*t={self.omega * self.t!r}"
                )

    @property
    def duration(self) -> float | None:
        """Signed pulse duration theta/omega (s), or the stored t."""
        if self.t is not None:
            return self.t
        if self.omega is not None:
            return self.theta / self.omega
        return None


@dataclass(frozen=True)
class MSGateParams:
    """Parameters of the two-quadrature entangling gate.

    ``tau`` and ``detuning`` are schedule metadata; the ideal unitary
    depends only on the mean of the red and blue sideband phases.
    """

    tau: float = MS_GATE_TIME
    detuning: float = MS_DETUNING
    phi_red: float = 0.0
    phi_blue: float = 0.0

    def __post_init__(self):
        if not self.tau > 0:
            raise ValueError(f"tau must be positive, got {self.tau!r}")
        for name in ("detuning", "phi_red", "phi_blue"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")

    @property
    def mean_phase(self) -> float:
        return 0.5 * (self.phi_red + self.phi_blue)


@dataclass(frozen=True)
class MicromotionParams:
    """Inputs of the micromotion-sideband Rabi-rate formula.

    b_gradient : magnetic-field gradient (T/m)
    r_mm       : micromotion amplitude of the ion (m)
    mu         : magnetic moment of the driven transition (J/T)
    hbar       : reduced Planck constant (J s); fixed physical constant
    """

    b_gradient: float
    r_mm: float
    mu: float
    hbar: float = _const.hbar

    def __post_init__(self):
        for name in ("b_gradient", "r_mm", "mu", "hbar"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be finite and non-negative, got {v!r}")


def r_phi(theta: float, phi: float) -> np.ndarray:
    """Equatorial rotation exp(-i (theta/2) (cos(phi) sx + sin(phi) sy)).

    phi = 0 is an x rotation, phi = pi/2 a y rotation.  Angles are
    unrestricted reals.
    """
    c = math.cos(0.5 * theta)
    s = math.sin(0.5 * theta)
    e = np.exp(1j * phi)
    return np.array([[c, -1j * s / e], [-1j * s * e, c]])


def generalized_rabi(omega: float, delta: float, phi: float, t: float) -> np.ndarray:
    """Evolution under an off-resonant drive for time ``t``.

    Returns exp(-i (t/2) (omega cos(phi) sx + omega sin(phi) sy + delta sz)).
    The flip probability out of |u> is (omega^2/W^2) sin^2(W t / 2) with
    W = sqrt(omega^2 + delta^2).
    """
    w = math.hypot(omega, delta)
    if w == 0.0:
        return ID2.copy()
    half = 0.5 * w * t
    c = math.cos(half)
    s = math.sin(half)
    nx = omega * math.cos(phi) / w
    ny = omega * math.sin(phi) / w
    nz = delta / w
    return c * ID2 - 1j * s * (nx * SIGMA_X + ny * SIGMA_Y + nz * SIGMA_Z)


def ms_gate(params: MSGateParams | None = None) -> np.ndarray:
    """Two-ion entangling gate as a 4x4 unitary.

    The generator is sum_{j,k} Phi_jk s^(j) s^(k) where s is half the
    equatorial quadrature operator picked by the mean sideband phase
    (with a relative minus sign on the y component) and Phi_jk is +pi/2
    for j = k and -pi/2 otherwise.  Because of the factor 1/2 inside s,
    the two j = k terms square to the identity and contribute only the
    overall phase exp(-i pi/4), while the two cross terms combine to
    exp(+i (pi/4) A x A) with A the unit-norm quadrature direction.  At
    zero mean phase this is exactly exp(-i pi/4) exp(+i (pi/4) sx x sx),
    i.e. an XX(-pi/2) rotation; its fourth power is the identity.
    """
    if params is None:
        params = MSGateParams()
    pb = params.mean_phase
    axis = math.cos(pb) * SIGMA_X - math.sin(pb) * SIGMA_Y
    aa = np.kron(axis, axis)
    quarter = 0.25 * math.pi
    return np.exp(-1j * quarter) * (math.cos(quarter) * ID4 + 1j * math.sin(quarter) * aa)


def rz_sequence(theta: float) -> list[SQGateParams]:
    """Three equatorial pulses realizing the z rotation exp(-i (theta/2) sz).

    Returned in execution order: a -pi/2 y rotation, a -theta x rotation,
    a +pi/2 y rotation.  Composing them in this order reproduces
    exp(-i (theta/2) sz) exactly; running the list backwards instead
    yields the inverse rotation, so the order is fixed by an explicit
    matrix test in the suite.
    """
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    half_pi = 0.5 * math.pi
    return [
        SQGateParams(-half_pi, half_pi),
        SQGateParams(-theta, 0.0),
        SQGateParams(half_pi, half_pi),
    ]


def micromotion_rabi_rate(params: MicromotionParams) -> float:
    """Rabi rate (rad/s) of the micromotion-sideband drive.

    Omega = (1/2) * (B' / sqrt(2)) * r_mm * mu / (2 hbar): the effective
    field seen by an ion oscillating with amplitude r_mm in the static
    gradient B', divided between the two sidebands.
    """
    return 0.5 * (params.b_gradient / math.sqrt(2.0)) * params.r_mm * params.mu / (2.0 * params.hbar)


def micromotion_amplitude_for_rate(params: MicromotionParams, omega_target: float) -> float:
    """Micromotion amplitude (m) that yields ``omega_target`` (rad/s).

    Inverts :func:`micromotion_rabi_rate` at fixed gradient and moment;
    the stored ``r_mm`` of ``params`` is ignored.
    """
    if not omega_target >= 0:
        raise ValueError(f"omega_target must be non-negative, got {omega_target!r}")
    slope = 0.5 * (params.b_gradient / math.sqrt(2.0)) * params.mu / (2.0 * params.hbar)
    if slope <= 0:
        raise ValueError("gradient and magnetic moment must both be positive to invert")
    return omega_target / slope

"""Noise model and global-fluorescence detection for the register.

The error channels are: ac-Zeeman shifts acting as z detunings during
single-qubit pulses (a 2x2 table indexed by addressing configuration and
ion), a residual drive on the non-addressed ion, per-ion SPAM flips
folded into detection, a depolarizing channel attached to the entangling
gate, a phase-reference offset between the logical frame and the pulse
synthesizer, and optional dephasing per transport.  Detection is global:
only the number of bright ions (0, 1 or 2) is resolved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .gates import RABI_RATE_CONFIG1, RABI_RATE_CONFIG2, SQGateParams, MSGateParams, generalized_rabi, ms_gate
from .qstate import ID4, TwoQubitState, embed_single

__all__ = [
    "NoiseConfig",
    "BrightHistogram",
    "derive_rng",
    "noisy_sq_pulse",
    "noisy_ms",
    "exact_bright_probs",
    "apply_spam_and_detect",
    "crosstalk_fidelity_model",
]

#: identifier of the pseudo-random generator recorded in output artifacts
RNG_ALGORITHM = "numpy-pcg64"


def derive_rng(master_seed: int, *indices: int) -> np.random.Generator:
    """Deterministic child generator for task ``indices`` under ``master_seed``."""
    entropy = [int(master_seed)] + [int(i) for i in indices]
    if any(e < 0 for e in entropy):
        raise ValueError(f"seeds and task indices must be non-negative, got {entropy}")
    return np.random.default_rng(np.random.SeedSequence(entropy))


@dataclass(frozen=True)
class NoiseConfig:
    """Full noise parameterization; all-zero defaults give the ideal device.

    Fields
    ------
    delta : ((d11, d12), (d21, d22))
        ac-Zeeman shifts in rad/s; ``delta[k-1][m-1]`` acts on ion m while
        configuration k addresses ion k.
    omega_na : float
        residual Rabi rate (rad/s) seen by the non-addressed ion.
    eps1, eps2 : float
        per-ion SPAM flip probabilities, applied once at detection.
    p_dep : float
        two-qubit depolarizing probability attached to each entangling gate.
    phi_offset : float
        physical axis angle = programmed axis angle + phi_offset (rad).
    seed : int
        master seed for sampled detection.
    p_transport_dephase : float
        per-ion phase-flip probability applied at each transport (default 0).
    """

    delta: tuple[tuple[float, float], tuple[float, float]] = ((0.0, 0.0), (0.0, 0.0))
    omega_na: float = 0.0
    eps1: float = 0.0
    eps2: float = 0.0
    p_dep: float = 0.0
    phi_offset: float = 0.0
    seed: int = 0
    p_transport_dephase: float = 0.0

    def __post_init__(self):
        d = tuple(tuple(float(x) for x in row) for row in self.delta)
        if len(d) != 2 or any(len(row) != 2 for row in d):
            raise ValueError("delta must be a 2x2 table of shifts")
        if not all(math.isfinite(x) for row in d for x in row):
            raise ValueError("delta entries must be finite")
        object.__setattr__(self, "delta", d)
        if not (math.isfinite(self.omega_na) and self.omega_na >= 0):
            raise ValueError(f"omega_na must be finite and >= 0, got {self.omega_na!r}")
        for name in ("eps1", "eps2", "p_dep", "p_transport_dephase"):
            v = getattr(self, name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"{name} must lie in [0, 1], got {v!r}")
        if not math.isfinite(self.phi_offset):
            raise ValueError(f"phi_offset must be finite, got {self.phi_offset!r}")
        if not (isinstance(self.seed, (int, np.integer)) and self.seed >= 0):
            raise ValueError(f"seed must be a non-negative integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))

    def zeeman_shift(self, config: int, ion: int) -> float:
        """Shift (rad/s) on ``ion`` while configuration ``config`` is active."""
        if config not in (1, 2) or ion not in (1, 2):
            raise ValueError("configuration and ion labels must be 1 or 2")
        return self.delta[config - 1][ion - 1]

    @property
    def p0(self) -> float:
        """Two-ion-bright probability of a freshly prepared register, (1-eps1)(1-eps2)."""
        return (1.0 - self.eps1) * (1.0 - self.eps2)

    def with_delta(self, delta) -> "NoiseConfig":
        return replace(self, delta=delta)

    # JSON field names carry explicit units (rad / rad/s) by suffix.
    def to_json_dict(self) -> dict:
        out = {
            "delta_rad_per_s": [list(row) for row in self.delta],
            "omega_na_rad_per_s": self.omega_na,
            "eps1": self.eps1,
            "eps2": self.eps2,
            "p_dep": self.p_dep,
            "phi_offset_rad": self.phi_offset,
            "seed": self.seed,
        }
        if self.p_transport_dephase != 0.0:
            out["p_transport_dephase"] = self.p_transport_dephase
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "NoiseConfig":
        known = {
            "delta_rad_per_s",
            "omega_na_rad_per_s",
            "eps1",
            "eps2",
            "p_dep",
            "phi_offset_rad",
            "seed",
            "p_transport_dephase",
        }
        extra = set(obj) - known
        if extra:
            raise ValueError(f"unknown noise fields: {sorted(extra)}")
        return cls(
            delta=tuple(tuple(row) for row in obj.get("delta_rad_per_s", ((0, 0), (0, 0)))),
            omega_na=obj.get("omega_na_rad_per_s", 0.0),
            eps1=obj.get("eps1", 0.0),
            eps2=obj.get("eps2", 0.0),
            p_dep=obj.get("p_dep", 0.0),
            phi_offset=obj.get("phi_offset_rad", 0.0),
            seed=obj.get("seed", 0),
            p_transport_dephase=obj.get("p_transport_dephase", 0.0),
        )


@dataclass(frozen=True)
class BrightHistogram:
    """Shot counts of the three global fluorescence outcomes."""

    shots: int
    n0: int
    n1: int
    n2: int

    def __post_init__(self):
        for name in ("shots", "n0", "n1", "n2"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and v >= 0):
                raise ValueError(f"{name} must be a non-negative integer, got {v!r}")
            object.__setattr__(self, name, int(v))
        if self.n0 + self.n1 + self.n2 != self.shots:
            raise ValueError(
                f"counts {self.n0}+{self.n1}+{self.n2} do not add up to shots={self.shots}"
            )

    @property
    def probs(self) -> tuple[float, float, float]:
        """Observed frequencies (f2, f1, f0), bright-count order matching exact_bright_probs."""
        if self.shots == 0:
            raise ValueError("empty histogram has no frequencies")
        return (self.n2 / self.shots, self.n1 / self.shots, self.n0 / self.shots)


def _default_rabi_rate(config: int) -> float:
    return RABI_RATE_CONFIG1 if config == 1 else RABI_RATE_CONFIG2


def noisy_sq_pulse(ion: int, params: SQGateParams, noise: NoiseConfig) -> np.ndarray:
    """4x4 unitary of one addressed pulse including coherent noise.

    The addressed ion ``ion`` sees the programmed drive detuned by its
    ac-Zeeman shift; the other ion sees the residual drive ``omega_na``
    and its own shift for the same duration.  The physical axis angle is
    ``params.phi + noise.phi_offset``.  With all noise terms zero, the
    result is exactly the embedded ideal rotation.
    """
    if ion not in (1, 2):
        raise ValueError(f"ion must be 1 or 2, got {ion!r}")
    other = 2 if ion == 1 else 1
    omega = params.omega if params.omega is not None else _default_rabi_rate(ion)
    t = params.t if params.t is not None else params.theta / omega
    phi = params.phi + noise.phi_offset
    u_addr = generalized_rabi(omega, noise.zeeman_shift(ion, ion), phi, t)
    u_spec = generalized_rabi(noise.omega_na, noise.zeeman_shift(ion, other), phi, t)
    return embed_single(u_addr, ion) @ embed_single(u_spec, other)


def depolarize(state: TwoQubitState, p: float) -> TwoQubitState:
    """Two-qubit depolarizing channel rho -> (1-p) rho + p I/4."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"depolarizing probability must lie in [0, 1], got {p!r}")
    if p == 0.0:
        return state
    rho = (1.0 - p) * state.density_matrix + p * (ID4 / 4.0)
    return TwoQubitState(rho=rho, validate=False)


def noisy_ms(state: TwoQubitState, noise: NoiseConfig, params: MSGateParams | None = None) -> TwoQubitState:
    """Apply the entangling gate followed by its depolarizing channel."""
    out = state.apply(ms_gate(params))
    return depolarize(out, noise.p_dep)


def _flip_matrix(eps1: float, eps2: float) -> np.ndarray:
    """4x4 stochastic matrix taking true basis populations to measured ones."""
    k1 = np.array([[1.0 - eps1, eps1], [eps1, 1.0 - eps1]])
    k2 = np.array([[1.0 - eps2, eps2], [eps2, 1.0 - eps2]])
    return np.kron(k1, k2)


def exact_bright_probs(state: TwoQubitState, noise: NoiseConfig) -> tuple[float, float, float]:
    """Analytic detection distribution (p2bright, p1bright, p0bright).

    Applies the per-ion SPAM flips to the true basis populations and bins
    by the number of bright ions.  The three entries sum to one.
    """
    q = _flip_matrix(noise.eps1, noise.eps2) @ state.populations()
    return (float(q[0]), float(q[1] + q[2]), float(q[3]))


def apply_spam_and_detect(
    state: TwoQubitState, noise: NoiseConfig, shots: int, rng: np.random.Generator
) -> BrightHistogram:
    """Sample a global-fluorescence histogram with SPAM flips applied.

    The measured joint outcome distribution is the SPAM-flipped basis
    distribution, so a single multinomial draw over the four (possibly
    flipped) outcomes is statistically exact.
    """
    if not (isinstance(shots, (int, np.integer)) and shots >= 0):
        raise ValueError(f"shots must be a non-negative integer, got {shots!r}")
    if shots == 0:
        return BrightHistogram(0, 0, 0, 0)
    q = _flip_matrix(noise.eps1, noise.eps2) @ state.populations()
    counts = rng.multinomial(shots, q / q.sum())
    return BrightHistogram(
        shots=int(shots),
        n0=int(counts[3]),
        n1=int(counts[1] + counts[2]),
        n2=int(counts[0]),
    )


def crosstalk_fidelity_model(n, c: float, p0: float):
    """Mean neighbor fidelity after ``n`` addressed pi pulses.

    F(n) = 1/2 * (1 + (2 p0 - 1) exp(-2 c n)); ``n`` may be an array.
    At n = 0 this equals p0, and it decays to 1/2 with rate constant c.
    """
    n = np.asarray(n, dtype=float)
    out = 0.5 * (1.0 + (2.0 * p0 - 1.0) * np.exp(-2.0 * c * n))
    if out.ndim == 0:
        return float(out)
    return out

"""Simulation, calibration, and benchmarking toolkit for a microwave-driven
two-ion register.

The package models a two-qubit trapped-ion register whose gates are
driven entirely by near-field microwaves: single-qubit rotations on an
individually addressed ion, an entangling gate, and the ion transports
between addressing configurations.  On top of the simulator sit the
standard characterization experiments (Rabi flopping, crosstalk
bounding, parity-scan phase calibration, cycle benchmarking, and a
detuning-landscape sensitivity sweep), a damped least-squares fitting
engine for their analyses, and a deterministic command-line runner.
"""

from .qstate import (
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    ID2,
    ID4,
    BASIS_LABELS,
    TwoQubitState,
    embed_single,
    exp_hermitian,
    is_hermitian,
    is_unitary,
)
from .gates import (
    RABI_RATE_CONFIG1,
    RABI_RATE_CONFIG2,
    MS_GATE_TIME,
    MS_DETUNING,
    TRANSPORT_TIME,
    B_GRADIENT,
    SQGateParams,
    MSGateParams,
    MicromotionParams,
    r_phi,
    generalized_rabi,
    ms_gate,
    rz_sequence,
    micromotion_rabi_rate,
    micromotion_amplitude_for_rate,
)
from .noise import (
    RNG_ALGORITHM,
    NoiseConfig,
    BrightHistogram,
    derive_rng,
    noisy_sq_pulse,
    depolarize,
    noisy_ms,
    exact_bright_probs,
    apply_spam_and_detect,
    crosstalk_fidelity_model,
)
from .circuits import (
    Circuit,
    CircuitParseError,
    Gate,
    barrier,
    circuit_to_text,
    circuit_unitary,
    gate_unitary,
    ms,
    parse_circuit,
    rphi,
    rx,
    ry,
    rz,
)
from .transpile import (
    BarrierOp,
    MSPulse,
    NativeProgram,
    SQPulse,
    Transport,
    TranspileError,
    lower,
    min_transports_bruteforce,
    minimize_transports,
    program_unitary,
    run_program,
    simulate,
    validate_program,
)
from .cycle_bench import (
    CBCircuit,
    CBConfig,
    CBRun,
    RecoveryError,
    compute_recovery_rotations,
    estimate_composite_fidelity,
    generate_cb_circuits,
    outcomes_from_json,
    outcomes_to_json,
    run_cycle_benchmark,
)
from .experiments import (
    CrosstalkData,
    PhaseCalibration,
    RabiFlopData,
    ShiftModel,
    SweepResult,
    calibrate_phase_offset,
    contour_points,
    crosstalk_per_gate,
    find_shift_scale,
    generate_crosstalk_sequence,
    has_closed_contour,
    local_maxima,
    parity,
    parity_from_bright_probs,
    parity_scan,
    rabi_flop_experiment,
    run_crosstalk_experiment,
    spectator_rate_for_crosstalk,
    zeeman_sweep,
)
from .fitting import (
    FitResult,
    NoCrossingError,
    SingularFitError,
    find_zero_crossing,
    fit_crosstalk_decay,
    fit_sine,
    least_squares_fit,
)
from .runconfig import ConfigError, RunConfig, load_config

__version__ = "0.1.0"

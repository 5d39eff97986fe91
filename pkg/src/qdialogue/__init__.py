"""Simulator and analysis toolkit for an entanglement-based quantum dialogue
protocol under an intercept-measure (disturbance) eavesdropping attack.

The package provides an exact two-qubit state engine (`quantum_core`), the
run choreography (`protocol`), pluggable eavesdropper models (`attacks`),
exact and Monte Carlo detection-probability analysis (`analysis`) and a CLI
(`qdialogue`) that reproduces the headline result: the disturbance attack is
caught in a control run with probability 1/2, not the commonly claimed 3/4.
"""

from .analysis import (
    CLAIMED_PER_RUN_RATE,
    CumulativeRow,
    DetectionStats,
    ExactResult,
    InsufficientSampleError,
    claim_comparison,
    cumulative_detection,
    exact_detection_probability,
    monte_carlo_detection,
    sweep_all_configs,
)
from .attacks import (
    AttackBranch,
    AttackModel,
    EveRecord,
    InterceptBasis,
    Leg,
    attack_from_tokens,
    basis_intercept,
    no_attack,
    z_basis_disturbance,
)
from .protocol import (
    ProtocolTranscript,
    RunConfig,
    RunMode,
    TraceStep,
    check_control,
    decode_peer,
    expected_outcome,
    run_protocol,
)
from .quantum_core import (
    BellLabel,
    MeasurementBranch,
    Parity,
    PauliEncoding,
    QubitSlot,
    TwoQubitState,
    apply_pauli,
    bell_state_vector,
    compose_pauli,
    measure_bell,
    measure_z,
    parity_of,
    pauli_on_bell,
    states_equal_up_to_phase,
    verify_pauli_bell_table,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BellLabel",
    "Parity",
    "PauliEncoding",
    "QubitSlot",
    "TwoQubitState",
    "MeasurementBranch",
    "bell_state_vector",
    "apply_pauli",
    "measure_z",
    "measure_bell",
    "parity_of",
    "pauli_on_bell",
    "compose_pauli",
    "states_equal_up_to_phase",
    "verify_pauli_bell_table",
    "Leg",
    "EveRecord",
    "AttackBranch",
    "AttackModel",
    "InterceptBasis",
    "no_attack",
    "z_basis_disturbance",
    "basis_intercept",
    "attack_from_tokens",
    "RunMode",
    "RunConfig",
    "ProtocolTranscript",
    "TraceStep",
    "expected_outcome",
    "decode_peer",
    "run_protocol",
    "check_control",
    "CLAIMED_PER_RUN_RATE",
    "DetectionStats",
    "ExactResult",
    "CumulativeRow",
    "InsufficientSampleError",
    "exact_detection_probability",
    "sweep_all_configs",
    "monte_carlo_detection",
    "cumulative_detection",
    "claim_comparison",
]

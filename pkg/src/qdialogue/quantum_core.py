"""Exact engine for two-qubit pure states: Bell basis, Pauli encodings,
projective measurements, and the label algebra they induce.

Basis convention, fixed everywhere including file output: amplitude index
k = 2*h + t encodes the basis state |h>_home |t>_travel, so

    0 <-> |0>_B|0>_A    1 <-> |0>_B|1>_A
    2 <-> |1>_B|0>_A    3 <-> |1>_B|1>_A

where the home qubit is the one Bob keeps and the travel qubit is the one
in transit. Global phase is unobservable: Bell-label results are phase-free
and state comparisons go through |<a|b>|.

Everything in this module is immutable after construction and every
operation is a pure function of its inputs, so values can be shared freely
between concurrent workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "NORM_TOL",
    "PRUNE_TOL",
    "BellLabel",
    "Parity",
    "QubitSlot",
    "PauliEncoding",
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
]

# Every probability in this protocol is a small dyadic rational, so these
# tolerances only have to absorb floating-point rounding.
NORM_TOL = 1e-9
PRUNE_TOL = 1e-12

_SQRT_HALF = math.sqrt(0.5)


class BellLabel(Enum):
    """The four Bell states, the public alphabet of preparations and outcomes.

    Enum values double as the wire/CLI token spellings.
    """

    PSI_MINUS = "psi-minus"
    PSI_PLUS = "psi-plus"
    PHI_MINUS = "phi-minus"
    PHI_PLUS = "phi-plus"


class Parity(Enum):
    """XOR of the two basis bits on every basis state a Bell label supports."""

    ODD = "odd"
    EVEN = "even"


class QubitSlot(Enum):
    """Which tensor factor an operation acts on."""

    HOME = "home"
    TRAVEL = "travel"


class PauliEncoding(Enum):
    """Dense-coding operation, identified with the 2-bit message it carries.

    The enum value is the message: high bit = bit flip (sigma_x factor), low
    bit = phase flip (sigma_z factor). So 00 is the identity, 01 is sigma_z,
    10 is sigma_x, 11 is i*sigma_y. The 01 <-> sigma_z pairing is pinned by
    requiring that encoding 01 turn psi- into psi+; the other assignments are
    convention, fixed here once. Each operation is self-inverse up to global
    phase.
    """

    IDENTITY = 0b00
    SIGMA_Z = 0b01
    SIGMA_X = 0b10
    I_SIGMA_Y = 0b11

    @property
    def bits(self) -> int:
        """The 2-bit message value carried by this operation."""
        return self.value

    @classmethod
    def from_bits(cls, bits: int) -> "PauliEncoding":
        if bits not in (0b00, 0b01, 0b10, 0b11):
            raise ValueError(f"message bits must be in 0..3, got {bits}")
        return cls(bits)


@dataclass(frozen=True, eq=False)
class TwoQubitState:
    """Normalized pure state of the (home, travel) pair.

    ``amps[2*h + t]`` is the amplitude of |h>_home |t>_travel. Amplitudes are
    validated (finite, unit norm within NORM_TOL) and frozen at construction.
    """

    amps: np.ndarray

    def __post_init__(self) -> None:
        arr = np.array(self.amps, dtype=np.complex128)
        if arr.shape != (4,):
            raise ValueError(f"expected 4 amplitudes, got shape {arr.shape}")
        norm_sq = float(np.vdot(arr, arr).real)
        # Inverted comparison so NaN amplitudes fail too (NaN <= tol is False).
        if not (abs(norm_sq - 1.0) <= NORM_TOL):
            if not np.all(np.isfinite(arr)):
                raise ValueError("amplitudes must be finite")
            raise ValueError(f"state is not normalized: sum |amp|^2 = {norm_sq}")
        arr.flags.writeable = False
        object.__setattr__(self, "amps", arr)


@dataclass(frozen=True, eq=False)
class MeasurementBranch:
    """One branch of a projective measurement.

    ``outcome`` is a Z bit (int) for single-qubit Z measurements and a
    BellLabel for Bell-basis measurements. Branches with probability below
    PRUNE_TOL are never emitted, and the probabilities of the branches
    returned by one measurement sum to 1 within NORM_TOL.
    """

    outcome: int | BellLabel
    probability: float
    post_state: TwoQubitState


_PAULI_1Q = {
    PauliEncoding.IDENTITY: np.array([[1, 0], [0, 1]], dtype=np.complex128),
    PauliEncoding.SIGMA_X: np.array([[0, 1], [1, 0]], dtype=np.complex128),
    PauliEncoding.I_SIGMA_Y: np.array([[0, 1], [-1, 0]], dtype=np.complex128),
    PauliEncoding.SIGMA_Z: np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# (slot, encoding) -> 4x4 joint operator, precomputed once for the hot loops.
_JOINT_OP: dict[tuple[QubitSlot, PauliEncoding], np.ndarray] = {}
for _enc, _m in _PAULI_1Q.items():
    _JOINT_OP[(QubitSlot.HOME, _enc)] = np.kron(_m, _PAULI_1Q[PauliEncoding.IDENTITY])
    _JOINT_OP[(QubitSlot.TRAVEL, _enc)] = np.kron(_PAULI_1Q[PauliEncoding.IDENTITY], _m)

_BELL_STATES = {
    BellLabel.PSI_MINUS: TwoQubitState(np.array([0.0, _SQRT_HALF, -_SQRT_HALF, 0.0])),
    BellLabel.PSI_PLUS: TwoQubitState(np.array([0.0, _SQRT_HALF, _SQRT_HALF, 0.0])),
    BellLabel.PHI_MINUS: TwoQubitState(np.array([_SQRT_HALF, 0.0, 0.0, -_SQRT_HALF])),
    BellLabel.PHI_PLUS: TwoQubitState(np.array([_SQRT_HALF, 0.0, 0.0, _SQRT_HALF])),
}

# Basis bit of index k for each slot: home bit = k >> 1, travel bit = k & 1.
# (slot, outcome) -> mask of indices collapsing to that outcome, precomputed.
_Z_MASKS = {
    (QubitSlot.HOME, 0): np.array([True, True, False, False]),
    (QubitSlot.HOME, 1): np.array([False, False, True, True]),
    (QubitSlot.TRAVEL, 0): np.array([True, False, True, False]),
    (QubitSlot.TRAVEL, 1): np.array([False, True, False, True]),
}
for _mask in _Z_MASKS.values():
    _mask.flags.writeable = False

_ODD_LABELS = frozenset({BellLabel.PSI_MINUS, BellLabel.PSI_PLUS})


def _clip01(p: float) -> float:
    return min(max(p, 0.0), 1.0)


def bell_state_vector(label: BellLabel) -> TwoQubitState:
    """Canonical amplitude vector for a Bell label (shared immutable instance)."""
    return _BELL_STATES[label]


def apply_pauli(state: TwoQubitState, slot: QubitSlot, enc: PauliEncoding) -> TwoQubitState:
    """Apply an encoding operation to one qubit: (P (x) 1) or (1 (x) P) on the amplitudes."""
    if enc is PauliEncoding.IDENTITY:
        return state
    return TwoQubitState(_JOINT_OP[(slot, enc)] @ state.amps)


def measure_z(state: TwoQubitState, slot: QubitSlot) -> list[MeasurementBranch]:
    """Projective measurement of one qubit in the computational basis B_z.

    Returns up to two branches with outcomes 0/1, Born-rule probabilities and
    renormalized collapsed post-states, in outcome order.
    """
    amps = state.amps
    branches = []
    for outcome in (0, 1):
        keep = _Z_MASKS[(slot, outcome)]
        raw = float(np.sum(np.abs(amps[keep]) ** 2))
        if raw < PRUNE_TOL:
            continue
        post = amps * keep / math.sqrt(raw)
        branches.append(MeasurementBranch(outcome, _clip01(raw), TwoQubitState(post)))
    return branches


def measure_bell(state: TwoQubitState) -> list[MeasurementBranch]:
    """Projective measurement in the Bell basis.

    Returns up to four branches labeled by BellLabel with probability
    |<Bell|state>|^2; the post-state of each branch is the canonical Bell
    vector for its label.
    """
    branches = []
    for label in BellLabel:
        bell = _BELL_STATES[label]
        raw = float(abs(np.vdot(bell.amps, state.amps)) ** 2)
        if raw < PRUNE_TOL:
            continue
        branches.append(MeasurementBranch(label, _clip01(raw), bell))
    return branches


def parity_of(label: BellLabel) -> Parity:
    """Parity of a Bell label: psi+- are odd (|01>,|10> support), phi+- even."""
    return Parity.ODD if label in _ODD_LABELS else Parity.EVEN


# How each encoding permutes the Bell labels when applied to either single
# qubit. Written out literally so the algebra is auditable; validated against
# the vector engine at import time and again in the test suite.
_PAULI_BELL_TABLE: dict[tuple[PauliEncoding, BellLabel], BellLabel] = {
    (PauliEncoding.IDENTITY, BellLabel.PSI_MINUS): BellLabel.PSI_MINUS,
    (PauliEncoding.IDENTITY, BellLabel.PSI_PLUS): BellLabel.PSI_PLUS,
    (PauliEncoding.IDENTITY, BellLabel.PHI_MINUS): BellLabel.PHI_MINUS,
    (PauliEncoding.IDENTITY, BellLabel.PHI_PLUS): BellLabel.PHI_PLUS,
    (PauliEncoding.SIGMA_Z, BellLabel.PSI_MINUS): BellLabel.PSI_PLUS,
    (PauliEncoding.SIGMA_Z, BellLabel.PSI_PLUS): BellLabel.PSI_MINUS,
    (PauliEncoding.SIGMA_Z, BellLabel.PHI_MINUS): BellLabel.PHI_PLUS,
    (PauliEncoding.SIGMA_Z, BellLabel.PHI_PLUS): BellLabel.PHI_MINUS,
    (PauliEncoding.SIGMA_X, BellLabel.PSI_MINUS): BellLabel.PHI_MINUS,
    (PauliEncoding.SIGMA_X, BellLabel.PSI_PLUS): BellLabel.PHI_PLUS,
    (PauliEncoding.SIGMA_X, BellLabel.PHI_MINUS): BellLabel.PSI_MINUS,
    (PauliEncoding.SIGMA_X, BellLabel.PHI_PLUS): BellLabel.PSI_PLUS,
    (PauliEncoding.I_SIGMA_Y, BellLabel.PSI_MINUS): BellLabel.PHI_PLUS,
    (PauliEncoding.I_SIGMA_Y, BellLabel.PSI_PLUS): BellLabel.PHI_MINUS,
    (PauliEncoding.I_SIGMA_Y, BellLabel.PHI_MINUS): BellLabel.PSI_PLUS,
    (PauliEncoding.I_SIGMA_Y, BellLabel.PHI_PLUS): BellLabel.PSI_MINUS,
}


def pauli_on_bell(enc: PauliEncoding, label: BellLabel) -> BellLabel:
    """The Bell label reached by applying ``enc`` to one qubit of ``label``.

    Single-qubit Paulis map Bell states to Bell states up to global phase,
    and the resulting label does not depend on which qubit is acted on.
    Implemented as a precomputed 16-entry lookup.
    """
    return _PAULI_BELL_TABLE[(enc, label)]


def compose_pauli(a: PauliEncoding, b: PauliEncoding) -> PauliEncoding:
    """The single encoding equivalent to applying ``b`` then ``a`` (up to phase).

    As label maps the encodings form a Klein four-group, which in the bits
    convention is XOR of the message values.
    """
    return PauliEncoding(a.bits ^ b.bits)


def states_equal_up_to_phase(a: TwoQubitState, b: TwoQubitState) -> bool:
    """True iff the states differ by at most an unobservable global phase."""
    return abs(np.vdot(a.amps, b.amps)) >= 1.0 - NORM_TOL


def verify_pauli_bell_table() -> list[tuple[PauliEncoding, BellLabel]]:
    """Cross-check the lookup table against the vector engine.

    Returns the list of (encoding, label) pairs whose table entry disagrees
    with applying the encoding to the travel qubit of the canonical vector;
    empty means the table and the engine agree on all 16 entries.
    """
    mismatches = []
    for enc in PauliEncoding:
        for label in BellLabel:
            moved = apply_pauli(bell_state_vector(label), QubitSlot.TRAVEL, enc)
            expected = bell_state_vector(_PAULI_BELL_TABLE[(enc, label)])
            if not states_equal_up_to_phase(moved, expected):
                mismatches.append((enc, label))
    return mismatches


_startup_mismatches = verify_pauli_bell_table()
if _startup_mismatches:
    raise RuntimeError(f"Pauli/Bell lookup table corrupt: {_startup_mismatches}")
del _startup_mismatches

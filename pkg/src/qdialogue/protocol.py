"""The dialogue run choreography.

One run: Bob prepares an EPR pair in a Bell state, encodes his message on
the travel qubit and sends it to Alice; Eve may act in transit; Alice
encodes her message and returns the qubit; Eve may act again; Bob measures
in the Bell basis and announces the outcome. Alice then either decodes
(message mode) or publishes her encoding so Bob can compare the announced
outcome against the expected one (control mode).

``run_protocol`` is a pure function of (config, attack, rng state) and
transcripts are immutable, so runs may execute concurrently as long as each
worker owns its own seeded random source.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .attacks import AttackModel, EveRecord, Leg
from .quantum_core import (
    BellLabel,
    PauliEncoding,
    QubitSlot,
    TwoQubitState,
    apply_pauli,
    bell_state_vector,
    measure_bell,
    pauli_on_bell,
)

__all__ = [
    "RunMode",
    "RunConfig",
    "ProtocolTranscript",
    "TraceStep",
    "expected_outcome",
    "decode_peer",
    "run_protocol",
    "check_control",
]


class RunMode(Enum):
    """Alice's post-announcement choice: exchange messages or check for Eve."""

    MESSAGE = "message"
    CONTROL = "control"


@dataclass(frozen=True)
class RunConfig:
    """Policies for one run.

    ``initial_policy``: None draws the preparation uniformly from the four
    Bell states and treats it as announced alongside the outcome (so both
    parties can decode); a BellLabel fixes the preparation, with PSI_MINUS
    reproducing the fixed-preparation variant of the protocol.

    ``bob_bits_policy`` / ``alice_bits_policy``: None draws the 2-bit message
    uniformly; an int in 0..3 fixes it.
    """

    cm_probability: float = 0.5
    initial_policy: BellLabel | None = None
    bob_bits_policy: int | None = None
    alice_bits_policy: int | None = None

    def __post_init__(self) -> None:
        if not (0.0 <= self.cm_probability <= 1.0):
            raise ValueError(f"cm_probability must be in [0, 1], got {self.cm_probability}")
        for name in ("bob_bits_policy", "alice_bits_policy"):
            bits = getattr(self, name)
            if bits is not None and bits not in (0, 1, 2, 3):
                raise ValueError(f"{name} must be None or in 0..3, got {bits}")


@dataclass(frozen=True)
class ProtocolTranscript:
    """Full public-plus-bookkeeping record of one run.

    ``expected_outcome`` and ``detected`` are populated only in control mode;
    the decoded bit fields only in message mode.
    """

    run_index: int
    mode: RunMode
    initial: BellLabel
    bob_enc: PauliEncoding
    alice_enc: PauliEncoding
    eve_records: tuple[EveRecord, ...]
    announced_outcome: BellLabel
    expected_outcome: BellLabel | None = None
    detected: bool | None = None
    alice_decoded_bits: int | None = None
    bob_decoded_bits: int | None = None


@dataclass(frozen=True, eq=False)
class TraceStep:
    """One annotated protocol step for trace output.

    ``state`` is the joint state after the step; ``probabilities`` records
    the exact branch distribution when the step involved a measurement,
    keyed by outcome token.
    """

    stage: str
    description: str
    state: TwoQubitState | None = None
    probabilities: dict[str, float] | None = None


_BELL_ORDER = tuple(BellLabel)


def expected_outcome(
    initial: BellLabel, bob_enc: PauliEncoding, alice_enc: PauliEncoding
) -> BellLabel:
    """The Bell label Bob must measure when nobody disturbed the travel qubit."""
    return pauli_on_bell(alice_enc, pauli_on_bell(bob_enc, initial))


def decode_peer(
    announced: BellLabel, initial: BellLabel, own_enc: PauliEncoding
) -> PauliEncoding:
    """Recover the peer's encoding from the announced outcome.

    Exhaustive search over the four candidates; the Pauli action on Bell
    labels is a regular group action, so exactly one fits.
    """
    for candidate in PauliEncoding:
        if pauli_on_bell(own_enc, pauli_on_bell(candidate, initial)) == announced:
            return candidate
    raise AssertionError("unreachable: Pauli action on Bell labels is regular")


def _sample_index(probabilities: list[float], rng: np.random.Generator) -> int:
    """Draw an index with the given probabilities; single branches skip the rng."""
    if len(probabilities) == 1:
        return 0
    u = float(rng.random())
    acc = 0.0
    for i, p in enumerate(probabilities):
        acc += p
        if u < acc:
            return i
    return len(probabilities) - 1


def _note(
    trace: list[TraceStep] | None,
    stage: str,
    description: str,
    state: TwoQubitState | None = None,
    probabilities: dict[str, float] | None = None,
) -> None:
    if trace is not None:
        trace.append(TraceStep(stage, description, state, probabilities))


def run_protocol(
    config: RunConfig,
    attack: AttackModel,
    rng: np.random.Generator,
    *,
    run_index: int = 0,
    trace: list[TraceStep] | None = None,
) -> ProtocolTranscript:
    """Execute one full run and return its transcript.

    Draw order is fixed (initial, Bob's bits, outbound attack branch, Alice's
    bits, return attack branch, Bell outcome, mode), so the result is
    deterministic given (config, attack, rng seed). Pass a list as ``trace``
    to collect annotated per-step states.
    """
    if config.initial_policy is None:
        initial = _BELL_ORDER[int(rng.integers(0, 4))]
    else:
        initial = config.initial_policy
    if config.bob_bits_policy is None:
        bob_enc = PauliEncoding(int(rng.integers(0, 4)))
    else:
        bob_enc = PauliEncoding(config.bob_bits_policy)

    state = bell_state_vector(initial)
    _note(trace, "prepare", f"Bob prepares the EPR pair in {initial.value}", state)

    state = apply_pauli(state, QubitSlot.TRAVEL, bob_enc)
    _note(
        trace,
        "bob-encode",
        f"Bob encodes {bob_enc.bits:02b} ({bob_enc.name.lower()}) on the travel qubit",
        state,
    )

    eve_records: list[EveRecord] = []
    state = _transit(attack, Leg.B_TO_A, state, rng, eve_records, trace)

    if config.alice_bits_policy is None:
        alice_enc = PauliEncoding(int(rng.integers(0, 4)))
    else:
        alice_enc = PauliEncoding(config.alice_bits_policy)
    state = apply_pauli(state, QubitSlot.TRAVEL, alice_enc)
    _note(
        trace,
        "alice-encode",
        f"Alice encodes {alice_enc.bits:02b} ({alice_enc.name.lower()}) on the travel qubit",
        state,
    )

    state = _transit(attack, Leg.A_TO_B, state, rng, eve_records, trace)

    branches = measure_bell(state)
    chosen = branches[_sample_index([b.probability for b in branches], rng)]
    announced = chosen.outcome
    assert isinstance(announced, BellLabel)
    _note(
        trace,
        "bell-measurement",
        f"Bob measures in the Bell basis and announces {announced.value}",
        chosen.post_state,
        {b.outcome.value: b.probability for b in branches},
    )

    control = float(rng.random()) < config.cm_probability
    if control:
        expected = expected_outcome(initial, bob_enc, alice_enc)
        return ProtocolTranscript(
            run_index=run_index,
            mode=RunMode.CONTROL,
            initial=initial,
            bob_enc=bob_enc,
            alice_enc=alice_enc,
            eve_records=tuple(eve_records),
            announced_outcome=announced,
            expected_outcome=expected,
            detected=announced != expected,
        )
    return ProtocolTranscript(
        run_index=run_index,
        mode=RunMode.MESSAGE,
        initial=initial,
        bob_enc=bob_enc,
        alice_enc=alice_enc,
        eve_records=tuple(eve_records),
        announced_outcome=announced,
        alice_decoded_bits=decode_peer(announced, initial, alice_enc).bits,
        bob_decoded_bits=decode_peer(announced, initial, bob_enc).bits,
    )


def _transit(
    attack: AttackModel,
    leg: Leg,
    state: TwoQubitState,
    rng: np.random.Generator,
    eve_records: list[EveRecord],
    trace: list[TraceStep] | None,
) -> TwoQubitState:
    """Send the travel qubit down one leg, sampling the attack's branch."""
    branches = attack.branches(leg, state)
    branch = branches[_sample_index([b.probability for b in branches], rng)]
    if branch.record is not None:
        eve_records.append(branch.record)
        _note(
            trace,
            f"transit-{leg.value}",
            f"Eve measures the travel qubit ({branch.record.basis_description}), "
            f"outcome {branch.record.outcome}, and forwards the collapsed state",
            branch.post_state,
            {str(b.record.outcome): b.probability for b in branches if b.record is not None},
        )
    else:
        _note(
            trace,
            f"transit-{leg.value}",
            "travel qubit forwarded undisturbed",
            branch.post_state,
        )
    return branch.post_state


def check_control(transcript: ProtocolTranscript) -> bool:
    """Bob's control-mode comparison; True means Eve was detected.

    Recomputes the expected outcome from the transcript rather than trusting
    the stored verdict. Rejects message-mode transcripts.
    """
    if transcript.mode is not RunMode.CONTROL:
        raise ValueError("check_control requires a control-mode transcript")
    expected = expected_outcome(
        transcript.initial, transcript.bob_enc, transcript.alice_enc
    )
    return transcript.announced_outcome != expected

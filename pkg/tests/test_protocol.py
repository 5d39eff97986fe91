"""Tests for the run choreography: encoding algebra, full runs, control checks."""

import itertools
import math

import numpy as np
import pytest

from qdialogue.attacks import Leg, no_attack, z_basis_disturbance
from qdialogue.protocol import (
    ProtocolTranscript,
    RunConfig,
    RunMode,
    check_control,
    decode_peer,
    expected_outcome,
    run_protocol,
)
from qdialogue.quantum_core import BellLabel, Parity, PauliEncoding, parity_of

ZB = z_basis_disturbance(frozenset({Leg.B_TO_A}))


def rng_for(seed):
    return np.random.default_rng(seed)


# --- expected_outcome ---------------------------------------------------------


def test_expected_outcome_no_ops():
    assert (
        expected_outcome(BellLabel.PSI_MINUS, PauliEncoding.IDENTITY, PauliEncoding.IDENTITY)
        is BellLabel.PSI_MINUS
    )


def test_expected_outcome_bob_sigma_z():
    assert (
        expected_outcome(BellLabel.PSI_MINUS, PauliEncoding.SIGMA_Z, PauliEncoding.IDENTITY)
        is BellLabel.PSI_PLUS
    )


def test_expected_outcome_composed():
    # sigma_x then i*sigma_y compose to sigma_z as label maps
    assert (
        expected_outcome(BellLabel.PSI_MINUS, PauliEncoding.SIGMA_X, PauliEncoding.I_SIGMA_Y)
        is BellLabel.PSI_PLUS
    )


# --- decode_peer ----------------------------------------------------------------


def test_decode_peer_bob_encoded_01():
    assert (
        decode_peer(BellLabel.PSI_PLUS, BellLabel.PSI_MINUS, PauliEncoding.IDENTITY)
        is PauliEncoding.SIGMA_Z
    )


@pytest.mark.parametrize("label", list(BellLabel))
def test_decode_peer_nothing_happened(label):
    assert decode_peer(label, label, PauliEncoding.IDENTITY) is PauliEncoding.IDENTITY


def test_decode_peer_with_own_sigma_x():
    assert (
        decode_peer(BellLabel.PHI_PLUS, BellLabel.PSI_MINUS, PauliEncoding.SIGMA_X)
        is PauliEncoding.SIGMA_Z
    )


def test_dense_coding_round_trip_exhaustive():
    for initial, bob_enc, alice_enc in itertools.product(BellLabel, PauliEncoding, PauliEncoding):
        announced = expected_outcome(initial, bob_enc, alice_enc)
        assert decode_peer(announced, initial, alice_enc) is bob_enc
        assert decode_peer(announced, initial, bob_enc) is alice_enc


# --- RunConfig validation ----------------------------------------------------------


def test_run_config_rejects_bad_cm_probability():
    with pytest.raises(ValueError):
        RunConfig(cm_probability=1.5)
    with pytest.raises(ValueError):
        RunConfig(cm_probability=-0.2)


def test_run_config_rejects_bad_bits():
    with pytest.raises(ValueError):
        RunConfig(bob_bits_policy=4)
    with pytest.raises(ValueError):
        RunConfig(alice_bits_policy=-1)


# --- run_protocol --------------------------------------------------------------------


def worked_config(alice_bits=0b00, cm=1.0):
    return RunConfig(
        cm_probability=cm,
        initial_policy=BellLabel.PSI_MINUS,
        bob_bits_policy=0b01,
        alice_bits_policy=alice_bits,
    )


def test_unattacked_worked_example():
    transcript = run_protocol(worked_config(), no_attack(), rng_for(0))
    assert transcript.mode is RunMode.CONTROL
    assert transcript.announced_outcome is BellLabel.PSI_PLUS
    assert transcript.detected is False
    assert transcript.expected_outcome is BellLabel.PSI_PLUS
    assert transcript.eve_records == ()


def test_unattacked_message_runs_decode_correctly():
    config = RunConfig(cm_probability=0.0)
    rng = rng_for(17)
    for i in range(300):
        t = run_protocol(config, no_attack(), rng, run_index=i)
        assert t.mode is RunMode.MESSAGE
        assert t.run_index == i
        assert t.alice_decoded_bits == t.bob_enc.bits
        assert t.bob_decoded_bits == t.alice_enc.bits
        assert t.expected_outcome is None
        assert t.detected is None


def test_attacked_worked_example_lands_in_phi():
    config = worked_config(alice_bits=0b10)
    counts = {BellLabel.PHI_PLUS: 0, BellLabel.PHI_MINUS: 0}
    n = 400
    for seed in range(n):
        t = run_protocol(config, ZB, rng_for(seed))
        assert t.announced_outcome in counts
        counts[t.announced_outcome] += 1
    # each outcome has probability 1/2; allow a 4 sigma band
    band = 4 * math.sqrt(0.25 * n)
    assert abs(counts[BellLabel.PHI_PLUS] - n / 2) <= band


def test_run_is_deterministic_given_seed():
    config = RunConfig(cm_probability=0.5)
    for seed in range(10):
        first = run_protocol(config, ZB, rng_for(seed))
        second = run_protocol(config, ZB, rng_for(seed))
        assert first == second


def test_mode_accounting():
    config = RunConfig(cm_probability=0.3)
    rng = rng_for(99)
    n = 4000
    controls = sum(
        run_protocol(config, no_attack(), rng, run_index=i).mode is RunMode.CONTROL
        for i in range(n)
    )
    band = 4 * math.sqrt(0.3 * 0.7 * n)
    assert abs(controls - 0.3 * n) <= band


def test_cm_probability_extremes():
    always = RunConfig(cm_probability=1.0)
    never = RunConfig(cm_probability=0.0)
    rng = rng_for(5)
    for i in range(50):
        assert run_protocol(always, no_attack(), rng).mode is RunMode.CONTROL
        assert run_protocol(never, no_attack(), rng).mode is RunMode.MESSAGE


def test_announced_parity_matches_final_state_support():
    config = RunConfig(cm_probability=0.5)
    for seed in range(150):
        steps = []
        t = run_protocol(config, ZB, rng_for(seed), trace=steps)
        pre_measurement = [s for s in steps if s.stage == "transit-a2b"][-1].state
        support = np.nonzero(np.abs(pre_measurement.amps) > 1e-9)[0]
        parities = {((k >> 1) ^ k) & 1 for k in support}
        assert len(parities) == 1
        expected_parity = Parity.ODD if parities == {1} else Parity.EVEN
        assert parity_of(t.announced_outcome) is expected_parity


def test_eve_records_at_most_one_per_leg():
    both = z_basis_disturbance(frozenset({Leg.B_TO_A, Leg.A_TO_B}))
    for seed in range(30):
        t = run_protocol(RunConfig(), both, rng_for(seed))
        legs = [r.leg for r in t.eve_records]
        assert len(legs) == len(set(legs))
        assert set(legs) == {Leg.B_TO_A, Leg.A_TO_B}


def test_trace_step_sequence():
    steps = []
    run_protocol(worked_config(), ZB, rng_for(1), trace=steps)
    assert [s.stage for s in steps] == [
        "prepare",
        "bob-encode",
        "transit-b2a",
        "alice-encode",
        "transit-a2b",
        "bell-measurement",
    ]
    assert all(s.state is not None for s in steps)


def test_random_initial_is_recorded_in_transcript():
    config = RunConfig(cm_probability=1.0)
    seen = set()
    rng = rng_for(23)
    for _ in range(200):
        seen.add(run_protocol(config, no_attack(), rng).initial)
    assert seen == set(BellLabel)


# --- check_control ----------------------------------------------------------------------


def make_transcript(mode, announced, expected=None, detected=None):
    return ProtocolTranscript(
        run_index=0,
        mode=mode,
        initial=BellLabel.PSI_MINUS,
        bob_enc=PauliEncoding.SIGMA_Z,
        alice_enc=PauliEncoding.IDENTITY,
        eve_records=(),
        announced_outcome=announced,
        expected_outcome=expected,
        detected=detected,
    )


def test_check_control_match_is_clean():
    t = make_transcript(RunMode.CONTROL, BellLabel.PSI_PLUS, BellLabel.PSI_PLUS, False)
    assert check_control(t) is False


def test_check_control_mismatch_detects():
    t = make_transcript(RunMode.CONTROL, BellLabel.PSI_MINUS, BellLabel.PSI_PLUS, True)
    assert check_control(t) is True
    t = make_transcript(RunMode.CONTROL, BellLabel.PHI_PLUS, BellLabel.PSI_PLUS, True)
    assert check_control(t) is True


def test_check_control_rejects_message_mode():
    t = make_transcript(RunMode.MESSAGE, BellLabel.PSI_PLUS)
    with pytest.raises(ValueError):
        check_control(t)


def test_check_control_agrees_with_stored_verdict():
    config = RunConfig(cm_probability=1.0)
    for seed in range(50):
        t = run_protocol(config, ZB, rng_for(seed))
        assert check_control(t) == t.detected

"""Tests for the eavesdropper models."""

import math

import numpy as np
import pytest

from qdialogue.attacks import (
    InterceptBasis,
    Leg,
    attack_from_tokens,
    basis_intercept,
    no_attack,
    z_basis_disturbance,
)
from qdialogue.quantum_core import (
    BellLabel,
    TwoQubitState,
    bell_state_vector,
    states_equal_up_to_phase,
)

BOTH_LEGS = frozenset({Leg.B_TO_A, Leg.A_TO_B})


def random_states(n, seed=2024):
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(n):
        vec = rng.normal(size=4) + 1j * rng.normal(size=4)
        out.append(TwoQubitState(vec / np.linalg.norm(vec)))
    return out


# --- no_attack ---------------------------------------------------------------


def test_no_attack_is_identity_on_both_legs():
    attack = no_attack()
    assert attack.active_legs == frozenset()
    assert attack.description == "none"
    state = bell_state_vector(BellLabel.PSI_PLUS)
    for leg in Leg:
        branches = attack.branches(leg, state)
        assert len(branches) == 1
        assert branches[0].probability == 1.0
        assert branches[0].post_state is state
        assert branches[0].record is None


# --- z_basis_disturbance -----------------------------------------------------


def test_z_basis_on_psi_plus_collapses_to_products():
    attack = z_basis_disturbance()
    branches = attack.branches(Leg.B_TO_A, bell_state_vector(BellLabel.PSI_PLUS))
    assert len(branches) == 2
    by_outcome = {b.record.outcome: b for b in branches}
    assert by_outcome[1].probability == pytest.approx(0.5, abs=1e-9)
    assert by_outcome[0].probability == pytest.approx(0.5, abs=1e-9)
    # outcome 1 -> |0>_B|1>_A, outcome 0 -> |1>_B|0>_A
    assert abs(by_outcome[1].post_state.amps[1]) == pytest.approx(1.0, abs=1e-9)
    assert abs(by_outcome[0].post_state.amps[2]) == pytest.approx(1.0, abs=1e-9)
    for b in branches:
        assert b.record.leg is Leg.B_TO_A
        assert b.record.basis_description == "B_z"


def test_z_basis_eigenstate_passes_through():
    attack = z_basis_disturbance()
    ket01 = TwoQubitState(np.eye(4)[1])
    branches = attack.branches(Leg.B_TO_A, ket01)
    assert len(branches) == 1
    assert branches[0].probability == pytest.approx(1.0, abs=1e-12)
    assert states_equal_up_to_phase(branches[0].post_state, ket01)


def test_z_basis_inactive_leg_untouched():
    attack = z_basis_disturbance(frozenset({Leg.B_TO_A}))
    state = bell_state_vector(BellLabel.PSI_PLUS)
    branches = attack.branches(Leg.A_TO_B, state)
    assert len(branches) == 1
    assert branches[0].post_state is state
    assert branches[0].record is None


def test_z_basis_requires_a_leg():
    with pytest.raises(ValueError):
        z_basis_disturbance(frozenset())


def test_z_basis_post_states_are_z_products():
    attack = z_basis_disturbance(BOTH_LEGS)
    for state in random_states(15):
        for leg in Leg:
            for branch in attack.branches(leg, state):
                magnitudes = np.abs(branch.post_state.amps)
                # travel bit is definite: support is confined to one column
                travel_bits = {k & 1 for k in np.nonzero(magnitudes > 1e-9)[0]}
                assert len(travel_bits) == 1
                assert travel_bits == {branch.record.outcome}


def test_z_basis_collapse_is_idempotent():
    attack = z_basis_disturbance()
    for state in random_states(10, seed=5):
        for first in attack.branches(Leg.B_TO_A, state):
            again = attack.branches(Leg.B_TO_A, first.post_state)
            assert len(again) == 1
            assert again[0].probability == pytest.approx(1.0, abs=1e-12)
            assert states_equal_up_to_phase(again[0].post_state, first.post_state)


def test_branch_probabilities_sum_to_one():
    for attack in (
        z_basis_disturbance(BOTH_LEGS),
        basis_intercept(InterceptBasis(0.7, 1.3), BOTH_LEGS),
    ):
        for state in random_states(10, seed=8):
            for leg in Leg:
                branches = attack.branches(leg, state)
                assert sum(b.probability for b in branches) == pytest.approx(1.0, abs=1e-9)
                for b in branches:
                    norm = float(np.vdot(b.post_state.amps, b.post_state.amps).real)
                    assert abs(norm - 1.0) <= 1e-9


# --- basis_intercept -----------------------------------------------------------


def test_theta_zero_reproduces_z_basis():
    zb = z_basis_disturbance()
    general = basis_intercept(InterceptBasis(0.0, 0.0))
    for state in random_states(15, seed=11):
        expected = zb.branches(Leg.B_TO_A, state)
        got = general.branches(Leg.B_TO_A, state)
        assert len(got) == len(expected)
        for g, e in zip(got, expected):
            assert g.record.outcome == e.record.outcome
            assert g.probability == pytest.approx(e.probability, abs=1e-12)
            assert states_equal_up_to_phase(g.post_state, e.post_state)


def test_theta_quarter_pi_on_psi_plus_splits_evenly():
    attack = basis_intercept(InterceptBasis(math.pi / 4, 0.0))
    branches = attack.branches(Leg.B_TO_A, bell_state_vector(BellLabel.PSI_PLUS))
    assert len(branches) == 2
    for b in branches:
        assert b.probability == pytest.approx(0.5, abs=1e-9)


def test_intercept_forwards_basis_eigenstate():
    basis = InterceptBasis(0.9, 2.0)
    attack = basis_intercept(basis)
    e0, e1 = basis.eigenvectors()
    for state in random_states(10, seed=21):
        for branch in attack.branches(Leg.B_TO_A, state):
            eig = (e0, e1)[branch.record.outcome]
            # post state factorizes with the travel qubit in the measured eigenstate
            m = branch.post_state.amps.reshape(2, 2)
            residual = m - np.outer(m @ eig.conj(), eig)
            assert np.max(np.abs(residual)) <= 1e-9


def test_intercept_basis_validates_angles():
    with pytest.raises(ValueError):
        InterceptBasis(-0.1, 0.0)
    with pytest.raises(ValueError):
        InterceptBasis(math.pi, 0.0)
    with pytest.raises(ValueError):
        InterceptBasis(0.3, 7.0)


def test_basis_intercept_requires_a_leg():
    with pytest.raises(ValueError):
        basis_intercept(InterceptBasis(0.1), frozenset())


# --- attack_from_tokens -----------------------------------------------------------


def test_parse_none():
    attack = attack_from_tokens("none", "both")
    assert attack.description == "none"
    assert attack.active_legs == frozenset()


@pytest.mark.parametrize(
    "legs,expected",
    [
        ("b2a", frozenset({Leg.B_TO_A})),
        ("a2b", frozenset({Leg.A_TO_B})),
        ("both", BOTH_LEGS),
    ],
)
def test_parse_z_basis_legs(legs, expected):
    attack = attack_from_tokens("z-basis", legs)
    assert attack.active_legs == expected


def test_parse_basis_with_angles():
    attack = attack_from_tokens("basis:theta=0.785398,phi=1.5", "b2a")
    assert attack.basis.theta == pytest.approx(0.785398)
    assert attack.basis.phi == pytest.approx(1.5)


def test_parse_basis_theta_only():
    attack = attack_from_tokens("basis:theta=0.2")
    assert attack.basis.phi == 0.0


@pytest.mark.parametrize(
    "attack,legs",
    [
        ("bogus", "b2a"),
        ("z-basis", "sideways"),
        ("basis:theta=abc", "b2a"),
        ("basis:phi=1.0", "b2a"),
        ("basis:gamma=1.0", "b2a"),
    ],
)
def test_parse_rejects_bad_tokens(attack, legs):
    with pytest.raises(ValueError):
        attack_from_tokens(attack, legs)

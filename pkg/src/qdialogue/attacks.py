"""Eavesdropper models acting on the travel qubit during transit.

An attack is expressed as a branch transformation of the joint state, so the
same model drives both exact probability enumeration and sampled runs. All
models are immutable and pure; the branch probabilities on any input sum to
1 within NORM_TOL and inactive legs pass the state through untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .quantum_core import PRUNE_TOL, QubitSlot, TwoQubitState, measure_z

__all__ = [
    "Leg",
    "EveRecord",
    "AttackBranch",
    "AttackModel",
    "InterceptBasis",
    "no_attack",
    "z_basis_disturbance",
    "basis_intercept",
    "attack_from_tokens",
]


class Leg(Enum):
    """Transit leg of the travel qubit: Bob to Alice, or Alice back to Bob."""

    B_TO_A = "b2a"
    A_TO_B = "a2b"


@dataclass(frozen=True)
class EveRecord:
    """What Eve learned on one leg: the basis she measured in and the outcome bit."""

    leg: Leg
    basis_description: str
    outcome: int


@dataclass(frozen=True, eq=False)
class AttackBranch:
    """One possible action outcome on a leg: probability, forwarded state, Eve's record."""

    probability: float
    post_state: TwoQubitState
    record: EveRecord | None = None


class AttackModel:
    """Base class for eavesdropper models.

    Subclasses implement ``_act`` for legs in ``active_legs``; any other leg
    yields the single identity branch.
    """

    description: str = "abstract"
    active_legs: frozenset[Leg] = frozenset()

    def branches(self, leg: Leg, state: TwoQubitState) -> list[AttackBranch]:
        if leg not in self.active_legs:
            return [AttackBranch(1.0, state, None)]
        return self._act(leg, state)

    def _act(self, leg: Leg, state: TwoQubitState) -> list[AttackBranch]:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.description!r})"


@dataclass(frozen=True)
class InterceptBasis:
    """Orthonormal single-qubit measurement basis, parameterized by two angles.

    The basis vectors are cos(theta)|0> + e^{i phi} sin(theta)|1> and
    sin(theta)|0> - e^{i phi} cos(theta)|1>; theta = phi = 0 reproduces B_z.
    """

    theta: float
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not (0.0 <= self.theta <= math.pi / 2):
            raise ValueError(f"theta must be in [0, pi/2], got {self.theta}")
        if not (0.0 <= self.phi < 2 * math.pi):
            raise ValueError(f"phi must be in [0, 2*pi), got {self.phi}")

    def eigenvectors(self) -> tuple[np.ndarray, np.ndarray]:
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return (
            np.array([c, e * s], dtype=np.complex128),
            np.array([s, -e * c], dtype=np.complex128),
        )


def _legs_token(legs: frozenset[Leg]) -> str:
    return "+".join(leg.value for leg in Leg if leg in legs)


class _NoAttack(AttackModel):
    """Identity on both legs; the unattacked baseline."""

    description = "none"
    active_legs = frozenset()


class _ZBasisDisturbance(AttackModel):
    """Measure the travel qubit in B_z on each active leg and forward the collapse."""

    def __init__(self, legs: frozenset[Leg]):
        self.active_legs = legs
        self.description = f"z-basis legs={_legs_token(legs)}"

    def _act(self, leg: Leg, state: TwoQubitState) -> list[AttackBranch]:
        return [
            AttackBranch(b.probability, b.post_state, EveRecord(leg, "B_z", b.outcome))
            for b in measure_z(state, QubitSlot.TRAVEL)
        ]


class _BasisIntercept(AttackModel):
    """Measure the travel qubit in an arbitrary basis on each active leg.

    A generalization of the B_z disturbance used for analysis curves; it is
    not part of the protocol's original threat model.
    """

    def __init__(self, basis: InterceptBasis, legs: frozenset[Leg]):
        self.basis = basis
        self.active_legs = legs
        self.description = (
            f"basis:theta={basis.theta:.12g},phi={basis.phi:.12g} legs={_legs_token(legs)}"
        )

    def _act(self, leg: Leg, state: TwoQubitState) -> list[AttackBranch]:
        # amps reshaped (home, travel); c[h] = <e_k|travel component given home h>
        m = state.amps.reshape(2, 2)
        desc = f"basis(theta={self.basis.theta:.12g},phi={self.basis.phi:.12g})"
        branches = []
        for k, e in enumerate(self.basis.eigenvectors()):
            c = m @ e.conj()
            raw = float(np.sum(np.abs(c) ** 2))
            if raw < PRUNE_TOL:
                continue
            post = np.outer(c, e).reshape(4) / math.sqrt(raw)
            branches.append(
                AttackBranch(
                    min(max(raw, 0.0), 1.0),
                    TwoQubitState(post),
                    EveRecord(leg, desc, k),
                )
            )
        return branches


def no_attack() -> AttackModel:
    """The do-nothing baseline: identity on both legs, no records."""
    return _NoAttack()


def z_basis_disturbance(legs: frozenset[Leg] = frozenset({Leg.B_TO_A})) -> AttackModel:
    """The disturbance attack: B_z measurement of the travel qubit on each active leg.

    The default single active leg is the outbound one, matching the narrated
    attack sequence; measuring the return leg as well is a configuration
    choice, not a different model.
    """
    legs = frozenset(legs)
    if not legs:
        raise ValueError("z_basis_disturbance requires at least one active leg")
    return _ZBasisDisturbance(legs)


def basis_intercept(
    basis: InterceptBasis, legs: frozenset[Leg] = frozenset({Leg.B_TO_A})
) -> AttackModel:
    """Intercept-resend in an arbitrary single-qubit basis on the active legs."""
    legs = frozenset(legs)
    if not legs:
        raise ValueError("basis_intercept requires at least one active leg")
    return _BasisIntercept(basis, legs)


_LEG_TOKENS = {
    "b2a": frozenset({Leg.B_TO_A}),
    "a2b": frozenset({Leg.A_TO_B}),
    "both": frozenset({Leg.B_TO_A, Leg.A_TO_B}),
}


def attack_from_tokens(attack: str, legs: str = "b2a") -> AttackModel:
    """Build an attack model from the CLI grammar.

    ``attack`` is one of ``none``, ``z-basis`` or
    ``basis:theta=<radians>,phi=<radians>``; ``legs`` is ``b2a``, ``a2b`` or
    ``both`` (ignored for ``none``). Raises ValueError on unknown tokens.
    """
    if legs not in _LEG_TOKENS:
        raise ValueError(f"unknown legs token {legs!r} (expected b2a, a2b or both)")
    leg_set = _LEG_TOKENS[legs]
    if attack == "none":
        return no_attack()
    if attack == "z-basis":
        return z_basis_disturbance(leg_set)
    if attack.startswith("basis:"):
        params = {}
        for part in attack[len("basis:"):].split(","):
            key, sep, value = part.partition("=")
            if not sep or key not in ("theta", "phi"):
                raise ValueError(f"bad basis parameter {part!r} in {attack!r}")
            try:
                params[key] = float(value)
            except ValueError:
                raise ValueError(f"bad numeric value {value!r} in {attack!r}") from None
        if "theta" not in params:
            raise ValueError(f"basis attack needs at least theta: {attack!r}")
        return basis_intercept(InterceptBasis(params["theta"], params.get("phi", 0.0)), leg_set)
    raise ValueError(f"unknown attack token {attack!r} (expected none, z-basis or basis:...)")

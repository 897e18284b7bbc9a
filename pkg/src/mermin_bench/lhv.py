"""Instruction-set hidden-variable models for the Mermin device.

An instruction state such as ``RRG`` fixes the colour each switch position
would produce. Both particles of a pair carry the same state, which is the
only way to get equal colours on equal settings every time.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from mermin_bench.quantum import (
    ALL_PAIRS,
    DIFFERENT_PAIRS,
    PROB_TOL,
    Color,
    Prob,
    Switch,
)


@dataclass(frozen=True)
class InstructionState:
    """Response colours to switches 1, 2 and 3, in that order."""

    letters: tuple[Color, Color, Color]

    def __post_init__(self) -> None:
        if len(self.letters) != 3 or not all(isinstance(c, Color) for c in self.letters):
            raise ValueError(f"need three colors, got {self.letters!r}")

    @classmethod
    def parse(cls, text: str) -> "InstructionState":
        if len(text) != 3:
            raise ValueError(f"instruction state must have three letters: {text!r}")
        return cls(tuple(Color.from_letter(ch) for ch in text))

    def color(self, s: Switch | int) -> Color:
        return self.letters[int(s) - 1]

    @property
    def is_uniform(self) -> bool:
        """True for RRR and GGG."""
        return len(set(self.letters)) == 1

    def __str__(self) -> str:
        return "".join(c.letter for c in self.letters)

    def __repr__(self) -> str:
        return f"InstructionState({str(self)!r})"

    def __lt__(self, other: "InstructionState") -> bool:
        return str(self) < str(other)


def enumerate_states() -> list[InstructionState]:
    """All eight instruction states, RRR first and GGG last."""
    return [
        InstructionState(letters)
        for letters in itertools.product((Color.RED, Color.GREEN), repeat=3)
    ]


ALL_STATES: tuple[InstructionState, ...] = tuple(enumerate_states())
TWO_EQUAL_STATES: tuple[InstructionState, ...] = tuple(
    s for s in ALL_STATES if not s.is_uniform
)


def lhv_color(state: InstructionState, s: Switch | int) -> Color:
    return state.color(s)


@dataclass(frozen=True)
class StateDistribution:
    """Probability weights over the eight instruction states."""

    weights: Mapping[InstructionState, Prob]

    def __post_init__(self) -> None:
        unknown = set(self.weights) - set(ALL_STATES)
        if unknown:
            raise ValueError(f"not instruction states: {unknown}")
        full = {s: self.weights.get(s, Fraction(0)) for s in ALL_STATES}
        if any(w < 0 for w in full.values()):
            raise ValueError("weights must be nonnegative")
        total = sum(full.values())
        if abs(total - 1) > PROB_TOL:
            raise ValueError(f"weights sum to {float(total)!r}, not 1")
        object.__setattr__(self, "weights", full)

    @classmethod
    def uniform(cls, states: Iterable[InstructionState] = ALL_STATES) -> "StateDistribution":
        states = list(states)
        return cls({s: Fraction(1, len(states)) for s in states})

    @classmethod
    def uniform_two_equal(cls) -> "StateDistribution":
        return cls.uniform(TWO_EQUAL_STATES)

    @classmethod
    def point_mass(cls, state: InstructionState | str) -> "StateDistribution":
        if isinstance(state, str):
            state = InstructionState.parse(state)
        return cls({state: Fraction(1)})

    @classmethod
    def from_weights(cls, weights: Sequence[float]) -> "StateDistribution":
        """Build from eight weights ordered as :func:`enumerate_states`."""
        if len(weights) != len(ALL_STATES):
            raise ValueError(f"expected 8 weights, got {len(weights)}")
        return cls(dict(zip(ALL_STATES, weights)))

    def vector(self) -> list[float]:
        return [float(self.weights[s]) for s in ALL_STATES]

    def mix(self, other: "StateDistribution", t: Prob) -> "StateDistribution":
        """The mixture (1 - t) * self + t * other."""
        return StateDistribution(
            {s: (1 - t) * self.weights[s] + t * other.weights[s] for s in ALL_STATES}
        )


def state_equal_color_fraction(state: InstructionState) -> Fraction:
    """Fraction of the six ordered different-setting pairs giving equal colours."""
    hits = sum(state.color(p.x) == state.color(p.y) for p in DIFFERENT_PAIRS)
    return Fraction(hits, len(DIFFERENT_PAIRS))


def equal_color_prob_diff_settings(d: StateDistribution) -> Prob:
    """Equal-colour probability on different settings under distribution ``d``."""
    terms = [d.weights[s] * state_equal_color_fraction(s) for s in ALL_STATES]
    if all(isinstance(t, Fraction) for t in terms):
        return sum(terms, Fraction(0))
    return math.fsum(float(t) for t in terms)


@dataclass(frozen=True)
class BoundReport:
    minimum: Fraction
    achieving_states: frozenset[InstructionState]


def mermin_lower_bound() -> BoundReport:
    """Minimum equal-colour probability over all state distributions.

    The objective is linear in the distribution, so the minimum over the
    simplex is attained at one of the eight point masses.
    """
    values = {
        s: equal_color_prob_diff_settings(StateDistribution.point_mass(s))
        for s in ALL_STATES
    }
    minimum = min(values.values())
    return BoundReport(
        minimum=minimum,
        achieving_states=frozenset(s for s, v in values.items() if v == minimum),
    )


def equal_settings_consistency(d: StateDistribution) -> bool:
    """Whether equal settings always give equal colours under ``d``.

    With one shared state per pair this always holds; the check is kept
    executable rather than assumed.
    """
    equal_pairs = [p for p in ALL_PAIRS if p.equal]
    prob = 0
    for s in ALL_STATES:
        agree = sum(s.color(p.x) == s.color(p.y) for p in equal_pairs)
        prob += d.weights[s] * Fraction(agree, len(equal_pairs))
    return abs(prob - 1) <= PROB_TOL

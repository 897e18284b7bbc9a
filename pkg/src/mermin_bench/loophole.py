"""State-dependent non-detection that lets instruction sets mimic 1/4.

A two-equal-letter particle (e.g. ``RGG``) is always detected when the
switch picks its odd letter, and with probability ``p`` when the switch
picks one of the doubled letters. ``RRR`` and ``GGG`` are detected with
probability ``q`` at any setting. Detection at X and Y is independent given
the shared state and the settings.

The headline quantity is the unconditional probability that both stations
fire and show equal colours, which equals (p**2 + q**2)/4 and hits 1/4 on
the circle p**2 + q**2 = 1. Conditioning on double detection gives a
different number; see :func:`conditional_equal_color_prob`.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from mermin_bench.lhv import ALL_STATES, InstructionState
from mermin_bench.quantum import DIFFERENT_PAIRS, Switch

SQRT3_OVER_2 = math.sqrt(3.0) / 2.0


class StateClass(enum.Enum):
    TWO_EQUAL = "two-equal"
    THREE_EQUAL = "three-equal"

    @classmethod
    def of(cls, state: InstructionState) -> "StateClass":
        return cls.THREE_EQUAL if state.is_uniform else cls.TWO_EQUAL


@dataclass(frozen=True)
class DetectionModel:
    p: float
    q: float

    def __post_init__(self) -> None:
        for name in ("p", "q"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and 0.0 <= value <= 1.0):
                raise ValueError(f"{name} must be a probability in [0, 1], got {value!r}")

    @classmethod
    def quantum_matching(cls) -> "DetectionModel":
        return cls(SQRT3_OVER_2, 0.5)


def detect_prob(state: InstructionState, s: Switch | int, m: DetectionModel) -> float:
    """Probability that a particle in ``state`` fires a detector set to ``s``."""
    if state.is_uniform:
        return m.q
    letter = state.color(s)
    doubled = sum(c == letter for c in state.letters) == 2
    return m.p if doubled else 1.0


def equal_color_and_detected_prob(m: DetectionModel) -> float:
    """P(both detect and colours agree), uniform states, different settings."""
    return (m.p * m.p + m.q * m.q) / 4.0


def per_class_equal_color_prob(c: StateClass, m: DetectionModel) -> float:
    """Same event as :func:`equal_color_and_detected_prob` within one class."""
    if c is StateClass.TWO_EQUAL:
        # equal letters on 2 of the 6 ordered pairs, both at doubled positions
        return m.p * m.p / 3.0
    return m.q * m.q


def both_detected_prob(m: DetectionModel) -> float:
    """P(both stations fire), uniform states, different settings."""
    return (m.q * m.q + m.p * m.p + 2.0 * m.p) / 4.0


def conditional_equal_color_prob(m: DetectionModel) -> float:
    """P(equal colours | both fire) on different settings.

    At the quantum-matching point this is about 0.366, not 1/4.

    Raises:
        ZeroDivisionError: if double detection has probability zero.
    """
    return equal_color_and_detected_prob(m) / both_detected_prob(m)


def _enumerate(m: DetectionModel) -> tuple[float, float]:
    """Sum over states, ordered different pairs and detection outcomes.

    Returns (P(both detected and equal colours), P(both detected)).
    """
    equal_terms: list[float] = []
    detected_terms: list[float] = []
    state_weight = 1.0 / len(ALL_STATES)
    pair_weight = 1.0 / len(DIFFERENT_PAIRS)
    for state in ALL_STATES:
        for pair in DIFFERENT_PAIRS:
            dx = detect_prob(state, pair.x, m)
            dy = detect_prob(state, pair.y, m)
            for fired_x in (True, False):
                for fired_y in (True, False):
                    w = (dx if fired_x else 1.0 - dx) * (dy if fired_y else 1.0 - dy)
                    if not (fired_x and fired_y):
                        continue
                    w *= state_weight * pair_weight
                    detected_terms.append(w)
                    if state.color(pair.x) == state.color(pair.y):
                        equal_terms.append(w)
    return math.fsum(equal_terms), math.fsum(detected_terms)


def brute_force_equal_color(m: DetectionModel) -> float:
    """Enumeration oracle for :func:`equal_color_and_detected_prob`."""
    return _enumerate(m)[0]


def brute_force_both_detected(m: DetectionModel) -> float:
    """Enumeration oracle for :func:`both_detected_prob`."""
    return _enumerate(m)[1]

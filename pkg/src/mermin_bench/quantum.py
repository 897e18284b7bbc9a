"""Quantum predictions for the three-setting, two-detector Mermin device.

Each detector holds a Stern-Gerlach magnet that the switch orients at 0 or
+/-120 degrees in the plane perpendicular to the flight line. Red and green
lights stand for the two spin outcomes. Detector Y's color map is flipped
relative to the raw spin, so a singlet pair measured along equal axes
(perfectly anticorrelated spins) shows equal colors.

Probabilities are returned as ``Fraction`` whenever the closed form is
rational, and as ``float`` otherwise.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, NamedTuple, Sequence, Union

Prob = Union[Fraction, float]

#: Absolute tolerance for probability sums and comparisons.
PROB_TOL = 1e-12


class Switch(enum.IntEnum):
    """Switch position on a detector."""

    ONE = 1
    TWO = 2
    THREE = 3


class Color(enum.Enum):
    """Light color; ``value`` is the +/-1 outcome it encodes."""

    RED = 1
    GREEN = -1

    @property
    def letter(self) -> str:
        return self.name[0]

    @classmethod
    def from_letter(cls, letter: str) -> "Color":
        try:
            return {"R": cls.RED, "G": cls.GREEN}[letter.upper()]
        except KeyError:
            raise ValueError(f"unknown color letter {letter!r}") from None


#: Joint outcome keys in canonical order: (color at X, color at Y).
OUTCOMES: tuple[tuple[Color, Color], ...] = (
    (Color.RED, Color.RED),
    (Color.RED, Color.GREEN),
    (Color.GREEN, Color.RED),
    (Color.GREEN, Color.GREEN),
)


class SettingPair(NamedTuple):
    x: Switch
    y: Switch

    @classmethod
    def of(cls, x: int, y: int) -> "SettingPair":
        return cls(Switch(x), Switch(y))

    @property
    def equal(self) -> bool:
        return self.x == self.y

    def swapped(self) -> "SettingPair":
        return SettingPair(self.y, self.x)

    def __str__(self) -> str:
        return f"{int(self.x)}{int(self.y)}"


ALL_PAIRS: tuple[SettingPair, ...] = tuple(
    SettingPair(x, y) for x in Switch for y in Switch
)
DIFFERENT_PAIRS: tuple[SettingPair, ...] = tuple(p for p in ALL_PAIRS if not p.equal)


@dataclass(frozen=True)
class ProbTable:
    """Joint distribution over the four colour outcomes of one setting pair."""

    entries: Mapping[tuple[Color, Color], Prob]

    def __post_init__(self) -> None:
        missing = set(OUTCOMES) - set(self.entries)
        if missing:
            raise ValueError(f"missing outcomes: {sorted(_key_str(k) for k in missing)}")
        for key, value in self.entries.items():
            if not -PROB_TOL <= value <= 1 + PROB_TOL:
                raise ValueError(f"P({_key_str(key)}) = {value} outside [0, 1]")
        total = sum(self.entries.values())
        if abs(total - 1) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total}, not 1")

    def __getitem__(self, key: tuple[Color, Color] | str) -> Prob:
        if isinstance(key, str):
            key = (Color.from_letter(key[0]), Color.from_letter(key[1]))
        return self.entries[key]

    def same_color(self) -> Prob:
        return self["RR"] + self["GG"]

    def transposed(self) -> "ProbTable":
        return ProbTable({(cy, cx): v for (cx, cy), v in self.entries.items()})

    def as_dict(self) -> dict[str, Prob]:
        return {_key_str(k): self.entries[k] for k in OUTCOMES}


def _key_str(key: tuple[Color, Color]) -> str:
    return key[0].letter + key[1].letter


def normalize_degrees(degrees: float) -> float:
    """Map an angle onto (-180, 180]."""
    d = math.fmod(degrees, 360.0)
    if d <= -180.0:
        d += 360.0
    elif d > 180.0:
        d -= 360.0
    return d


_SWITCH_DEGREES = {Switch.ONE: 0.0, Switch.TWO: 120.0, Switch.THREE: -120.0}


def switch_angle(s: Switch | int) -> float:
    """Magnet orientation in degrees from the vertical for switch ``s``."""
    return _SWITCH_DEGREES[Switch(s)]


# cos(delta) for the angles where it is rational
_RATIONAL_COS = {
    0.0: Fraction(1),
    60.0: Fraction(1, 2),
    90.0: Fraction(0),
    120.0: Fraction(-1, 2),
    180.0: Fraction(-1),
}


def _cos2_half(delta_degrees: float) -> Prob:
    """cos^2(delta/2) = (1 + cos delta)/2, exact where cos delta is rational."""
    delta = abs(normalize_degrees(delta_degrees))
    if delta in _RATIONAL_COS:
        return (1 + _RATIONAL_COS[delta]) / 2
    return math.cos(math.radians(delta) / 2) ** 2


def raw_singlet_same_outcome_prob(a: float, b: float) -> Prob:
    """Probability that raw spin outcomes along ``a`` and ``b`` agree.

    For the singlet this is sin^2(delta/2); along a common axis the two
    spins are always opposite, so the result is exactly 0.
    """
    return 1 - _cos2_half(b - a)


def quantum_joint_probs(pair: SettingPair) -> ProbTable:
    """Quantum joint colour distribution for a pair of switch settings."""
    same = _cos2_half(switch_angle(pair.y) - switch_angle(pair.x))
    diff = 1 - same
    return ProbTable(
        {
            (Color.RED, Color.RED): same / 2,
            (Color.GREEN, Color.GREEN): same / 2,
            (Color.RED, Color.GREEN): diff / 2,
            (Color.GREEN, Color.RED): diff / 2,
        }
    )


def same_color_prob(pair: SettingPair) -> Prob:
    return quantum_joint_probs(pair).same_color()


def reference_table(pair: SettingPair) -> ProbTable:
    """The published outcome table, hard-coded with no angle arithmetic.

    Kept as an independent check on :func:`quantum_joint_probs`.
    """
    if pair.equal:
        rr, rg = Fraction(1, 2), Fraction(0)
    else:
        rr, rg = Fraction(1, 8), Fraction(3, 8)
    return ProbTable(
        {
            (Color.RED, Color.RED): rr,
            (Color.GREEN, Color.GREEN): rr,
            (Color.RED, Color.GREEN): rg,
            (Color.GREEN, Color.RED): rg,
        }
    )


def mixture_effect_prob(weights: Sequence[Prob], effect_probs: Sequence[Prob]) -> Prob:
    """Probability of a randomized effect: choose effect i with weight w_i.

    Additivity requires P(E) = sum_i w_i P(E_i).

    Raises:
        ValueError: if the sequences differ in length, a weight is negative,
            a probability is outside [0, 1], or the weights do not sum to 1.
    """
    if len(weights) != len(effect_probs):
        raise ValueError(
            f"got {len(weights)} weights but {len(effect_probs)} effect probabilities"
        )
    if not weights:
        raise ValueError("empty mixture")
    if any(w < 0 for w in weights):
        raise ValueError("weights must be nonnegative")
    if any(not 0 <= p <= 1 for p in effect_probs):
        raise ValueError("effect probabilities must lie in [0, 1]")
    values = list(weights) + list(effect_probs)
    if all(isinstance(v, (int, Fraction)) for v in values):
        if sum(weights) != 1:
            raise ValueError(f"weights sum to {sum(weights)}, not 1")
        return sum((Fraction(w) * p for w, p in zip(weights, effect_probs)), Fraction(0))
    wsum = math.fsum(float(w) for w in weights)
    if abs(wsum - 1.0) > PROB_TOL:
        raise ValueError(f"weights sum to {wsum!r}, not 1")
    return math.fsum(float(w) * float(p) for w, p in zip(weights, effect_probs))

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from mermin_bench.quantum import (
    ALL_PAIRS,
    DIFFERENT_PAIRS,
    Color,
    ProbTable,
    SettingPair,
    Switch,
    mixture_effect_prob,
    normalize_degrees,
    quantum_joint_probs,
    raw_singlet_same_outcome_prob,
    reference_table,
    same_color_prob,
    switch_angle,
)

R, G = Color.RED, Color.GREEN


def test_switch_angles():
    assert switch_angle(Switch.ONE) == 0.0
    assert switch_angle(Switch.TWO) == 120.0
    assert switch_angle(Switch.THREE) == -120.0


def test_switch_rejects_other_values():
    with pytest.raises(ValueError):
        Switch(4)
    with pytest.raises(ValueError):
        Switch(0)


@pytest.mark.parametrize(
    "deg, expected", [(0, 0), (180, 180), (-180, 180), (240, -120), (-240, 120), (540, 180), (360, 0)]
)
def test_normalize_degrees(deg, expected):
    assert normalize_degrees(deg) == expected


def test_equal_settings_table():
    t = quantum_joint_probs(SettingPair.of(1, 1))
    assert t.as_dict() == {"RR": Fraction(1, 2), "RG": 0, "GR": 0, "GG": Fraction(1, 2)}


def test_different_settings_table():
    t = quantum_joint_probs(SettingPair.of(1, 2))
    assert t.as_dict() == {
        "RR": Fraction(1, 8),
        "RG": Fraction(3, 8),
        "GR": Fraction(3, 8),
        "GG": Fraction(1, 8),
    }
    assert quantum_joint_probs(SettingPair.of(2, 3)) == t


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=str)
def test_formula_matches_published_table(pair):
    assert quantum_joint_probs(pair) == reference_table(pair)


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=str)
def test_table_invariants(pair):
    t = quantum_joint_probs(pair)
    assert sum(t.entries.values()) == 1
    assert all(v >= 0 for v in t.entries.values())
    assert t["RR"] == t["GG"]
    assert t["RG"] == t["GR"]
    assert quantum_joint_probs(pair.swapped()) == t.transposed()


def test_same_color_prob():
    assert same_color_prob(SettingPair.of(2, 2)) == 1
    assert same_color_prob(SettingPair.of(1, 3)) == Fraction(1, 4)
    assert same_color_prob(SettingPair.of(3, 1)) == Fraction(1, 4)
    assert {same_color_prob(p) for p in DIFFERENT_PAIRS} == {Fraction(1, 4)}


def test_raw_singlet():
    assert raw_singlet_same_outcome_prob(0.0, 0.0) == 0
    assert raw_singlet_same_outcome_prob(0.0, 180.0) == 1
    assert raw_singlet_same_outcome_prob(0.0, 120.0) == Fraction(3, 4)


@pytest.mark.parametrize("pair", ALL_PAIRS, ids=str)
def test_flipped_color_convention(pair):
    raw = raw_singlet_same_outcome_prob(switch_angle(pair.x), switch_angle(pair.y))
    assert same_color_prob(pair) + raw == 1


@given(st.floats(-720, 720), st.floats(-720, 720))
def test_raw_singlet_is_sin_squared(a, b):
    import math

    expected = math.sin(math.radians(b - a) / 2) ** 2
    assert float(raw_singlet_same_outcome_prob(a, b)) == pytest.approx(expected, abs=1e-12)


def test_prob_table_validation():
    with pytest.raises(ValueError, match="missing"):
        ProbTable({(R, R): 1})
    with pytest.raises(ValueError, match="sum"):
        ProbTable({(R, R): 0.5, (R, G): 0.5, (G, R): 0.5, (G, G): 0})
    with pytest.raises(ValueError, match="outside"):
        ProbTable({(R, R): 1.5, (R, G): -0.5, (G, R): 0, (G, G): 0})


class TestMixture:
    def test_randomized_red_light_effect(self):
        # E1 and E2: red at Y on switches 1 and 2 given red at X on switch 3
        p1 = quantum_joint_probs(SettingPair.of(3, 1))["RR"] / Fraction(1, 2)
        p2 = quantum_joint_probs(SettingPair.of(3, 2))["RR"] / Fraction(1, 2)
        assert p1 == p2 == Fraction(1, 4)
        assert mixture_effect_prob([Fraction(1, 2)] * 2, [p1, p2]) == Fraction(1, 4)

    def test_degenerate(self):
        assert mixture_effect_prob([1, 0], [0.3, 0.9]) == 0.3

    def test_mean(self):
        assert mixture_effect_prob([0.5, 0.5], [1, 0]) == 0.5

    def test_errors(self):
        with pytest.raises(ValueError, match="length|weights but"):
            mixture_effect_prob([1], [0.5, 0.5])
        with pytest.raises(ValueError, match="sum"):
            mixture_effect_prob([0.5, 0.6], [0.1, 0.1])
        with pytest.raises(ValueError, match="nonnegative"):
            mixture_effect_prob([1.5, -0.5], [0.1, 0.1])
        with pytest.raises(ValueError):
            mixture_effect_prob([], [])

    @given(
        st.lists(st.floats(0, 1), min_size=1, max_size=6).flatmap(
            lambda w: st.tuples(
                st.just(w), st.lists(st.floats(0, 1), min_size=len(w), max_size=len(w))
            )
        )
    )
    def test_linear_in_probabilities(self, wp):
        raw, probs = wp
        total = sum(raw)
        if total == 0:
            return
        weights = [w / total for w in raw]
        if abs(sum(weights) - 1) > 1e-12:
            return
        got = mixture_effect_prob(weights, probs)
        assert got == pytest.approx(sum(w * p for w, p in zip(weights, probs)), abs=1e-12)
        assert min(probs) - 1e-12 <= got <= max(probs) + 1e-12

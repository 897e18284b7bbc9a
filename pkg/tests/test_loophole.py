import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mermin_bench.lhv import ALL_STATES, InstructionState, StateDistribution, equal_color_prob_diff_settings
from mermin_bench.loophole import (
    SQRT3_OVER_2,
    DetectionModel,
    StateClass,
    both_detected_prob,
    brute_force_both_detected,
    brute_force_equal_color,
    conditional_equal_color_prob,
    detect_prob,
    equal_color_and_detected_prob,
    per_class_equal_color_prob,
)

S = InstructionState.parse
QM = DetectionModel(SQRT3_OVER_2, 0.5)
probs = st.floats(0, 1)


def test_model_validation():
    with pytest.raises(ValueError):
        DetectionModel(1.5, 0)
    with pytest.raises(ValueError):
        DetectionModel(0.5, -0.1)


def test_state_classes():
    classes = [StateClass.of(s) for s in ALL_STATES]
    assert classes.count(StateClass.TWO_EQUAL) == 6
    assert classes.count(StateClass.THREE_EQUAL) == 2


def test_detect_prob():
    assert detect_prob(S("RGG"), 1, DetectionModel(0.3, 0.7)) == 1
    assert detect_prob(S("RGG"), 2, DetectionModel(0.5, 0.7)) == 0.5
    assert detect_prob(S("RGG"), 3, DetectionModel(0.5, 0.7)) == 0.5
    assert detect_prob(S("GRG"), 2, DetectionModel(0.5, 0.7)) == 1
    assert detect_prob(S("RRR"), 3, DetectionModel(0.5, 0.25)) == 0.25


def test_quantum_matching_point():
    assert equal_color_and_detected_prob(QM) == pytest.approx(0.25, rel=4 * np.finfo(float).eps)
    assert per_class_equal_color_prob(StateClass.TWO_EQUAL, QM) == pytest.approx(0.25, abs=1e-12)
    assert per_class_equal_color_prob(StateClass.THREE_EQUAL, QM) == 0.25


def test_closed_form_edges():
    assert equal_color_and_detected_prob(DetectionModel(1, 1)) == 0.5
    assert equal_color_and_detected_prob(DetectionModel(1, 1)) == equal_color_prob_diff_settings(
        StateDistribution.uniform()
    )
    assert equal_color_and_detected_prob(DetectionModel(0, 0)) == 0
    assert per_class_equal_color_prob(StateClass.TWO_EQUAL, DetectionModel(0, 1)) == 0


def test_brute_force_values():
    assert brute_force_equal_color(QM) == pytest.approx(0.25, abs=1e-12)
    # (0.09 + 0.16) / 4
    assert brute_force_equal_color(DetectionModel(0.3, 0.4)) == pytest.approx(0.0625, abs=1e-12)
    assert brute_force_equal_color(DetectionModel(1, 1)) == pytest.approx(0.5, abs=1e-12)


def test_both_detected():
    assert both_detected_prob(DetectionModel(1, 1)) == 1
    assert both_detected_prob(DetectionModel(0, 0)) == 0
    expected = (1 + math.sqrt(3)) / 4
    assert brute_force_both_detected(QM) == pytest.approx(expected, abs=1e-12)
    assert both_detected_prob(QM) == pytest.approx(expected, abs=1e-12)


def test_conditional_diagnostic():
    assert conditional_equal_color_prob(QM) == pytest.approx(0.25 / ((1 + math.sqrt(3)) / 4), abs=1e-12)
    assert conditional_equal_color_prob(QM) == pytest.approx(0.366, abs=1e-3)


@pytest.mark.parametrize("p", np.linspace(0, 1, 11))
@pytest.mark.parametrize("q", np.linspace(0, 1, 11))
def test_grid_closed_forms(p, q):
    m = DetectionModel(float(p), float(q))
    assert brute_force_equal_color(m) == pytest.approx(equal_color_and_detected_prob(m), abs=1e-12)
    assert brute_force_both_detected(m) == pytest.approx(both_detected_prob(m), abs=1e-12)


@given(probs, probs)
def test_class_mixture(p, q):
    m = DetectionModel(p, q)
    mixed = 6 / 8 * per_class_equal_color_prob(StateClass.TWO_EQUAL, m) + 2 / 8 * per_class_equal_color_prob(
        StateClass.THREE_EQUAL, m
    )
    assert mixed == pytest.approx(equal_color_and_detected_prob(m), abs=1e-12)
    assert equal_color_and_detected_prob(m) <= both_detected_prob(m) + 1e-15


@given(st.floats(0, math.pi / 2))
def test_quantum_manifold(theta):
    m = DetectionModel(min(1.0, math.cos(theta)), min(1.0, math.sin(theta)))
    assert equal_color_and_detected_prob(m) == pytest.approx(0.25, abs=1e-12)


@given(probs, probs, probs)
def test_monotone(a, b, other):
    lo, hi = sorted((a, b))
    assert equal_color_and_detected_prob(DetectionModel(lo, other)) <= equal_color_and_detected_prob(
        DetectionModel(hi, other)
    )
    assert equal_color_and_detected_prob(DetectionModel(other, lo)) <= equal_color_and_detected_prob(
        DetectionModel(other, hi)
    )

"""Analytic and Monte Carlo workbench for the Mermin two-detector device.

Submodules:
    quantum     exact quantum outcome tables and effect mixtures
    lhv         instruction-set hidden-variable models and the 1/3 bound
    loophole    state-dependent detection model reproducing 1/4
    montecarlo  seeded, partition-independent trial engine
    regress     latent-block regression and subspace recovery
    params      experiment registry and total-parameter classification
    cli         command-line entry point
"""

from mermin_bench.quantum import (
    Color,
    ProbTable,
    SettingPair,
    Switch,
    mixture_effect_prob,
    quantum_joint_probs,
    raw_singlet_same_outcome_prob,
    same_color_prob,
    switch_angle,
)
from mermin_bench.lhv import (
    InstructionState,
    StateDistribution,
    enumerate_states,
    equal_color_prob_diff_settings,
    mermin_lower_bound,
)
from mermin_bench.loophole import (
    DetectionModel,
    StateClass,
    brute_force_equal_color,
    equal_color_and_detected_prob,
)

__all__ = [
    "Color",
    "DetectionModel",
    "InstructionState",
    "ProbTable",
    "SettingPair",
    "StateClass",
    "StateDistribution",
    "Switch",
    "brute_force_equal_color",
    "enumerate_states",
    "equal_color_and_detected_prob",
    "equal_color_prob_diff_settings",
    "mermin_lower_bound",
    "mixture_effect_prob",
    "quantum_joint_probs",
    "raw_singlet_same_outcome_prob",
    "same_color_prob",
    "switch_angle",
]

__version__ = "0.1.0"

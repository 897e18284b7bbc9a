import math

import numpy as np
import pytest

from mermin_bench import montecarlo as mc
from mermin_bench.lhv import StateDistribution
from mermin_bench.loophole import DetectionModel, SQRT3_OVER_2
from mermin_bench.quantum import ALL_PAIRS


@pytest.fixture(scope="module")
def quantum_run():
    return mc.run_quantum(1_000_000, seed=42)


def test_quantum_fact_a_exact(quantum_run):
    hits, n = quantum_run.count(mc.same_color, mc.equal_settings)
    assert hits == n > 0
    # no equal-setting trial with unequal colours
    for i in range(3):
        assert quantum_run.counts[i, i, mc.RED, mc.GREEN] == 0
        assert quantum_run.counts[i, i, mc.GREEN, mc.RED] == 0


def test_quantum_quarter(quantum_run):
    result = mc.compare(quantum_run, 0.25, mc.same_color, mc.different_settings)
    assert result.passed, result


def test_quantum_never_misses(quantum_run):
    assert quantum_run.count(mc.both_detected)[0] == quantum_run.n_trials


def test_setting_marginals(quantum_run):
    chi2, z = mc.setting_chi_square(quantum_run)
    assert abs(z) <= 4
    assert quantum_run.pair_counts().sum() == 1_000_000


def test_single_trial():
    assert mc.run_quantum(1, seed=3).n_trials == 1


def test_zero_trials_rejected():
    with pytest.raises(ValueError):
        mc.run_quantum(0, seed=1)


def test_reproducible():
    a = mc.run_quantum(50_000, seed=9)
    b = mc.run_quantum(50_000, seed=9)
    c = mc.run_quantum(50_000, seed=10)
    assert a == b
    assert a != c


@pytest.mark.parametrize("parts", [2, 3, 7])
def test_partitioned_equals_sequential(parts):
    model = mc.LHVModel(StateDistribution.uniform(), DetectionModel(0.7, 0.3))
    n = 300_001
    sequential = mc.run_range(model, 5, 0, n)
    merged = mc.RunStats()
    for a, b in reversed(mc.partition(n, parts)):
        merged = merged.merge(mc.run_range(model, 5, a, b))
    assert merged == sequential


def test_process_pool_equals_sequential():
    n = 4 * mc.CHUNK + 17
    assert mc.run_quantum(n, seed=11, workers=4) == mc.run_quantum(n, seed=11, workers=1)


def test_partition_covers_range():
    ranges = mc.partition(10, 4)
    assert ranges[0][0] == 0 and ranges[-1][1] == 10
    assert all(a == b for (_, a), (b, _) in zip(ranges, ranges[1:]))
    assert mc.partition(2, 8) == [(0, 1), (1, 2)]


def test_lhv_uniform_half():
    stats = mc.run_lhv(StateDistribution.uniform(), None, 1_000_000, seed=1)
    assert mc.compare(stats, 0.5, mc.same_color, mc.different_settings).passed


def test_lhv_point_mass_rrr():
    stats = mc.run_lhv(StateDistribution.point_mass("RRR"), None, 20_000, seed=2)
    for pair in ALL_PAIRS:
        assert stats.frequency(mc.same_color, mc.setting_is(pair)) == 1.0


def test_lhv_loophole_quarter():
    stats = mc.run_lhv(StateDistribution.uniform(), DetectionModel(SQRT3_OVER_2, 0.5), 1_000_000, seed=4)
    event = mc.both(mc.same_color, mc.both_detected)
    assert mc.compare(stats, 0.25, event, mc.different_settings).passed


def test_lhv_without_detection_model_never_misses():
    stats = mc.run_lhv(StateDistribution.uniform(), None, 10_000, seed=2)
    assert stats.count(mc.both_detected)[0] == 10_000


def test_full_detection_matches_no_model():
    d = StateDistribution.uniform()
    assert mc.run_lhv(d, DetectionModel(1, 1), 10_000, 6) == mc.run_lhv(d, None, 10_000, 6)


class TestCompare:
    def test_pass_at_quarter(self):
        n = 333_000
        r = mc.compare_frequency(round(0.25 * n), n, 0.25)
        assert r.stderr == pytest.approx(7.5e-4, rel=0.01)
        assert r.passed

    def test_gross_mismatch_fails(self):
        r = mc.compare_frequency(50_000, 100_000, 0.25)
        assert not r.passed
        assert r.z > 4

    def test_exact_match(self):
        r = mc.compare_frequency(25, 100, 0.25)
        assert r.z == 0 and r.passed

    def test_degenerate_analytic(self):
        assert mc.compare_frequency(10, 10, 1.0).passed
        assert not mc.compare_frequency(9, 10, 1.0).passed
        assert math.isinf(mc.compare_frequency(1, 10, 0.0).z)

    def test_empty_selection(self):
        with pytest.raises(ValueError, match="empty"):
            mc.compare_frequency(0, 0, 0.5)
        stats = mc.run_quantum(100, seed=0)
        with pytest.raises(ValueError):
            mc.compare(stats, 0.5, mc.same_color, lambda pair, ox, oy: False)


def test_uniform_draws_in_unit_interval():
    u = mc._uniforms(123, 0, 1000)
    assert u.shape == (1000, mc.WORDS_PER_TRIAL)
    assert np.all((u >= 0) & (u < 1))

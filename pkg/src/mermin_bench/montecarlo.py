"""Seeded trial engine for the delayed-choice Mermin experiment.

Each trial draws both switch settings independently and uniformly, then
draws outcomes from one of three models: the quantum table, a shared
instruction state, or an instruction state with lossy detection.

Randomness comes from a Philox counter-based generator keyed by the seed.
Trial ``i`` always consumes the same block of raw words, so a run split
across workers produces exactly the counts of a sequential run.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.stats

from mermin_bench.lhv import ALL_STATES, StateDistribution
from mermin_bench.loophole import DetectionModel, detect_prob
from mermin_bench.quantum import (
    ALL_PAIRS,
    OUTCOMES,
    Color,
    SettingPair,
    Switch,
    quantum_joint_probs,
)

#: Raw 64-bit words reserved per trial (two Philox4x64 blocks).
WORDS_PER_TRIAL = 8
#: Philox counter increments per trial.
_COUNTER_STEP = WORDS_PER_TRIAL // 4
#: Trials generated per vectorized batch.
CHUNK = 1 << 17
#: |z| threshold for stochastic checks.
Z_THRESHOLD = 4.0

# word slots within a trial's block
_W_SX, _W_SY, _W_OUTCOME, _W_DX, _W_DY = range(5)

#: Outcome index at one station: 0 = red, 1 = green, 2 = not detected.
RED, GREEN, MISS = 0, 1, 2
_COLOR_INDEX = {Color.RED: RED, Color.GREEN: GREEN}
_OUTCOME_LABELS = ("R", "G", "-")


def _uniforms(seed: int, start: int, n: int) -> np.ndarray:
    """Uniform [0, 1) doubles for trials ``start .. start+n-1``, shape (n, 8)."""
    bits = np.random.Philox(key=seed, counter=[start * _COUNTER_STEP, 0, 0, 0])
    raw = bits.random_raw(n * WORDS_PER_TRIAL).reshape(n, WORDS_PER_TRIAL)
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / 9007199254740992.0)


def _draw_switches(u: np.ndarray) -> np.ndarray:
    return np.minimum((u * 3.0).astype(np.int64), 2)


def _categorical(u: np.ndarray, cdf: np.ndarray) -> np.ndarray:
    """Row-wise inverse-CDF draw; ``cdf`` has one row per trial."""
    return np.minimum((u[:, None] >= cdf).sum(axis=1), cdf.shape[1] - 1)


@dataclass
class RunStats:
    """Outcome counts indexed by (switch x, switch y, outcome x, outcome y).

    Switches are 0-based; outcomes use :data:`RED`, :data:`GREEN`,
    :data:`MISS`. Merging is plain addition, so partial runs over disjoint
    trial ranges combine in any order.
    """

    counts: np.ndarray = field(default_factory=lambda: np.zeros((3, 3, 3, 3), np.int64))

    @property
    def n_trials(self) -> int:
        return int(self.counts.sum())

    def merge(self, other: "RunStats") -> "RunStats":
        return RunStats(self.counts + other.counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, RunStats) and np.array_equal(self.counts, other.counts)

    def pair_counts(self) -> np.ndarray:
        """Trials per setting pair, shape (3, 3)."""
        return self.counts.sum(axis=(2, 3))

    def count(self, event: "Event", given: Optional["Event"] = None) -> tuple[int, int]:
        """(hits, conditioning trials) for ``event`` within ``given``."""
        mask_given = _mask(given) if given is not None else np.ones(self.counts.shape, bool)
        mask_event = _mask(event) & mask_given
        return int(self.counts[mask_event].sum()), int(self.counts[mask_given].sum())

    def frequency(self, event: "Event", given: Optional["Event"] = None) -> float:
        hits, n = self.count(event, given)
        if n == 0:
            raise ValueError("no trials satisfy the conditioning event")
        return hits / n

    def table(self) -> dict[str, dict[str, int]]:
        """Nested ``{"12": {"RG": count, ...}}`` view, non-zero cells included."""
        out: dict[str, dict[str, int]] = {}
        for pair in ALL_PAIRS:
            cells = self.counts[int(pair.x) - 1, int(pair.y) - 1]
            out[str(pair)] = {
                _OUTCOME_LABELS[i] + _OUTCOME_LABELS[j]: int(cells[i, j])
                for i in range(3)
                for j in range(3)
            }
        return out


#: Predicate over (setting pair, outcome at X, outcome at Y).
Event = Callable[[SettingPair, int, int], bool]


def _mask(event: Event) -> np.ndarray:
    mask = np.zeros((3, 3, 3, 3), bool)
    for pair in ALL_PAIRS:
        for ox in range(3):
            for oy in range(3):
                mask[int(pair.x) - 1, int(pair.y) - 1, ox, oy] = event(pair, ox, oy)
    return mask


def different_settings(pair: SettingPair, ox: int, oy: int) -> bool:
    return not pair.equal


def equal_settings(pair: SettingPair, ox: int, oy: int) -> bool:
    return pair.equal


def both_detected(pair: SettingPair, ox: int, oy: int) -> bool:
    return ox != MISS and oy != MISS


def same_color(pair: SettingPair, ox: int, oy: int) -> bool:
    return ox != MISS and ox == oy


def setting_is(target: SettingPair) -> Event:
    return lambda pair, ox, oy: pair == target


def outcome_is(target: tuple[Color, Color]) -> Event:
    cx, cy = _COLOR_INDEX[target[0]], _COLOR_INDEX[target[1]]
    return lambda pair, ox, oy: ox == cx and oy == cy


def both(*events: Event) -> Event:
    return lambda pair, ox, oy: all(e(pair, ox, oy) for e in events)


# Models. Each is a picklable callable mapping (u, sx, sy) -> (ox, oy).


class QuantumModel:
    def __init__(self) -> None:
        cdf = np.zeros((3, 3, 4))
        for pair in ALL_PAIRS:
            table = quantum_joint_probs(pair)
            cdf[int(pair.x) - 1, int(pair.y) - 1] = np.cumsum(
                [float(table.entries[k]) for k in OUTCOMES]
            )
        self._cdf = cdf
        self._ox = np.array([_COLOR_INDEX[k[0]] for k in OUTCOMES])
        self._oy = np.array([_COLOR_INDEX[k[1]] for k in OUTCOMES])

    def __call__(self, u, sx, sy):
        k = _categorical(u[:, _W_OUTCOME], self._cdf[sx, sy])
        return self._ox[k], self._oy[k]


class LHVModel:
    def __init__(self, d: StateDistribution, m: Optional[DetectionModel] = None) -> None:
        self._cdf = np.cumsum(d.vector())
        # colour index [state, switch]
        self._color = np.array(
            [[_COLOR_INDEX[s.color(sw)] for sw in Switch] for s in ALL_STATES]
        )
        if m is None:
            self._detect = None
        else:
            self._detect = np.array(
                [[detect_prob(s, sw, m) for sw in Switch] for s in ALL_STATES]
            )

    def __call__(self, u, sx, sy):
        n = len(u)
        state = _categorical(u[:, _W_OUTCOME], np.broadcast_to(self._cdf, (n, len(self._cdf))))
        ox = self._color[state, sx]
        oy = self._color[state, sy]
        if self._detect is not None:
            ox = np.where(u[:, _W_DX] < self._detect[state, sx], ox, MISS)
            oy = np.where(u[:, _W_DY] < self._detect[state, sy], oy, MISS)
        return ox, oy


def run_range(model, seed: int, start: int, stop: int) -> RunStats:
    """Simulate trials ``start .. stop-1``."""
    stats = RunStats()
    for lo in range(start, stop, CHUNK):
        n = min(CHUNK, stop - lo)
        u = _uniforms(seed, lo, n)
        sx = _draw_switches(u[:, _W_SX])
        sy = _draw_switches(u[:, _W_SY])
        ox, oy = model(u, sx, sy)
        flat = np.ravel_multi_index((sx, sy, ox, oy), (3, 3, 3, 3))
        stats.counts += np.bincount(flat, minlength=81).reshape(3, 3, 3, 3)
    return stats


def _run_range_args(args) -> RunStats:
    return run_range(*args)


def partition(n: int, parts: int) -> list[tuple[int, int]]:
    """Split ``range(n)`` into at most ``parts`` contiguous, nonempty ranges."""
    parts = max(1, min(parts, n))
    edges = [n * i // parts for i in range(parts + 1)]
    return [(a, b) for a, b in zip(edges, edges[1:]) if b > a]


def run(model, n: int, seed: int, workers: int = 1) -> RunStats:
    if n < 1:
        raise ValueError(f"need at least one trial, got {n}")
    if not 0 <= seed < 2**64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    if workers is None or workers < 1:
        workers = os.cpu_count() or 1
    # below a few chunks, process start-up dominates
    workers = min(workers, max(1, n // CHUNK))
    if workers == 1:
        return run_range(model, seed, 0, n)
    jobs = [(model, seed, a, b) for a, b in partition(n, workers)]
    stats = RunStats()
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for part in pool.map(_run_range_args, jobs):
            stats = stats.merge(part)
    return stats


def run_quantum(n: int, seed: int, workers: int = 1) -> RunStats:
    return run(QuantumModel(), n, seed, workers)


def run_lhv(
    d: StateDistribution,
    m: Optional[DetectionModel],
    n: int,
    seed: int,
    workers: int = 1,
) -> RunStats:
    return run(LHVModel(d, m), n, seed, workers)


@dataclass(frozen=True)
class Comparison:
    empirical: float
    analytic: float
    stderr: float
    z: float
    n: int
    passed: bool


def compare_frequency(hits: int, n: int, analytic: float, threshold: float = Z_THRESHOLD) -> Comparison:
    """Binomial z-test of ``hits / n`` against ``analytic``.

    The standard error uses the analytic probability, so an event with
    analytic probability 0 or 1 passes only on an exact match.
    """
    if n <= 0:
        raise ValueError("empty selection: no conditioning trials")
    analytic = float(analytic)
    empirical = hits / n
    stderr = math.sqrt(analytic * (1.0 - analytic) / n)
    diff = empirical - analytic
    if stderr > 0:
        z = diff / stderr
    elif diff == 0:
        z = 0.0
    else:
        z = math.copysign(math.inf, diff)
    return Comparison(empirical, analytic, stderr, z, n, abs(z) <= threshold)


def compare(
    stats: RunStats,
    analytic: float,
    event: Event,
    given: Optional[Event] = None,
    threshold: float = Z_THRESHOLD,
) -> Comparison:
    hits, n = stats.count(event, given)
    return compare_frequency(hits, n, analytic, threshold)


def setting_chi_square(stats: RunStats) -> tuple[float, float]:
    """Chi-square of the 9 setting-pair counts against uniform.

    Returns the statistic and the standard-normal quantile of its upper-tail
    p-value, so the same |z| <= 4 rule applies as for frequencies.
    """
    result = scipy.stats.chisquare(stats.pair_counts().ravel())
    return float(result.statistic), float(scipy.stats.norm.isf(result.pvalue))

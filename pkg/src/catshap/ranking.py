"""Redundancy-aware selection (SVFS) and ranking (SVFR) on Shapley scores.

Both greedy loops reuse the Shapley values computed once on the full
feature set. The redundancy penalty of a candidate ``X`` against the already
chosen set ``S`` is ``H(X) + H(S) - H(S u X)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import CategoricalDataset
from .entropy import PartitionState, _contribution, refine_partition, resolve_base
from .shapley import ShapleyScores


@dataclass(frozen=True)
class StepRecord:
    feature: int
    shapley: float
    penalty: float
    rk: float | None = None
    pruned: tuple[int, ...] = ()


@dataclass(eq=False)
class RankingResult:
    """Ordered features with per-step diagnostics.

    For SVFS, ``trailing_pruned`` lists the features removed by the last
    pruning pass, which left nothing to select.
    """

    order: list[int]
    steps: list[StepRecord]
    method: str
    scores: ShapleyScores
    epsilon: float | None = None
    cap: int | None = None
    trailing_pruned: tuple[int, ...] = field(default=())

    @property
    def base(self) -> float:
        return self.scores.base

    def __len__(self):
        return len(self.order)


class PenaltyOracle:
    """Memoised redundancy penalties against growing selected sets.

    Partitions are kept per selected-set bitmask, so runs that share a
    prefix (an epsilon sweep, say) refine each prefix only once.
    """

    def __init__(self, ds: CategoricalDataset, base=2):
        self.dataset = ds
        self.base = resolve_base(base)
        self._states: dict[int, PartitionState] = {0: PartitionState.trivial(ds.n_rows)}
        self._penalties: dict[tuple[int, int], float] = {}
        self.evaluations = 0

    def state(self, selected: Sequence[int]) -> PartitionState:
        mask = 0
        state = self._states[0]
        for x in selected:
            mask |= 1 << x
            cached = self._states.get(mask)
            if cached is None:
                cached = refine_partition(state, self.dataset, x)
                self._states[mask] = cached
            state = cached
        return state

    def penalty(self, selected: Sequence[int], feature: int) -> float:
        if not selected:
            return 0.0
        state = self.state(selected)
        key = (state.mask, feature)
        value = self._penalties.get(key)
        if value is None:
            value, _ = _contribution(state, self.dataset, feature, self.base)
            self._penalties[key] = value
            self.evaluations += 1
        return value


def _check_scores(ds: CategoricalDataset, scores: ShapleyScores, base) -> float:
    if scores.values.shape != (ds.n_features,):
        raise ValueError(
            f"scores cover {scores.values.size} features, dataset has {ds.n_features}"
        )
    b = scores.base if base is None else resolve_base(base)
    if b != scores.base:
        raise ValueError("Shapley scores were computed in a different log base")
    return b


def _argmax(candidates, value) -> int:
    """Candidate with the largest value; ties go to the lowest index."""
    return min(candidates, key=lambda x: (-value(x), x))


def svfs(
    ds: CategoricalDataset,
    epsilon: float,
    scores: ShapleyScores,
    base=None,
    *,
    oracle: PenaltyOracle | None = None,
) -> RankingResult:
    """Greedy selection with epsilon pruning.

    Each round first drops every candidate whose penalty against the
    selected set exceeds ``epsilon``, then moves the remaining candidate
    with the largest Shapley value into the selection. Stops when no
    candidate is left.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    b = _check_scores(ds, scores, base)
    oracle = oracle or PenaltyOracle(ds, b)
    phi = scores.values
    pool = set(range(ds.n_features))
    selected: list[int] = []
    steps: list[StepRecord] = []
    while True:
        penalties = {x: oracle.penalty(selected, x) for x in sorted(pool)}
        pruned = tuple(x for x in sorted(pool) if penalties[x] > epsilon)
        pool.difference_update(pruned)
        if not pool:
            return RankingResult(
                selected, steps, "svfs", scores, epsilon=float(epsilon), trailing_pruned=pruned
            )
        best = _argmax(pool, lambda x: phi[x])
        steps.append(StepRecord(best, float(phi[best]), penalties[best], pruned=pruned))
        selected.append(best)
        pool.discard(best)


def svfr(
    ds: CategoricalDataset,
    scores: ShapleyScores,
    cap: int | None = None,
    base=None,
    *,
    oracle: PenaltyOracle | None = None,
) -> RankingResult:
    """Complete (or ``cap``-truncated) ranking by penalised Shapley value.

    Rank 0 is the Shapley argmax; every later rank maximises
    ``rk(X) = phi(X) - penalty(S, X)`` over unranked features, ``S`` being
    all features ranked so far.
    """
    b = _check_scores(ds, scores, base)
    if cap is not None and cap < 1:
        raise ValueError("cap must be >= 1")
    oracle = oracle or PenaltyOracle(ds, b)
    phi = scores.values
    limit = ds.n_features if cap is None else min(cap, ds.n_features)
    remaining = set(range(ds.n_features))
    order: list[int] = []
    steps: list[StepRecord] = []
    while remaining and len(order) < limit:
        penalty = {x: oracle.penalty(order, x) for x in sorted(remaining)}
        rk = {x: float(phi[x]) - penalty[x] for x in penalty}
        best = _argmax(remaining, rk.__getitem__)
        steps.append(StepRecord(best, float(phi[best]), penalty[best], rk=rk[best]))
        order.append(best)
        remaining.discard(best)
    return RankingResult(order, steps, "svfr", scores, cap=cap)


def svfs_sweep(
    ds: CategoricalDataset, epsilons: Sequence[float], scores: ShapleyScores, base=None
) -> list[RankingResult]:
    """One SVFS run per epsilon, sharing scores and cached penalties."""
    b = _check_scores(ds, scores, base)
    oracle = PenaltyOracle(ds, b)
    return [svfs(ds, eps, scores, b, oracle=oracle) for eps in epsilons]


def epsilon_grid(start: float, stop: float, step: float) -> list[float]:
    """Inclusive arithmetic grid, rounded to 10 decimals against float drift."""
    if step <= 0:
        raise ValueError("step must be positive")
    if stop < start:
        raise ValueError("stop must be >= start")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def is_subsequence(short: Sequence[int], long: Sequence[int]) -> bool:
    it = iter(long)
    return all(x in it for x in short)

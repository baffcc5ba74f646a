"""Plug-in Shannon entropy, total correlation and marginal contributions.

Two independent routes to a joint entropy are provided:

* :func:`joint_entropy` counts distinct row tuples directly;
* :class:`PartitionState` / :func:`refine_partition` split the rows one
  feature at a time, which is what the Shapley estimators use.

Both hand their group counts to the same sorted summation, so equal
partitions give bitwise-equal entropies whichever route produced them.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Callable, Iterable

import numpy as np

from .dataset import CategoricalDataset

LOG_BASES = {"2": 2.0, "e": math.e, "10": 10.0}


def resolve_base(base) -> float:
    """Accept ``2``, ``10``, ``"e"`` (or their string forms) and ``math.e``."""
    if isinstance(base, str):
        try:
            return LOG_BASES[base.strip().lower()]
        except KeyError:
            raise ValueError(f"unsupported log base {base!r}; use 2, e or 10") from None
    b = float(base)
    if b <= 0 or b == 1 or not math.isfinite(b):
        raise ValueError(f"invalid log base {base!r}")
    return b


def base_label(base) -> str:
    b = resolve_base(base)
    if b == math.e:
        return "e"
    return f"{b:g}"


def _entropy_from_counts(counts: np.ndarray, n: int, base: float) -> float:
    c = np.sort(np.asarray(counts, dtype=np.float64))
    p = c / n
    h = -float(np.sum(p * np.log(p)))
    if base != math.e:
        h /= math.log(base)
    return max(h, 0.0)


@dataclass(frozen=True)
class FeatureSubset:
    """Strictly increasing tuple of feature indices, with its bitmask."""

    indices: tuple[int, ...] = ()

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(i < 0 for i in idx) or any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"indices must be non-negative and strictly increasing: {idx}")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, items: Iterable[int]) -> "FeatureSubset":
        return cls(tuple(sorted({int(i) for i in items})))

    @classmethod
    def from_mask(cls, mask: int) -> "FeatureSubset":
        return cls(tuple(i for i in range(mask.bit_length()) if mask >> i & 1))

    @property
    def mask(self) -> int:
        m = 0
        for i in self.indices:
            m |= 1 << i
        return m

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, item):
        return item in self.indices


def _as_indices(subset) -> tuple[int, ...]:
    if isinstance(subset, FeatureSubset):
        return subset.indices
    if isinstance(subset, (int, np.integer)):
        return FeatureSubset.from_mask(int(subset)).indices
    return FeatureSubset.of(subset).indices


def _check_indices(ds: CategoricalDataset, idx: tuple[int, ...]) -> None:
    if idx and idx[-1] >= ds.n_features:
        raise IndexError(f"feature index {idx[-1]} out of range for {ds.n_features} features")


def joint_entropy(ds: CategoricalDataset, subset, base=2) -> float:
    """Empirical joint Shannon entropy of the features in ``subset``.

    ``subset`` is a :class:`FeatureSubset`, an iterable of indices or an int
    bitmask. The empty subset has entropy 0.
    """
    idx = _as_indices(subset)
    b = resolve_base(base)
    if not idx:
        return 0.0
    _check_indices(ds, idx)
    block = ds.codes[:, list(idx)]
    _, counts = np.unique(block, axis=0, return_counts=True)
    return _entropy_from_counts(counts, ds.n_rows, b)


def total_correlation(ds: CategoricalDataset, subset, base=2) -> float:
    """Sum of marginal entropies minus joint entropy; 0 for empty and singletons."""
    idx = _as_indices(subset)
    if len(idx) < 2:
        return 0.0
    tc = sum(joint_entropy(ds, (i,), base) for i in idx) - joint_entropy(ds, idx, base)
    return max(tc, 0.0)


@dataclass(frozen=True, eq=False)
class PartitionState:
    """Row partition induced by a set of features.

    Group ids are dense, numbered by increasing mixed-radix key of the code
    tuple, and ``counts[g]`` is the size of group ``g``.
    """

    group_ids: np.ndarray
    counts: np.ndarray
    mask: int = 0

    @property
    def n_groups(self) -> int:
        return self.counts.size

    @property
    def n_rows(self) -> int:
        return self.group_ids.size

    @classmethod
    def trivial(cls, n_rows: int) -> "PartitionState":
        return cls(np.zeros(n_rows, dtype=np.int64), np.array([n_rows], dtype=np.int64), 0)

    @classmethod
    def from_subset(cls, ds: CategoricalDataset, subset) -> "PartitionState":
        state = cls.trivial(ds.n_rows)
        for j in _as_indices(subset):
            state = refine_partition(state, ds, j)
        return state


def _refine(group_ids, n_groups, codes, arity):
    key = group_ids * arity + codes
    cnt = np.bincount(key, minlength=n_groups * arity)
    occupied = cnt > 0
    relabel = np.cumsum(occupied) - 1
    return relabel[key], cnt[occupied], cnt


def refine_partition(state: PartitionState, ds: CategoricalDataset, feature: int) -> PartitionState:
    """Intersect every group of ``state`` with the code classes of ``feature``."""
    if state.mask >> feature & 1:
        raise ValueError(f"feature {feature} already refines this partition")
    col = ds.columns[feature]
    gid, counts, _ = _refine(state.group_ids, state.n_groups, col.codes, col.arity)
    return PartitionState(gid, counts, state.mask | (1 << feature))


def entropy_of_partition(state: PartitionState, base=2) -> float:
    return _entropy_from_counts(state.counts, state.n_rows, resolve_base(base))


def _mutual_information(joint_counts, group_counts, code_counts, n_rows, base) -> float:
    """Plug-in mutual information from a flattened ``groups x codes`` table.

    Written as sum p(a,x) log(p(a,x) / p(a) p(x)) over occupied cells: an
    empirically independent pair yields exactly 0.0.
    """
    arity = code_counts.size
    cells = np.flatnonzero(joint_counts)
    c_ax = joint_counts[cells].astype(np.float64)
    c_a = group_counts[cells // arity].astype(np.float64)
    c_x = code_counts[cells % arity].astype(np.float64)
    terms = c_ax * np.log((c_ax * n_rows) / (c_a * c_x))
    mi = float(np.sum(terms)) / n_rows
    if base != math.e:
        mi /= math.log(base)
    return max(mi, 0.0)


def _contribution(state: PartitionState, ds: CategoricalDataset, feature: int, base: float):
    """Marginal contribution of ``feature`` to the partition, plus the refined state."""
    col = ds.columns[feature]
    code_counts = np.bincount(col.codes, minlength=col.arity)
    gid, counts, joint = _refine(state.group_ids, state.n_groups, col.codes, col.arity)
    mi = _mutual_information(joint, state.counts, code_counts, ds.n_rows, base)
    return mi, PartitionState(gid, counts, state.mask | (1 << feature))


def marginal_contribution(ds: CategoricalDataset, subset, feature: int, base=2) -> float:
    """``H(A) + H(X) - H(A u X)``: the total-correlation gain of adding ``feature`` to ``subset``.

    Computed as the mutual information between ``X`` and the joint variable
    ``A``; never negative and exactly zero under empirical independence.
    """
    idx = _as_indices(subset)
    if feature in idx:
        raise ValueError(f"feature {feature} is already in the subset")
    _check_indices(ds, idx + (feature,))
    if not idx:
        return 0.0
    state = PartitionState.from_subset(ds, idx)
    mi, _ = _contribution(state, ds, feature, resolve_base(base))
    return mi


class EntropyCache:
    """Thread-safe memo of subset entropies keyed by bitmask.

    Scoped to one dataset and log base; stores and lookups of equal values
    may race harmlessly.
    """

    def __init__(self, ds: CategoricalDataset, base=2):
        self.dataset = ds
        self.base = resolve_base(base)
        self.store: dict[int, float] = {0: 0.0}
        self.hits = 0
        self.misses = 0
        self._lock = threading.Lock()

    def get(self, subset, compute: Callable[[tuple[int, ...]], float] | None = None) -> float:
        mask = subset if isinstance(subset, int) else FeatureSubset.of(subset).mask
        value = self.store.get(mask)
        if value is not None:
            with self._lock:
                self.hits += 1
            return value
        idx = FeatureSubset.from_mask(mask).indices
        value = compute(idx) if compute else joint_entropy(self.dataset, idx, self.base)
        self.store[mask] = value
        with self._lock:
            self.misses += 1
        return value

    def __len__(self):
        return len(self.store)

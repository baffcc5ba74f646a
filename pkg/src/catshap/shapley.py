"""Shapley values of features in the total-correlation game.

The value of a coalition ``A`` is its total correlation ``C(A)``, so the
marginal contribution of ``X`` to ``A`` is ``H(A) + H(X) - H(A u X)``.
Four estimators are available:

``shapley_full``
    exact, from the entropies of all ``2**N`` subsets;
``shapley_bounded``
    the exact weights, truncated to coalitions of fewer than ``k`` features;
``shapley_sampled``
    mean marginal contribution over ``n`` random feature orderings;
``shapley_oracle_permutations``
    brute force over all ``N!`` orderings, kept as a test oracle.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .dataset import CategoricalDataset
from .entropy import (
    PartitionState,
    _contribution,
    _entropy_from_counts,
    _refine,
    joint_entropy,
    resolve_base,
)

DEFAULT_EXACT_LIMIT = 30
MAX_EXACT_FEATURES = 64
MAX_ORACLE_FEATURES = 8


@dataclass(frozen=True)
class ApproxConfig:
    """Which Shapley estimator to run.

    ``method`` is ``"full"``, ``"bounded"`` (needs ``k``) or ``"sampled"``
    (needs ``n`` and uses ``seed``).
    """

    method: str = "full"
    k: int | None = None
    n: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.method not in ("full", "bounded", "sampled"):
            raise ValueError(f"unknown Shapley method {self.method!r}")
        if self.method == "bounded" and (self.k is None or self.k < 1):
            raise ValueError("bounded estimator needs k >= 1")
        if self.method == "sampled" and (self.n is None or self.n < 1):
            raise ValueError("sampled estimator needs n >= 1")

    @classmethod
    def parse(cls, text: str, seed: int = 0) -> "ApproxConfig":
        """Parse ``full``, ``bounded:K`` or ``sampled:N``."""
        head, _, arg = text.strip().partition(":")
        head = head.lower()
        if head == "full" and not arg:
            return cls("full", seed=seed)
        if head in ("bounded", "sampled") and arg:
            try:
                value = int(arg)
            except ValueError:
                raise ValueError(f"invalid estimator spec {text!r}") from None
            if head == "bounded":
                return cls("bounded", k=value, seed=seed)
            return cls("sampled", n=value, seed=seed)
        raise ValueError(f"invalid estimator spec {text!r}; use full, bounded:K or sampled:N")

    def __str__(self):
        if self.method == "bounded":
            return f"bounded:{self.k}"
        if self.method == "sampled":
            return f"sampled:{self.n}"
        return "full"


@dataclass(eq=False)
class ShapleyScores:
    """Per-feature Shapley values plus how they were obtained.

    ``n_value_evals`` counts subset entropies for the enumerating estimators
    and prefix refinements for the sampled one. ``std_errors`` is only set by
    the sampled estimator; ``marginals`` holds its per-ordering contributions
    (rows are orderings, columns features).
    """

    values: np.ndarray
    config: ApproxConfig
    base: float
    n_value_evals: int
    std_errors: np.ndarray | None = None
    marginals: np.ndarray | None = field(default=None, repr=False)
    renormalized: bool = False

    @property
    def method(self) -> str:
        return self.config.method

    def ranking(self) -> list[int]:
        """Features by descending score, ties to the lower index."""
        return sorted(range(self.values.size), key=lambda i: (-self.values[i], i))


def _shapley_weights(n_features: int) -> np.ndarray:
    """Weight of a coalition of size s: 1 / (N * binom(N-1, s))."""
    return np.array(
        [1.0 / (n_features * math.comb(n_features - 1, s)) for s in range(n_features)]
    )


def _enumerate_entropies(ds: CategoricalDataset, base: float, max_size: int, n_jobs: int = 1):
    """Entropies of every subset with at most ``max_size`` features.

    Depth-first over subsets in increasing-index order, refining the parent
    partition once per child. Returns ``(masks, entropies)`` including the
    empty set; the pairing does not depend on ``n_jobs``.
    """
    n_feat, n_rows = ds.n_features, ds.n_rows
    codes = [c.codes for c in ds.columns]
    arity = ds.arities

    def walk(gid, n_groups, mask, size, start, masks, ents):
        for j in range(start, n_feat):
            child_gid, counts, _ = _refine(gid, n_groups, codes[j], arity[j])
            child = mask | (1 << j)
            masks.append(child)
            ents.append(_entropy_from_counts(counts, n_rows, base))
            if size + 1 < max_size:
                walk(child_gid, counts.size, child, size + 1, j + 1, masks, ents)

    root = np.zeros(n_rows, dtype=np.int64)

    def task(j):
        masks, ents = [], []
        gid, counts, _ = _refine(root, 1, codes[j], arity[j])
        masks.append(1 << j)
        ents.append(_entropy_from_counts(counts, n_rows, base))
        if max_size > 1:
            walk(gid, counts.size, 1 << j, 1, j + 1, masks, ents)
        return masks, ents

    if n_jobs > 1 and n_feat > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(task, range(n_feat)))
    else:
        parts = [task(j) for j in range(n_feat)]
    masks, ents = [0], [0.0]
    for m, e in parts:
        masks.extend(m)
        ents.extend(e)
    return masks, ents


def subset_entropy_table(ds: CategoricalDataset, base=2, n_jobs: int = 1) -> np.ndarray:
    """Flat array ``H[mask]`` of the entropies of all ``2**N`` subsets."""
    b = resolve_base(base)
    masks, ents = _enumerate_entropies(ds, b, ds.n_features, n_jobs)
    table = np.empty(1 << ds.n_features)
    table[np.asarray(masks, dtype=np.int64)] = ents
    return table


def shapley_full(
    ds: CategoricalDataset, base=2, *, max_features: int = DEFAULT_EXACT_LIMIT, n_jobs: int = 1
) -> ShapleyScores:
    """Exact Shapley values from the entropies of all subsets.

    Each feature's value is an exactly rounded sum (``math.fsum``), so
    features with identical columns receive bitwise-identical scores.
    """
    n_feat = ds.n_features
    limit = min(max_features, MAX_EXACT_FEATURES)
    if n_feat > limit:
        raise ValueError(
            f"exact Shapley values need 2**{n_feat} subset entropies; the limit is "
            f"{limit} features. Use the bounded or sampled estimator instead."
        )
    b = resolve_base(base)
    table = subset_entropy_table(ds, b, n_jobs)
    weights = _shapley_weights(n_feat)
    all_masks = np.arange(1 << n_feat, dtype=np.int64)
    sizes = np.bitwise_count(all_masks).astype(np.int64)
    values = np.empty(n_feat)
    for i in range(n_feat):
        bit = 1 << i
        without = all_masks[(all_masks & bit) == 0]
        # each gain is a mutual information; clamp round-off below zero
        gains = np.maximum(table[without] + table[bit] - table[without | bit], 0.0)
        terms = weights[sizes[without]] * gains
        values[i] = math.fsum(terms.tolist())
    return ShapleyScores(values, ApproxConfig("full"), b, 1 << n_feat)


def shapley_bounded(
    ds: CategoricalDataset, k: int, base=2, *, renormalize: bool = False, n_jobs: int = 1
) -> ShapleyScores:
    """Shapley sum restricted to coalitions with fewer than ``k`` features.

    The original weights are kept, so scores shrink as ``k`` drops; with
    ``renormalize`` they are rescaled by ``N / k``, the reciprocal of the
    retained weight mass. ``k = N`` gives the exact values.
    """
    n_feat = ds.n_features
    if not 1 <= k <= n_feat:
        raise ValueError(f"k must lie in [1, {n_feat}], got {k}")
    b = resolve_base(base)
    masks, ents = _enumerate_entropies(ds, b, k, n_jobs)
    table = dict(zip(masks, ents))
    weights = _shapley_weights(n_feat)
    terms: list[list[float]] = [[] for _ in range(n_feat)]
    for mask, h in zip(masks, ents):
        size = mask.bit_count()
        if size >= k:
            continue
        w = weights[size]
        for i in range(n_feat):
            bit = 1 << i
            if mask & bit:
                continue
            terms[i].append(w * max(h + table[bit] - table[mask | bit], 0.0))
    values = np.array([math.fsum(t) for t in terms])
    if renormalize:
        values = values * (n_feat / k)
    return ShapleyScores(
        values, ApproxConfig("bounded", k=k), b, len(masks), renormalized=renormalize
    )


def sample_permutations(n_features: int, n: int, seed: int) -> np.ndarray:
    """``n`` uniform orderings of ``range(n_features)``, one per row."""
    rng = np.random.default_rng(seed)
    return np.array([rng.permutation(n_features) for _ in range(n)], dtype=np.int64).reshape(
        n, n_features
    )


def permutation_marginals(ds: CategoricalDataset, order, base=2) -> np.ndarray:
    """Marginal contribution of each feature to its predecessors in ``order``.

    Entry ``i`` of the result belongs to feature ``i``. The entries add up to
    the total correlation of the whole feature set.
    """
    b = resolve_base(base)
    out = np.zeros(ds.n_features)
    state = PartitionState.trivial(ds.n_rows)
    for x in order:
        out[x], state = _contribution(state, ds, int(x), b)
    return out


def shapley_sampled(
    ds: CategoricalDataset, n: int, seed: int = 0, base=2, *, n_jobs: int = 1
) -> ShapleyScores:
    """Permutation-sampling estimate (ApproShapley).

    Orderings are drawn up front from ``seed`` and each is walked prefix by
    prefix, so the result is the same for any ``n_jobs``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    b = resolve_base(base)
    perms = sample_permutations(ds.n_features, n, seed)
    marginals = np.empty((n, ds.n_features))

    def run(rows):
        for r in rows:
            marginals[r] = permutation_marginals(ds, perms[r], b)

    if n_jobs > 1:
        chunks = np.array_split(np.arange(n), n_jobs)
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(run, chunks))
    else:
        run(range(n))
    values = marginals.mean(axis=0)
    if n > 1:
        std_errors = marginals.std(axis=0, ddof=1) / math.sqrt(n)
    else:
        std_errors = np.full(ds.n_features, np.nan)
    return ShapleyScores(
        values,
        ApproxConfig("sampled", n=n, seed=seed),
        b,
        n * ds.n_features,
        std_errors=std_errors,
        marginals=marginals,
    )


def shapley_oracle_permutations(ds: CategoricalDataset, base=2) -> ShapleyScores:
    """Average marginal contribution over every ordering of the features.

    Uses :func:`joint_entropy` directly and shares no code path with the
    other estimators. Limited to 8 features.
    """
    n_feat = ds.n_features
    if n_feat > MAX_ORACLE_FEATURES:
        raise ValueError(f"the permutation oracle is limited to {MAX_ORACLE_FEATURES} features")
    b = resolve_base(base)
    memo: dict[frozenset, float] = {frozenset(): 0.0}

    def h(members: frozenset) -> float:
        if members not in memo:
            memo[members] = joint_entropy(ds, sorted(members), b)
        return memo[members]

    contributions: list[list[float]] = [[] for _ in range(n_feat)]
    for order in itertools.permutations(range(n_feat)):
        prefix = frozenset()
        for x in order:
            grown = prefix | {x}
            contributions[x].append(h(prefix) + h(frozenset((x,))) - h(grown))
            prefix = grown
    total = math.factorial(n_feat)
    values = np.array([math.fsum(c) / total for c in contributions])
    return ShapleyScores(values, ApproxConfig("full"), b, len(memo))


def compute_shapley(
    ds: CategoricalDataset,
    config: ApproxConfig | str = "full",
    base=2,
    *,
    n_jobs: int = 1,
    max_features: int = DEFAULT_EXACT_LIMIT,
) -> ShapleyScores:
    """Dispatch to the estimator named by ``config``."""
    if isinstance(config, str):
        config = ApproxConfig.parse(config)
    if config.method == "full":
        return shapley_full(ds, base, max_features=max_features, n_jobs=n_jobs)
    if config.method == "bounded":
        return shapley_bounded(ds, min(config.k, ds.n_features), base, n_jobs=n_jobs)
    return shapley_sampled(ds, config.n, config.seed, base, n_jobs=n_jobs)


def expected_evaluations(config: ApproxConfig, n_features: int) -> int:
    """Value-function evaluations an estimator performs on ``n_features`` features."""
    if config.method == "full":
        return 1 << n_features
    if config.method == "bounded":
        k = min(config.k, n_features)
        return sum(math.comb(n_features, s) for s in range(k + 1))
    return config.n * n_features

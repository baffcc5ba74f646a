"""Redundancy rate of a feature selection and recall@k between rankings."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .dataset import CategoricalDataset, FeatureColumn


@dataclass(frozen=True)
class RedundancyReport:
    """Pairwise-correlation redundancy of a selected feature set.

    ``raw`` divides the ordered-pair sum by ``2m(m-1)``;
    ``mean_abs_pairwise`` is the plain mean over unordered pairs and
    ``scaled_0_100`` rescales that mean by the dataset's largest pairwise
    correlation.
    """

    raw: float
    mean_abs_pairwise: float
    scaled_0_100: float
    normalizer: float
    pairs: tuple[tuple[int, int, float], ...] = field(default=())


def _codes(col) -> np.ndarray:
    if isinstance(col, FeatureColumn):
        return col.codes
    return np.asarray(col)


def pearson_abs(col_a, col_b) -> float:
    """Absolute Pearson correlation of two code vectors; 0 if either is constant."""
    a = _codes(col_a).astype(np.float64)
    b = _codes(col_b).astype(np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    da = a - a.mean()
    db = b - b.mean()
    sa = math.sqrt(float(np.dot(da, da)))
    sb = math.sqrt(float(np.dot(db, db)))
    if sa == 0.0 or sb == 0.0:
        return 0.0
    return min(abs(float(np.dot(da, db))) / (sa * sb), 1.0)


def max_pairwise_correlation(ds: CategoricalDataset) -> float:
    best = 0.0
    for i, j in itertools.combinations(range(ds.n_features), 2):
        best = max(best, pearson_abs(ds.columns[i], ds.columns[j]))
    return best


def redundancy_rate(
    ds: CategoricalDataset, selected: Sequence[int], normalizer: float | None = None
) -> RedundancyReport:
    """Average absolute pairwise correlation within ``selected``.

    ``normalizer`` defaults to the largest absolute pairwise correlation over
    all features of ``ds``; pass it explicitly to reuse a precomputed value.
    """
    idx = sorted({int(i) for i in selected})
    m = len(idx)
    if m < 2:
        raise ValueError("redundancy needs at least two features")
    pairs = tuple(
        (i, j, pearson_abs(ds.columns[i], ds.columns[j]))
        for i, j in itertools.combinations(idx, 2)
    )
    unordered = math.fsum(rho for _, _, rho in pairs)
    raw = 2.0 * unordered / (2 * m * (m - 1))
    mean = unordered / (m * (m - 1) / 2)
    if normalizer is None:
        normalizer = max_pairwise_correlation(ds)
    scaled = 0.0 if normalizer == 0 else 100.0 * mean / normalizer
    return RedundancyReport(raw, mean, scaled, normalizer, pairs)


def _order(ranking) -> list[int]:
    return list(getattr(ranking, "order", ranking))


def recall_at_k(reference, candidate, k: int) -> float:
    """Share of the reference's top ``k`` features found in the candidate's top ``k``."""
    ref, cand = _order(reference), _order(candidate)
    if k < 1:
        raise ValueError("k must be >= 1")
    if k > len(ref) or k > len(cand):
        raise ValueError(f"k={k} exceeds a ranking length ({len(ref)}, {len(cand)})")
    return len(set(ref[:k]) & set(cand[:k])) / k

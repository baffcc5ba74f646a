import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catshap import pearson_abs, recall_at_k, redundancy_rate

from conftest import dataset_from_rows, random_dataset


def test_pearson_examples():
    x = np.array([0, 0, 1, 1])
    assert pearson_abs(x, x) == 1.0
    assert pearson_abs(x, np.array([0, 1, 0, 1])) == 0.0
    assert pearson_abs(np.array([2, 2, 2, 2]), x) == 0.0
    assert pearson_abs(x, 1 - x) == 1.0
    with pytest.raises(ValueError):
        pearson_abs(x, np.array([0, 1]))


def test_redundancy_two_identical_columns():
    ds = dataset_from_rows([[0, 0, 1], [1, 1, 0], [2, 2, 0], [0, 0, 1]])
    rep = redundancy_rate(ds, [0, 1])
    assert rep.raw == 0.5
    assert rep.mean_abs_pairwise == 1.0
    assert rep.scaled_0_100 == 100.0


def test_redundancy_independent_columns():
    ds = dataset_from_rows([[0, 0], [0, 1], [1, 0], [1, 1]])
    rep = redundancy_rate(ds, [0, 1])
    assert rep.raw == 0.0
    assert rep.scaled_0_100 == 0.0


def test_redundancy_needs_two_features(breast_cancer):
    with pytest.raises(ValueError):
        redundancy_rate(breast_cancer, [3])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations(range(4)))
def test_redundancy_properties(seed, perm):
    ds = random_dataset(np.random.default_rng(seed), 6, 50)
    sel = [0, 2, 3, 5]
    rep = redundancy_rate(ds, sel)
    shuffled = redundancy_rate(ds, [sel[i] for i in perm])
    assert rep == shuffled
    assert rep.raw == pytest.approx(rep.mean_abs_pairwise / 2, abs=1e-12)
    assert rep.raw >= 0
    assert 0.0 <= rep.scaled_0_100 <= 100.0 + 1e-9


def test_recall_examples():
    ref = [3, 1, 4, 0, 2]
    assert recall_at_k(ref, ref, 3) == 1.0
    assert recall_at_k([0, 1, 2, 3], [2, 3, 0, 1], 2) == 0.0
    assert recall_at_k(ref, [0, 1, 2, 3, 4], 5) == 1.0
    assert recall_at_k(ref, [1, 3, 0, 2, 4], 3) == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        recall_at_k(ref, ref[:2], 3)
    with pytest.raises(ValueError):
        recall_at_k(ref, ref, 0)


@given(st.permutations(range(8)), st.permutations(range(8)), st.integers(1, 8))
def test_recall_bounds(a, b, k):
    r = recall_at_k(a, b, k)
    assert 0.0 <= r <= 1.0
    assert recall_at_k(a, b, 8) == 1.0

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catshap import shapley_full, shapley_sampled, svfr, svfs, svfs_sweep, total_correlation
from catshap.ranking import PenaltyOracle, epsilon_grid, is_subsequence

from conftest import dataset_from_rows, random_dataset


def test_svfs_prunes_duplicate(dup_indep):
    result = svfs(dup_indep, 0.01, shapley_full(dup_indep))
    assert result.order == [0, 2]
    assert result.steps[1].pruned == (1,)
    assert result.steps[0].penalty == 0.0


def test_svfs_large_epsilon_is_plain_shapley_order(breast_cancer):
    scores = shapley_full(breast_cancer)
    tc = total_correlation(breast_cancer, range(9))
    result = svfs(breast_cancer, tc + 1e-9, scores)
    assert result.order == scores.ranking()
    assert all(not s.pruned for s in result.steps)


def test_svfr_duplicate_example(dup_indep):
    result = svfr(dup_indep, shapley_full(dup_indep))
    assert result.order == [0, 2, 1]
    assert result.steps[1].rk == 0.0
    assert result.steps[2].rk == pytest.approx(-0.5, abs=1e-15)
    assert result.steps[2].penalty == pytest.approx(1.0, abs=1e-15)


def test_svfr_independent_features_tie_break():
    ds = dataset_from_rows([[m >> i & 1 for i in range(3)] for m in range(8)])
    assert svfr(ds, shapley_full(ds)).order == [0, 1, 2]


def test_svfr_cap(breast_cancer):
    scores = shapley_full(breast_cancer)
    full = svfr(breast_cancer, scores)
    assert sorted(full.order) == list(range(9))
    capped = svfr(breast_cancer, scores, cap=3)
    assert capped.order == full.order[:3]
    with pytest.raises(ValueError):
        svfr(breast_cancer, scores, cap=0)


def test_breast_cancer_orderings(breast_cancer):
    # frozen regression values from this implementation (base 2, missing as category)
    scores = shapley_full(breast_cancer)
    assert scores.ranking() == [2, 0, 7, 3, 5, 1, 4, 8, 6]
    assert svfr(breast_cancer, scores).order == [2, 0, 5, 6, 4, 8, 1, 3, 7]
    assert svfs(breast_cancer, 0.5, scores).order == [2, 0, 3, 8, 6]


def test_scores_must_match_dataset(breast_cancer, dup_indep):
    with pytest.raises(ValueError):
        svfr(breast_cancer, shapley_full(dup_indep))
    with pytest.raises(ValueError):
        svfs(breast_cancer, 0.1, shapley_full(breast_cancer), base="e")
    with pytest.raises(ValueError):
        svfs(breast_cancer, -0.1, shapley_full(breast_cancer))


def test_sweep_equals_individual_runs(breast_cancer):
    scores = shapley_full(breast_cancer)
    eps = epsilon_grid(0.0, 1.4, 0.1)
    assert len(eps) == 15 and eps[-1] == 1.4
    sweep = svfs_sweep(breast_cancer, eps, scores)
    for e, r in zip(eps, sweep):
        assert r.order == svfs(breast_cancer, e, scores).order
        assert r.epsilon == e


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 6), st.integers(5, 80), st.integers(0, 2**32 - 1),
       st.floats(0, 1.5, allow_nan=False))
def test_greedy_postconditions(n_features, n_rows, seed, eps):
    ds = random_dataset(np.random.default_rng(seed), n_features, n_rows, max_arity=3)
    scores = shapley_full(ds)
    oracle = PenaltyOracle(ds, 2)
    sel = svfs(ds, eps, scores)
    rank = svfr(ds, scores)
    assert len(set(sel.order)) == len(sel.order) <= n_features
    assert sorted(rank.order) == list(range(n_features))
    assert sel.order[0] == rank.order[0] == scores.ranking()[0]
    assert is_subsequence(sel.order, scores.ranking())
    for k, step in enumerate(sel.steps):
        assert step.penalty <= eps
        assert step.penalty == oracle.penalty(sel.order[:k], step.feature)
    for step in rank.steps:
        assert step.penalty >= 0.0
        assert step.rk == step.shapley - step.penalty


def test_deterministic(breast_cancer):
    a = svfr(breast_cancer, shapley_sampled(breast_cancer, 50, seed=2))
    b = svfr(breast_cancer, shapley_sampled(breast_cancer, 50, seed=2, n_jobs=3))
    assert a.order == b.order
    assert [s.rk for s in a.steps] == [s.rk for s in b.steps]


def test_epsilon_grid_errors():
    with pytest.raises(ValueError):
        epsilon_grid(0, 1, 0)
    with pytest.raises(ValueError):
        epsilon_grid(1, 0, 0.1)


def test_is_subsequence():
    assert is_subsequence([2, 8], [2, 0, 8])
    assert not is_subsequence([8, 2], [2, 0, 8])

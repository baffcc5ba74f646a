"""scikit-learn estimators wrapping SVFS and SVFR.

Both are unsupervised selectors: ``fit(X)`` ignores ``y``, and ``transform``
keeps the selected columns, so they drop into a ``Pipeline`` like any other
``SelectorMixin``. Input may hold strings, integers or NaN; every column is
treated as categorical.
"""

from __future__ import annotations

import numbers

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.feature_selection import SelectorMixin
from sklearn.utils._param_validation import Interval, StrOptions
from sklearn.utils.validation import check_is_fitted, validate_data

from .dataset import CategoricalDataset
from .entropy import resolve_base
from .ranking import svfr, svfs
from .shapley import ApproxConfig, compute_shapley


class _ShapleySelectorBase(SelectorMixin, BaseEstimator):
    _parameter_constraints: dict = {
        "approx": [StrOptions({"full", "bounded", "sampled"})],
        "k": [Interval(numbers.Integral, 1, None, closed="left"), None],
        "n_permutations": [Interval(numbers.Integral, 1, None, closed="left")],
        "base": [StrOptions({"2", "e", "10"}), Interval(numbers.Real, 0, None, closed="neither")],
        "random_state": ["random_state"],
        "n_jobs": [Interval(numbers.Integral, 1, None, closed="left"), None],
    }

    def _approx_config(self) -> ApproxConfig:
        if self.approx == "bounded":
            if self.k is None:
                raise ValueError("approx='bounded' requires k")
            return ApproxConfig("bounded", k=self.k)
        if self.approx == "sampled":
            seed = self.random_state
            if not isinstance(seed, numbers.Integral):
                seed = int(np.random.default_rng(seed).integers(2**63 - 1))
            return ApproxConfig("sampled", n=self.n_permutations, seed=int(seed))
        return ApproxConfig("full")

    def _fit_scores(self, X):
        X = validate_data(self, X, dtype=None, ensure_all_finite=False, ensure_min_features=1)
        names = getattr(self, "feature_names_in_", None)
        ds = CategoricalDataset.from_array(X, None if names is None else list(names))
        base = resolve_base(self.base)
        scores = compute_shapley(ds, self._approx_config(), base, n_jobs=self.n_jobs or 1)
        self.shapley_values_ = scores.values.copy()
        return ds, scores

    def _get_support_mask(self):
        check_is_fitted(self, "order_")
        mask = np.zeros(self.n_features_in_, dtype=bool)
        mask[self.selected_] = True
        return mask

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.allow_nan = True
        tags.input_tags.string = True
        tags.input_tags.categorical = True
        tags.target_tags.required = False
        return tags


class SVFRRanker(_ShapleySelectorBase):
    """Rank all features by Shapley value penalised for redundancy, keep the top ones.

    Parameters
    ----------
    n_features_to_select : int or None, default=3
        How many top-ranked features ``transform`` keeps. ``None`` keeps all.
    cap : int or None, default=None
        Stop ranking after this many features.
    approx : {"full", "bounded", "sampled"}, default="full"
        Shapley estimator.
    k : int, optional
        Largest subset size for ``approx="bounded"``.
    n_permutations : int, default=200
        Orderings drawn for ``approx="sampled"``.
    base : {2, "e", 10}, default=2
        Logarithm base of all entropies.
    random_state : int, RandomState or None
        Seed for the sampled estimator.
    n_jobs : int, optional
        Worker threads; results do not depend on it.

    Attributes
    ----------
    shapley_values_ : ndarray of shape (n_features_in_,)
    order_ : ndarray
        Ranked feature indices.
    ranking_ : RankingResult
    selected_ : ndarray
        Indices kept by ``transform``.
    """

    _parameter_constraints: dict = {
        **_ShapleySelectorBase._parameter_constraints,
        "n_features_to_select": [Interval(numbers.Integral, 1, None, closed="left"), None],
        "cap": [Interval(numbers.Integral, 1, None, closed="left"), None],
    }

    def __init__(
        self,
        n_features_to_select=3,
        *,
        cap=None,
        approx="full",
        k=None,
        n_permutations=200,
        base=2,
        random_state=None,
        n_jobs=None,
    ):
        self.n_features_to_select = n_features_to_select
        self.cap = cap
        self.approx = approx
        self.k = k
        self.n_permutations = n_permutations
        self.base = base
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self._validate_params()
        ds, scores = self._fit_scores(X)
        self.ranking_ = svfr(ds, scores, cap=self.cap)
        self.order_ = np.asarray(self.ranking_.order, dtype=np.intp)
        keep = len(self.order_) if self.n_features_to_select is None else self.n_features_to_select
        self.selected_ = self.order_[:keep]
        return self


class SVFSSelector(_ShapleySelectorBase):
    """Greedy Shapley selection that rejects features redundant beyond ``epsilon``.

    ``epsilon`` is in the units of ``base`` (bits by default). See
    :class:`SVFRRanker` for the shared parameters.
    """

    _parameter_constraints: dict = {
        **_ShapleySelectorBase._parameter_constraints,
        "epsilon": [Interval(numbers.Real, 0, None, closed="left")],
    }

    def __init__(
        self,
        epsilon=0.5,
        *,
        approx="full",
        k=None,
        n_permutations=200,
        base=2,
        random_state=None,
        n_jobs=None,
    ):
        self.epsilon = epsilon
        self.approx = approx
        self.k = k
        self.n_permutations = n_permutations
        self.base = base
        self.random_state = random_state
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        self._validate_params()
        ds, scores = self._fit_scores(X)
        self.ranking_ = svfs(ds, self.epsilon, scores)
        self.order_ = np.asarray(self.ranking_.order, dtype=np.intp)
        self.selected_ = self.order_
        return self

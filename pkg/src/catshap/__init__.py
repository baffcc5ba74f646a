"""Unsupervised feature ranking for categorical data via total-correlation Shapley values."""

from .dataset import (
    CategoricalDataset,
    DatasetError,
    FeatureColumn,
    IngestOptions,
    bin_numeric,
    load_csv,
    project,
)
from .entropy import (
    EntropyCache,
    FeatureSubset,
    PartitionState,
    entropy_of_partition,
    joint_entropy,
    marginal_contribution,
    refine_partition,
    total_correlation,
)
from .metrics import RedundancyReport, pearson_abs, recall_at_k, redundancy_rate
from .ranking import RankingResult, StepRecord, svfr, svfs, svfs_sweep
from .shapley import (
    ApproxConfig,
    ShapleyScores,
    compute_shapley,
    shapley_bounded,
    shapley_full,
    shapley_oracle_permutations,
    shapley_sampled,
)

__version__ = "0.1.0"

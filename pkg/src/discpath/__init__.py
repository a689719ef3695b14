"""Mine ranked feature-threshold rule paths that refine a binary classifier's output."""

from .data import (ConfusionCounts, EmptySubsetError, LabeledDataset, Mode, Schema, SchemaError,
                   WorkingSubset, confusion_counts, load_dataset, working_subset)
from .histogram import (ConstantFeatureError, HistogramConfig, ReducedHistogram,
                        build_reduced_histogram, candidate_thresholds, cumulative_counts)
from .objective import (DEFAULT_ALPHA_LADDER, DeltaMetrics, ObjectiveConfig, constraint_threshold,
                        gini_score, objective_score, satisfies_constraint, tune_alpha)
from .pipeline import mine
from .report import SearchReport, apply_path, depth_trace, emit_report, parse_report
from .search import (DiscriminationPath, Rule, SearchGraph, best_threshold_for_feature,
                     dfs_search, enumerate_paths, rank_features, select_optimal_path)

__version__ = "0.1.0"

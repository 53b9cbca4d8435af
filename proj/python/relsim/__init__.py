"""Relational-similarity features from clinician-patient visit graphs."""

from ._core import (
    ConvergenceError,
    DataError,
    NumericalError,
    RelsimError,
    UndefinedMetricError,
    UsageError,
    default_config,
    dense_eigen,
    extract_similarity_features,
    format_improvement,
    improvement_percent,
    normalized_laplacian,
    pr_auc,
    precision_at_k,
    run_experiment,
    top_k_eigenpairs,
)

__all__ = [
    "ConvergenceError",
    "DataError",
    "NumericalError",
    "RelsimError",
    "UndefinedMetricError",
    "UsageError",
    "default_config",
    "dense_eigen",
    "extract_similarity_features",
    "format_improvement",
    "improvement_percent",
    "normalized_laplacian",
    "pr_auc",
    "precision_at_k",
    "run_experiment",
    "top_k_eigenpairs",
]

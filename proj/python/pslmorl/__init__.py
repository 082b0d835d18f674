"""Preference-conditioned multi-objective RL: hypernetwork-fused policies,
Pareto-front metrics, and desk-scale benchmark environments."""

from ._core import (
    FtnEnv,
    PointNavEnv,
    __version__,
    cosine_similarity,
    directional_angle,
    evaluate_checkpoint,
    hypervolume,
    pareto_filter,
    sample_preferences,
    scalarize,
    simplex_grid,
    sparsity,
    train,
    verification_report,
)

__all__ = [
    "FtnEnv",
    "PointNavEnv",
    "__version__",
    "cosine_similarity",
    "directional_angle",
    "evaluate_checkpoint",
    "hypervolume",
    "pareto_filter",
    "sample_preferences",
    "scalarize",
    "simplex_grid",
    "sparsity",
    "train",
    "verification_report",
]

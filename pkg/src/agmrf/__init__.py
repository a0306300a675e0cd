"""Adversarially trained ensembles of pairwise MRFs, with BP-based inference."""
from .bp import Evidence, batch_inference, inference, inference_unrolled
from .graph import (
    GraphStructure,
    brute_force_log_partition,
    brute_force_marginals,
    log_score,
    make_grid_structure,
    make_random_structure,
    param_index,
)

__version__ = "0.1.0"

__all__ = [
    "Evidence",
    "GraphStructure",
    "batch_inference",
    "brute_force_log_partition",
    "brute_force_marginals",
    "inference",
    "inference_unrolled",
    "log_score",
    "make_grid_structure",
    "make_random_structure",
    "param_index",
]

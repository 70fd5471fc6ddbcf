"""Memory-based collaborative filtering on unweighted bipartite networks.

The heavy lifting lives in the C++ extension; this package re-exports it.
"""

from saplingcf._core import (  # noqa: F401
    BipartiteGraph,
    co_occurrence_row,
    decision_sapling,
    delta_gini,
    evaluate,
    filter_min_degree,
    gini_impurity,
    holdout_validation_split,
    load_edge_list,
    mae_rmse,
    metric_value,
    metrics,
    ndcg_at_k,
    precision_at_k,
    project_network,
    recall_at_k,
    sapling_value,
    scores,
    similarity_rows,
    top_n,
    tune_gamma,
    write_edge_list,
)

__all__ = [
    "BipartiteGraph",
    "co_occurrence_row",
    "decision_sapling",
    "delta_gini",
    "evaluate",
    "filter_min_degree",
    "gini_impurity",
    "holdout_validation_split",
    "load_edge_list",
    "mae_rmse",
    "metric_value",
    "metrics",
    "ndcg_at_k",
    "precision_at_k",
    "project_network",
    "recall_at_k",
    "sapling_value",
    "scores",
    "similarity_rows",
    "top_n",
    "tune_gamma",
    "write_edge_list",
]

"""Relatives-based sortability of random DAGs.

The number of relatives of a node (descendants of its ancestors) grows
monotonically along every edge of a DAG.  This package measures how
strongly random-graph generators order nodes by that count, verifies the
matching probability bound for ER DAGs, exploits the pattern for causal
discovery, links it to Markov equivalence class collapse, and provides
time-unrolled DAG sampling as an alternative generator without the
pattern.
"""

from .graphs import Dag, NodeSet
from .samplers import (Rng, SummaryGraph, chain_summary, has_mutual_reachability,
                       sample_er_dag, sample_sf_dag, sample_symmetric_summary,
                       total_order_summary, unroll, unroll_labels)
from .scm import (LinearScm, population_covariance, read_data_csv,
                  sample_observations, sample_params, write_data_csv)
from .sortability import (SortabilityUndefinedError, lower_bound_edge,
                          r2_criterion, rel_criterion, sortability, var_criterion)
from .discovery import (adaptive_lasso_bic, correlation_matrix,
                        correlation_threshold, criterion_order,
                        estimate_relative_counts, estimate_relative_order, ols,
                        rel_sort_n_regress, sort_n_regress)
from .mec import (Pdag, cpdag, enumerate_mec, meek_closure,
                  orientation_witnesses, skeleton, unshielded_colliders)
from .metrics import order_divergence, shd, sid

__version__ = "0.1.0"

__all__ = [
    "Dag", "NodeSet", "Rng", "SummaryGraph",
    "chain_summary", "has_mutual_reachability", "sample_er_dag", "sample_sf_dag",
    "sample_symmetric_summary", "total_order_summary", "unroll", "unroll_labels",
    "LinearScm", "population_covariance", "read_data_csv", "sample_observations",
    "sample_params", "write_data_csv",
    "SortabilityUndefinedError", "lower_bound_edge", "r2_criterion",
    "rel_criterion", "sortability", "var_criterion",
    "adaptive_lasso_bic", "correlation_matrix", "correlation_threshold",
    "criterion_order", "estimate_relative_counts", "estimate_relative_order",
    "ols", "rel_sort_n_regress", "sort_n_regress",
    "Pdag", "cpdag", "enumerate_mec", "meek_closure", "orientation_witnesses",
    "skeleton", "unshielded_colliders",
    "order_divergence", "shd", "sid",
]

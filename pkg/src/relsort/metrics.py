"""Structural evaluation metrics: Hamming distance on edge status, the
intervention distance based on parent adjustment, and the order-divergence
companion of sortability."""

from __future__ import annotations

import numpy as np

from .graphs import Dag, moralized_separated


def shd(g_true: Dag, g_est: Dag) -> int:
    """Number of node pairs whose edge status (absent, ->, <-) differs."""
    _check_sizes(g_true, g_est)
    a, b = g_true.adj, g_est.adj
    diff = (a != b) | (a.T != b.T)
    return int(np.triu(diff, k=1).sum())


def sid(g_true: Dag, g_est: Dag) -> int:
    """Ordered pairs (i, j) whose interventional effect would be inferred
    incorrectly when adjusting for the estimated parents of i.

    A pair counts as a mistake when the estimated parent set either
    contains j while j is a true descendant of i (the estimate predicts no
    effect), or fails the adjustment criterion in the true graph.
    """
    _check_sizes(g_true, g_est)
    n = g_true.n
    reach = g_true.reachability()
    mistakes = 0
    for i in range(n):
        z_mask = g_est.adj[:, i].copy()
        for j in range(n):
            if j == i:
                continue
            if z_mask[j]:
                if reach[i, j]:
                    mistakes += 1
            elif not _valid_adjustment(g_true, i, j, z_mask):
                mistakes += 1
    return mistakes


def _valid_adjustment(g: Dag, i: int, j: int, z_mask: np.ndarray) -> bool:
    """Generalized adjustment criterion for the pair (i, j) and set Z.

    Z must avoid every node on a directed path from i to j (i excluded)
    and their descendants, and must block every non-causal path, which is
    checked by d-separation in the graph with the first edges of causal
    paths removed.
    """
    reach = g.reachability()
    causal = reach[i] & reach[:, j]
    causal[i] = False
    given = frozenset(np.flatnonzero(z_mask).tolist())
    if not causal.any():
        return moralized_separated(g.adj, i, j, given)
    forbidden = reach[causal].any(axis=0)
    if (z_mask & forbidden).any():
        return False
    pbd = np.array(g.adj)
    pbd[i, causal] = False
    return moralized_separated(pbd, i, j, given)


def order_divergence(g: Dag, order) -> int:
    """Number of edges pointing backwards under the given node order."""
    order = np.asarray(order, dtype=np.int64)
    if sorted(order.tolist()) != list(range(g.n)):
        raise ValueError("order must be a permutation of 0..n-1")
    pos = np.empty(g.n, dtype=np.int64)
    pos[order] = np.arange(g.n)
    edges = g.edges()
    if edges.shape[0] == 0:
        return 0
    return int(np.count_nonzero(pos[edges[:, 0]] > pos[edges[:, 1]]))


def _check_sizes(g_true: Dag, g_est: Dag) -> None:
    if g_true.n != g_est.n:
        raise ValueError(f"graph sizes differ: {g_true.n} vs {g_est.n}")

"""Immutable directed acyclic graphs and the reachability queries built on them.

Nodes are dense integer indices ``0..n-1``.  All set-valued queries
(parents, ancestors, descendants, roots, relatives) return frozensets so
results can be hashed, compared and shared freely.  Reachability is cached
as a boolean closure matrix per graph, which makes relatives and
d-separation cheap for the graph sizes used in the experiments (up to a
few thousand nodes).
"""

from __future__ import annotations

import heapq
from typing import Iterable, Sequence

import numpy as np

# Set of node indices; every query below returns one of these.
NodeSet = frozenset


class Dag:
    """Directed acyclic graph with adjacency matrix ``adj[i, j] == (i -> j)``.

    Instances are immutable after construction and safe to share across
    threads.  ``order`` is the causal order the graph was built with (any
    topological order is accepted); ``topological_order()`` is the
    canonical Kahn order and does not depend on how the graph was created.
    """

    __slots__ = ("n", "adj", "order", "_kahn", "_reach", "_rel_counts")

    def __init__(self, adj, order: Sequence[int] | None = None):
        adj = np.array(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be a square matrix, got shape {adj.shape}")
        n = adj.shape[0]
        if n < 1:
            raise ValueError("a Dag needs at least one node")
        if adj.diagonal().any():
            raise ValueError("self-loops are not allowed in a Dag")
        adj.setflags(write=False)
        self.n = n
        self.adj = adj
        self._kahn: tuple[int, ...] | None = None
        self._reach: np.ndarray | None = None
        self._rel_counts: np.ndarray | None = None
        if order is None:
            self.order = self.topological_order()
        else:
            order = tuple(int(v) for v in order)
            _check_topological(adj, order)
            self.order = order

    # -- construction helpers -------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]],
                   order: Sequence[int] | None = None) -> "Dag":
        adj = np.zeros((n, n), dtype=bool)
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i, j] = True
        return cls(adj, order=order)

    @classmethod
    def from_edge_list(cls, text: str) -> "Dag":
        """Parse the plain edge-list interchange format.

        First non-empty line is the node count, every following line is an
        ``i j`` pair meaning ``i -> j``.  Self-loops and cycles are rejected.
        """
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty edge-list text")
        n = int(lines[0])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"malformed edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls.from_edges(n, edges)

    def to_edge_list(self) -> str:
        lines = [str(self.n)]
        lines.extend(f"{i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"

    # -- basic structure -------------------------------------------------------

    def edges(self) -> np.ndarray:
        """Edge pairs as an (E, 2) int array, sorted by (tail, head)."""
        return np.argwhere(self.adj)

    @property
    def num_edges(self) -> int:
        return int(self.adj.sum())

    def _check_node(self, v: int) -> int:
        v = int(v)
        if not 0 <= v < self.n:
            raise ValueError(f"node index {v} out of range for n={self.n}")
        return v

    def parents(self, y: int) -> NodeSet:
        """Nodes x with an edge x -> y."""
        y = self._check_node(y)
        return frozenset(np.flatnonzero(self.adj[:, y]).tolist())

    def children(self, x: int) -> NodeSet:
        """Nodes y with an edge x -> y."""
        x = self._check_node(x)
        return frozenset(np.flatnonzero(self.adj[x]).tolist())

    # -- reachability ----------------------------------------------------------

    def reachability(self) -> np.ndarray:
        """Boolean closure matrix R with R[i, j] iff i reaches j (R[i, i] holds)."""
        if self._reach is None:
            self._reach = _closure(self.adj, self.topological_order())
        return self._reach

    def descendants(self, x: int) -> NodeSet:
        """Nodes reachable from x by a directed path, including x itself."""
        x = self._check_node(x)
        return frozenset(np.flatnonzero(self.reachability()[x]).tolist())

    def ancestors(self, y: int) -> NodeSet:
        """Nodes with a directed path to y, including y itself."""
        y = self._check_node(y)
        return frozenset(np.flatnonzero(self.reachability()[:, y]).tolist())

    def roots(self, y: int) -> NodeSet:
        """Parentless ancestors of y (y itself when it has no parents)."""
        y = self._check_node(y)
        anc = self.reachability()[:, y]
        parentless = ~self.adj.any(axis=0)
        return frozenset(np.flatnonzero(anc & parentless).tolist())

    def relatives(self, y: int) -> NodeSet:
        """Descendants of the ancestors of y: everything sharing an ancestor with y."""
        y = self._check_node(y)
        reach = self.reachability()
        rel = reach[reach[:, y]].any(axis=0)
        return frozenset(np.flatnonzero(rel).tolist())

    def relatives_counts(self) -> np.ndarray:
        """|relatives(v)| for every node v, as one int vector.

        Computed in one shot: with closure R, node z is a relative of v iff
        some u reaches both v and z, i.e. (R^T R)[v, z] > 0.
        """
        if self._rel_counts is None:
            reach = self.reachability().astype(np.float32)
            rel = reach.T @ reach > 0
            counts = rel.sum(axis=1).astype(np.int64)
            counts.setflags(write=False)
            self._rel_counts = counts
        return self._rel_counts

    def topological_order(self) -> tuple[int, ...]:
        """Kahn's algorithm with lowest-index tie-breaking; deterministic."""
        if self._kahn is None:
            self._kahn = _kahn_order(self.adj)
        return self._kahn

    # -- conditional independence ----------------------------------------------

    def d_separated(self, x: int, y: int, given: Iterable[int] = ()) -> bool:
        """Whether every path between x and y is blocked by the set ``given``.

        Implemented as reachability on the moralized ancestral subgraph of
        {x, y} plus the conditioning set.
        """
        x = self._check_node(x)
        y = self._check_node(y)
        given = frozenset(self._check_node(z) for z in given)
        if x == y:
            raise ValueError("d-separation needs two distinct nodes")
        if x in given or y in given:
            raise ValueError("query nodes may not be part of the conditioning set")
        return moralized_separated(self.adj, x, y, given)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dag) and self.n == other.n and bool(
            (self.adj == other.adj).all())

    def __hash__(self) -> int:
        return hash((self.n, self.adj.tobytes()))

    def __repr__(self) -> str:
        return f"Dag(n={self.n}, edges={self.num_edges})"


def _kahn_order(adj: np.ndarray) -> tuple[int, ...]:
    n = adj.shape[0]
    indeg = adj.sum(axis=0).astype(np.int64)
    ready = [v for v in range(n) if indeg[v] == 0]
    heapq.heapify(ready)
    out: list[int] = []
    while ready:
        v = heapq.heappop(ready)
        out.append(v)
        for w in np.flatnonzero(adj[v]).tolist():
            indeg[w] -= 1
            if indeg[w] == 0:
                heapq.heappush(ready, w)
    if len(out) != n:
        raise ValueError("graph contains a directed cycle")
    return tuple(out)


def _check_topological(adj: np.ndarray, order: tuple[int, ...]) -> None:
    n = adj.shape[0]
    if sorted(order) != list(range(n)):
        raise ValueError("order must be a permutation of 0..n-1")
    pos = np.empty(n, dtype=np.int64)
    pos[list(order)] = np.arange(n)
    tails, heads = np.nonzero(adj)
    if (pos[tails] >= pos[heads]).any():
        raise ValueError("order is not a topological order of the graph")


def _closure(adj: np.ndarray, topo: tuple[int, ...]) -> np.ndarray:
    """Reflexive transitive closure, accumulated in reverse topological order."""
    n = adj.shape[0]
    reach = np.eye(n, dtype=bool)
    for v in reversed(topo):
        kids = np.flatnonzero(adj[v])
        if kids.size:
            reach[v] |= reach[kids].any(axis=0)
    reach.setflags(write=False)
    return reach


def _ancestral_mask(adj: np.ndarray, seeds: np.ndarray) -> np.ndarray:
    """Nodes with a directed path into the seed set (seeds included)."""
    mask = seeds.copy()
    frontier = seeds.copy()
    while frontier.any():
        preds = adj[:, frontier].any(axis=1) & ~mask
        mask |= preds
        frontier = preds
    return mask


def moralized_separated(adj: np.ndarray, x: int, y: int, given: frozenset) -> bool:
    """d-separation test on a raw adjacency matrix.

    Restrict to the ancestral set of {x, y} and the conditioning set,
    moralize (marry parents, drop directions), delete the conditioning
    nodes, and test whether x still reaches y.
    """
    n = adj.shape[0]
    seeds = np.zeros(n, dtype=bool)
    seeds[[x, y]] = True
    for z in given:
        seeds[z] = True
    anc = _ancestral_mask(adj, seeds)

    sub = adj & anc[:, None] & anc[None, :]
    moral = sub | sub.T
    for child in np.flatnonzero(sub.any(axis=0)).tolist():
        pa = np.flatnonzero(sub[:, child])
        if pa.size > 1:
            moral[np.ix_(pa, pa)] = True
    np.fill_diagonal(moral, False)

    alive = anc.copy()
    for z in given:
        alive[z] = False
    reached = np.zeros(n, dtype=bool)
    reached[x] = True
    frontier = reached.copy()
    while frontier.any():
        nxt = moral[frontier].any(axis=0) & alive & ~reached
        reached |= nxt
        frontier = nxt
    return not reached[y]

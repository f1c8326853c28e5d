"""Random graph generators: ER DAGs, scale-free DAGs, and time-unrolled DAGs
built from (possibly cyclic) summary graphs."""

from __future__ import annotations

import warnings
import zlib
from typing import Iterable

import numpy as np
from scipy.sparse.csgraph import connected_components

from .graphs import Dag


class ProbabilityClampWarning(UserWarning):
    """Edge probability exceeded 1 and was clamped."""


class Rng:
    """Seeded random stream with derivable, order-independent substreams.

    Substreams are keyed by arbitrary (str / int / float) parts, so parallel
    replicates can each own an independent stream that does not depend on
    scheduling order.  Identical seed and key always reproduce the stream.
    """

    def __init__(self, seed: int, _key: tuple[int, ...] = ()):
        self.seed = int(seed)
        self._key = _key
        seq = np.random.SeedSequence(self.seed, spawn_key=_key)
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def substream(self, *key) -> "Rng":
        words = tuple(_key_word(part) for part in key)
        return Rng(self.seed, self._key + words)

    def __repr__(self) -> str:
        return f"Rng(seed={self.seed}, key={self._key})"


def _key_word(part) -> int:
    if isinstance(part, (bool, np.bool_)):
        return int(part)
    if isinstance(part, (int, np.integer)):
        v = int(part)
        if 0 <= v < 2**32:
            return v
        return zlib.crc32(str(v).encode())
    if isinstance(part, (float, np.floating)):
        return zlib.crc32(repr(float(part)).encode())
    if isinstance(part, str):
        return zlib.crc32(part.encode())
    raise TypeError(f"cannot derive a substream key from {type(part).__name__}")


def sample_er_dag(n: int, c: float, rng: Rng) -> Dag:
    """ER DAG: node order drawn uniformly, each forward pair kept with
    probability min(2c/(n-1), 1), giving about c*n edges."""
    if n < 2:
        raise ValueError("sample_er_dag needs n >= 2")
    if c <= 0:
        raise ValueError("edge density parameter c must be positive")
    p = 2.0 * c / (n - 1)
    if p > 1.0:
        warnings.warn(
            f"edge probability 2c/(n-1) = {p:.3g} clamped to 1 (n={n}, c={c})",
            ProbabilityClampWarning,
            stacklevel=2,
        )
        p = 1.0
    gen = rng.generator
    perm = gen.permutation(n)
    keep = np.triu(gen.random((n, n)) < p, k=1)
    adj = np.zeros((n, n), dtype=bool)
    adj[np.ix_(perm, perm)] = keep
    return Dag(adj, order=perm)


def sample_sf_dag(n: int, c: float, rng: Rng) -> Dag:
    """Scale-free DAG: an undirected preferential-attachment graph (star
    initialization, attachment probability proportional to degree + 1),
    oriented along a uniformly random node order."""
    if n < 2:
        raise ValueError("sample_sf_dag needs n >= 2")
    c_int = int(c)
    if c_int != c or not 1 <= c_int < n:
        raise ValueError(f"attachments per node must be an integer in [1, n), got {c!r}")
    c = c_int
    gen = rng.generator

    star = min(c + 1, n)
    und: list[tuple[int, int]] = [(0, k) for k in range(1, star)]
    deg = np.zeros(n, dtype=np.float64)
    deg[0] = star - 1
    deg[1:star] = 1.0

    for new in range(star, n):
        weights = deg[:new] + 1.0
        for _ in range(c):
            probs = weights / weights.sum()
            target = int(gen.choice(new, p=probs))
            weights[target] = 0.0
            und.append((target, new))
            deg[target] += 1.0
        deg[new] = c

    perm = gen.permutation(n)
    pos = np.empty(n, dtype=np.int64)
    pos[perm] = np.arange(n)
    adj = np.zeros((n, n), dtype=bool)
    for u, v in und:
        if pos[u] < pos[v]:
            adj[u, v] = True
        else:
            adj[v, u] = True
    return Dag(adj, order=perm)


class SummaryGraph:
    """Directed, possibly cyclic graph with a mandatory self-loop on every node.

    Serves as the per-variable template that ``unroll`` expands into a DAG
    over time slices.
    """

    __slots__ = ("p", "adj")

    def __init__(self, adj):
        adj = np.array(adj, dtype=bool)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
            raise ValueError(f"adjacency must be a square matrix, got shape {adj.shape}")
        p = adj.shape[0]
        if p < 2:
            raise ValueError("a SummaryGraph needs at least two nodes")
        if not adj.diagonal().all():
            raise ValueError("every summary-graph node needs a self-loop")
        adj.setflags(write=False)
        self.p = p
        self.adj = adj

    @property
    def num_edges(self) -> int:
        return int(self.adj.sum())

    def edges(self) -> np.ndarray:
        return np.argwhere(self.adj)

    @classmethod
    def from_edges(cls, p: int, edges: Iterable[tuple[int, int]]) -> "SummaryGraph":
        adj = np.zeros((p, p), dtype=bool)
        np.fill_diagonal(adj, True)
        for i, j in edges:
            if not (0 <= i < p and 0 <= j < p):
                raise ValueError(f"edge ({i}, {j}) out of range for p={p}")
            adj[i, j] = True
        return cls(adj)

    @classmethod
    def from_edge_list(cls, text: str) -> "SummaryGraph":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or lines[0] != "# summary":
            raise ValueError("summary-graph text must start with a '# summary' line")
        p = int(lines[1])
        adj = np.zeros((p, p), dtype=bool)
        for ln in lines[2:]:
            i, j = (int(tok) for tok in ln.split())
            adj[i, j] = True
        return cls(adj)

    def to_edge_list(self) -> str:
        lines = ["# summary", str(self.p)]
        lines.extend(f"{i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"

    def __repr__(self) -> str:
        return f"SummaryGraph(p={self.p}, edges={self.num_edges})"


def unroll(s: SummaryGraph, T: int) -> Dag:
    """Expand a summary graph into the DAG over T time slices.

    Node v at time t (1-based) has index (t-1)*p + v; every summary edge
    (i, j) becomes (i at t) -> (j at t+1) for each transition.
    """
    if T <= 1:
        raise ValueError("unroll needs a horizon T > 1")
    p = s.p
    n = p * T
    adj = np.zeros((n, n), dtype=bool)
    for t in range(T - 1):
        adj[t * p:(t + 1) * p, (t + 1) * p:(t + 2) * p] = s.adj
    return Dag(adj, order=range(n))


def unroll_labels(p: int, T: int) -> tuple[str, ...]:
    """Human-readable labels for unrolled nodes, index-aligned with unroll()."""
    return tuple(f"x{v}({t})" for t in range(1, T + 1) for v in range(p))


def has_mutual_reachability(s: SummaryGraph) -> bool:
    """Whether i reaching j always implies j reaching i.

    Equivalent to every weakly connected component being strongly
    connected, which is the condition under which unrolled DAGs lose their
    relatives ordering as the horizon grows.
    """
    n_strong, _ = connected_components(s.adj, directed=True, connection="strong")
    n_weak, _ = connected_components(s.adj, directed=True, connection="weak")
    return n_strong == n_weak


def sample_symmetric_summary(p: int, c: float, rng: Rng) -> SummaryGraph:
    """ER draw on unordered pairs with both directions added per kept pair,
    plus self-loops; mutual reachability holds by construction."""
    if p < 2:
        raise ValueError("sample_symmetric_summary needs p >= 2")
    if c <= 0:
        raise ValueError("edge density parameter c must be positive")
    prob = min(2.0 * c / (p - 1), 1.0)
    keep = np.triu(rng.generator.random((p, p)) < prob, k=1)
    adj = keep | keep.T
    np.fill_diagonal(adj, True)
    return SummaryGraph(adj)


def chain_summary(p: int) -> SummaryGraph:
    """One-directional chain plus self-loops.

    Violates mutual reachability, so unrolled sortability never collapses
    to 1/2.  Self-loop edges tie once a variable's ancestry saturates, so
    it settles near (p - 1 + p/2) / (2p - 1) rather than 1.
    """
    if p < 2:
        raise ValueError("chain_summary needs p >= 2")
    adj = np.eye(p, dtype=bool)
    adj[np.arange(p - 1), np.arange(1, p)] = True
    return SummaryGraph(adj)


def total_order_summary(p: int) -> SummaryGraph:
    """Complete one-directional summary: u -> v for every u < v, plus
    self-loops.  The maximally asymmetric contrast case; unrolled
    sortability stays near 1 - p / (2 |E_S|)."""
    if p < 2:
        raise ValueError("total_order_summary needs p >= 2")
    return SummaryGraph(np.triu(np.ones((p, p), dtype=bool)))

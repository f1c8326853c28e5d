"""Markov equivalence machinery: skeletons, unshielded colliders, Meek
orientation rules, CPDAG construction, exhaustive MEC enumeration, and the
witness checks behind unique identifiability under strictly increasing
relatives."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graphs import Dag
from .sortability import rel_criterion, sortability

MEC_NODE_LIMIT = 10


class Pdag:
    """Partially directed graph: disjoint directed and undirected edge sets."""

    __slots__ = ("n", "directed", "undirected")

    def __init__(self, directed, undirected):
        directed = np.array(directed, dtype=bool)
        undirected = np.array(undirected, dtype=bool)
        if directed.shape != undirected.shape or directed.ndim != 2 \
                or directed.shape[0] != directed.shape[1]:
            raise ValueError("directed and undirected must be square matrices of equal size")
        if directed.diagonal().any() or undirected.diagonal().any():
            raise ValueError("self-loops are not allowed")
        if (undirected != undirected.T).any():
            raise ValueError("undirected edges must be symmetric")
        if (directed & (undirected | directed.T)).any():
            raise ValueError("an edge cannot be both directed and undirected (or both ways)")
        directed.setflags(write=False)
        undirected.setflags(write=False)
        self.n = directed.shape[0]
        self.directed = directed
        self.undirected = undirected

    @property
    def num_undirected(self) -> int:
        return int(self.undirected.sum()) // 2

    def is_fully_directed(self) -> bool:
        return not self.undirected.any()

    def adjacency(self) -> np.ndarray:
        """Symmetric adjacency of the skeleton."""
        return self.directed | self.directed.T | self.undirected

    def to_edge_list(self) -> str:
        """Lines ``i j d`` for directed and ``i j u`` (i < j) for undirected edges."""
        lines = [str(self.n)]
        for i, j in np.argwhere(self.directed):
            lines.append(f"{i} {j} d")
        for i, j in np.argwhere(np.triu(self.undirected)):
            lines.append(f"{i} {j} u")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edge_list(cls, text: str) -> "Pdag":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        n = int(lines[0])
        directed = np.zeros((n, n), dtype=bool)
        undirected = np.zeros((n, n), dtype=bool)
        for ln in lines[1:]:
            i, j, kind = ln.split()
            i, j = int(i), int(j)
            if kind == "d":
                directed[i, j] = True
            elif kind == "u":
                undirected[i, j] = undirected[j, i] = True
            else:
                raise ValueError(f"unknown edge marker {kind!r}")
        return cls(directed, undirected)

    def __eq__(self, other) -> bool:
        return isinstance(other, Pdag) and self.n == other.n \
            and bool((self.directed == other.directed).all()) \
            and bool((self.undirected == other.undirected).all())

    def __hash__(self) -> int:
        return hash((self.n, self.directed.tobytes(), self.undirected.tobytes()))

    def __repr__(self) -> str:
        return (f"Pdag(n={self.n}, directed={int(self.directed.sum())}, "
                f"undirected={self.num_undirected})")


def skeleton(g: Dag) -> Pdag:
    """All edges made undirected."""
    und = g.adj | g.adj.T
    return Pdag(np.zeros_like(und), und)


def unshielded_colliders(g: Dag) -> frozenset:
    """Triples (a, b, c) with a -> b <- c, a and c non-adjacent, a < c."""
    adj = g.adj
    sym = adj | adj.T
    triples = set()
    for b in range(g.n):
        pa = np.flatnonzero(adj[:, b])
        for ia in range(pa.size):
            for ic in range(ia + 1, pa.size):
                a, c = int(pa[ia]), int(pa[ic])
                if not sym[a, c]:
                    triples.add((a, b, c))
    return frozenset(triples)


def cpdag(g: Dag) -> Pdag:
    """Skeleton with every collider edge oriented and the Meek closure applied."""
    directed = np.zeros((g.n, g.n), dtype=bool)
    undirected = g.adj | g.adj.T
    for a, b, c in unshielded_colliders(g):
        for tail in (a, c):
            directed[tail, b] = True
            undirected[tail, b] = undirected[b, tail] = False
    return meek_closure(Pdag(directed, undirected))


def meek_closure(p: Pdag) -> Pdag:
    """Apply the four orientation-propagation rules until fixpoint."""
    directed = p.directed.copy()
    undirected = p.undirected.copy()
    n = p.n
    adj = directed | directed.T | undirected

    def orient(x: int, y: int) -> None:
        directed[x, y] = True
        undirected[x, y] = undirected[y, x] = False

    changed = True
    while changed:
        changed = False
        for x in range(n):
            for y in np.flatnonzero(undirected[x]).tolist():
                # Rule 1: some w -> x with w, y non-adjacent.
                if (directed[:, x] & ~adj[:, y] & (np.arange(n) != y)).any():
                    orient(x, y)
                    changed = True
                    continue
                # Rule 2: a directed chain x -> z -> y.
                if (directed[x] & directed[:, y]).any():
                    orient(x, y)
                    changed = True
                    continue
                # Rule 3: two non-adjacent z1, z2 with x - z and z -> y.
                zs = np.flatnonzero(undirected[x] & directed[:, y])
                done = False
                for i in range(zs.size):
                    for k in range(i + 1, zs.size):
                        if not adj[zs[i], zs[k]]:
                            orient(x, y)
                            changed = True
                            done = True
                            break
                    if done:
                        break
                if done:
                    continue
                # Rule 4: a chain w -> z -> y with x, w adjacent and y, w not.
                ws = np.flatnonzero(adj[x] & ~adj[y] & (np.arange(n) != y))
                if ws.size and (directed[np.ix_(ws, np.flatnonzero(directed[:, y]))]).any():
                    orient(x, y)
                    changed = True
    return Pdag(directed, undirected)


def enumerate_mec(g: Dag) -> list[Dag]:
    """All DAGs sharing the skeleton and unshielded colliders of g.

    Exhaustive orientation search with acyclicity and collider-preservation
    pruning; guarded to small graphs.
    """
    if g.n > MEC_NODE_LIMIT:
        raise ValueError(f"MEC enumeration is limited to n <= {MEC_NODE_LIMIT}")
    n = g.n
    sym = g.adj | g.adj.T
    required = unshielded_colliders(g)

    # Collider edges are forced in every member.
    forced: dict[tuple[int, int], tuple[int, int]] = {}
    for a, b, c in required:
        for tail in (a, c):
            forced[(min(tail, b), max(tail, b))] = (tail, b)

    all_edges = [(int(i), int(j)) for i, j in np.argwhere(np.triu(sym))]
    free_edges = [e for e in all_edges if e not in forced]

    directed = np.zeros((n, n), dtype=bool)
    for tail, head in forced.values():
        directed[tail, head] = True

    def reaches(src: int, dst: int) -> bool:
        if src == dst:
            return True
        seen = np.zeros(n, dtype=bool)
        stack = [src]
        seen[src] = True
        while stack:
            v = stack.pop()
            for w in np.flatnonzero(directed[v]).tolist():
                if w == dst:
                    return True
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return False

    def collider_ok(tail: int, head: int) -> bool:
        # Any collider completed by tail -> head must be a required one.
        for other in np.flatnonzero(directed[:, head]).tolist():
            if other != tail and not sym[other, tail]:
                trip = (min(other, tail), head, max(other, tail))
                if trip not in required:
                    return False
        return True

    members: list[Dag] = []

    def assign(k: int) -> None:
        if k == len(free_edges):
            members.append(Dag(directed.copy()))
            return
        u, v = free_edges[k]
        for tail, head in ((u, v), (v, u)):
            if reaches(head, tail):  # would close a directed cycle
                continue
            directed[tail, head] = True
            if collider_ok(tail, head):
                assign(k + 1)
            directed[tail, head] = False

    # The forced skeleton may already be cyclic only if g was inconsistent,
    # which cannot happen for a real DAG input.
    assign(0)
    return members


@dataclass(frozen=True)
class NodeWitness:
    """Evidence that all edges into one node orient: a pair of non-adjacent
    parents, and for every covered parent an edge onto a collider parent."""
    node: int
    nonadjacent_parents: tuple[int, int]
    covered_to_collider: dict


def orientation_witnesses(g: Dag) -> dict:
    """For a DAG whose relatives counts strictly ascend along every edge,
    exhibit why its skeleton orients completely.

    Every non-root must center an unshielded collider, and every parent
    adjacent to all other parents must point at some collider parent
    (which is what lets the third orientation rule fire).  Raises if the
    precondition fails or a witness is missing.
    """
    if sortability(g, rel_criterion(g)) != 1.0:
        raise ValueError("witnesses need a graph with strictly ascending relatives")
    sym = g.adj | g.adj.T
    report: dict[int, NodeWitness] = {}
    for y in range(g.n):
        pa = sorted(g.parents(y))
        if not pa:
            continue
        pair = None
        for i in range(len(pa)):
            for k in range(i + 1, len(pa)):
                if not sym[pa[i], pa[k]]:
                    pair = (pa[i], pa[k])
                    break
            if pair:
                break
        if pair is None:
            raise ValueError(f"node {y} is not the center of any unshielded collider")
        covered = [x for x in pa if all(sym[x, o] for o in pa if o != x)]
        colliding = [x for x in pa if x not in covered]
        links = {}
        for x in covered:
            targets = [d for d in colliding if g.adj[x, d]]
            if not targets:
                raise ValueError(f"covered parent {x} of {y} has no collider-parent child")
            links[x] = targets[0]
        report[y] = NodeWitness(y, pair, links)
    return report

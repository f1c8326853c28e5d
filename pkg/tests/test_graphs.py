import itertools

import numpy as np
import pytest

import oracles
from relsort import Dag

COLLIDER = Dag.from_edges(3, [(0, 2), (1, 2)])  # 0 -> 2 <- 1
CHAIN = Dag.from_edges(3, [(0, 1), (1, 2)])


class TestConstruction:
    def test_rejects_self_loop(self):
        adj = np.zeros((2, 2), dtype=bool)
        adj[0, 0] = True
        with pytest.raises(ValueError, match="self-loop"):
            Dag(adj)

    def test_rejects_cycle(self):
        with pytest.raises(ValueError, match="cycle"):
            Dag.from_edges(2, [(0, 1), (1, 0)])

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            Dag(np.zeros((2, 3), dtype=bool))

    def test_rejects_inconsistent_order(self):
        with pytest.raises(ValueError, match="topological"):
            Dag.from_edges(2, [(0, 1)], order=(1, 0))

    def test_keeps_construction_order(self):
        g = Dag.from_edges(3, [(2, 0)], order=(1, 2, 0))
        assert g.order == (1, 2, 0)
        assert g.topological_order() == (1, 2, 0) or g.topological_order()[0] != 0

    def test_adjacency_is_immutable(self):
        with pytest.raises(ValueError):
            COLLIDER.adj[0, 1] = True

    def test_edge_out_of_range(self):
        with pytest.raises(ValueError, match="out of range"):
            Dag.from_edges(2, [(0, 5)])


class TestLocalQueries:
    def test_parents_collider(self):
        assert COLLIDER.parents(2) == {0, 1}

    def test_parents_empty_graph(self):
        g = Dag(np.zeros((3, 3), dtype=bool))
        assert g.parents(1) == frozenset()

    def test_parents_chain(self):
        assert CHAIN.parents(1) == {0}

    def test_children_chain(self):
        assert CHAIN.children(0) == {1}

    def test_children_collider_center(self):
        assert COLLIDER.children(2) == frozenset()

    def test_children_fully_connected(self):
        g = Dag.from_edges(3, [(0, 1), (0, 2), (1, 2)])
        assert g.children(0) == {1, 2}

    def test_out_of_range_node(self):
        with pytest.raises(ValueError, match="out of range"):
            COLLIDER.parents(3)
        with pytest.raises(ValueError, match="out of range"):
            COLLIDER.relatives(-1)


class TestReachability:
    def test_ancestors_chain(self):
        assert CHAIN.ancestors(2) == {0, 1, 2}

    def test_ancestors_collider_tail(self):
        assert COLLIDER.ancestors(0) == {0}

    def test_ancestors_single_node(self):
        g = Dag(np.zeros((1, 1), dtype=bool))
        assert g.ancestors(0) == {0}

    def test_descendants_chain(self):
        assert CHAIN.descendants(0) == {0, 1, 2}

    def test_descendants_collider_center(self):
        assert COLLIDER.descendants(2) == {2}

    def test_descendants_isolated(self):
        g = Dag(np.zeros((2, 2), dtype=bool))
        assert g.descendants(1) == {1}

    def test_roots_collider(self):
        assert COLLIDER.roots(2) == {0, 1}

    def test_roots_chain(self):
        assert CHAIN.roots(2) == {0}

    def test_roots_isolated(self):
        g = Dag(np.zeros((2, 2), dtype=bool))
        assert g.roots(0) == {0}

    def test_relatives_collider(self):
        assert COLLIDER.relatives(0) == {0, 2}
        assert COLLIDER.relatives(2) == {0, 1, 2}

    def test_relatives_chain_all_equal(self):
        assert CHAIN.relatives(0) == CHAIN.relatives(1) == CHAIN.relatives(2) == {0, 1, 2}

    def test_relatives_isolated(self):
        g = Dag(np.zeros((2, 2), dtype=bool))
        assert g.relatives(0) == {0}

    def test_relatives_match_bruteforce_on_random_dags(self, small_er_corpus):
        for g in small_er_corpus[:40]:
            counts = g.relatives_counts()
            for v in range(g.n):
                expected = oracles.relatives_of(np.asarray(g.adj), v)
                assert g.relatives(v) == expected
                assert counts[v] == len(expected)


class TestTopologicalOrder:
    def test_chain(self):
        assert CHAIN.topological_order() == (0, 1, 2)

    def test_empty_graph_tie_break(self):
        g = Dag(np.zeros((3, 3), dtype=bool))
        assert g.topological_order() == (0, 1, 2)

    def test_collider(self):
        assert COLLIDER.topological_order() == (0, 1, 2)

    def test_respects_edges_on_random_dags(self, small_er_corpus):
        for g in small_er_corpus[:30]:
            pos = {v: k for k, v in enumerate(g.topological_order())}
            for i, j in g.edges():
                assert pos[int(i)] < pos[int(j)]


class TestDSeparation:
    def test_collider_marginally_independent(self):
        assert COLLIDER.d_separated(0, 1) is True

    def test_collider_opened_by_conditioning(self):
        assert COLLIDER.d_separated(0, 1, [2]) is False

    def test_chain_blocked_by_middle(self):
        assert CHAIN.d_separated(0, 2, [1]) is True

    def test_chain_open_marginally(self):
        assert CHAIN.d_separated(0, 2) is False

    def test_argument_errors(self):
        with pytest.raises(ValueError):
            CHAIN.d_separated(0, 0)
        with pytest.raises(ValueError):
            CHAIN.d_separated(0, 2, [0])

    def test_symmetry_and_oracle_exhaustive_n4(self, all_dags_by_n):
        for adj in all_dags_by_n[4]:
            g = Dag(adj)
            for x, y in itertools.combinations(range(4), 2):
                rest = [v for v in range(4) if v not in (x, y)]
                for r in range(len(rest) + 1):
                    for zs in itertools.combinations(rest, r):
                        got = g.d_separated(x, y, zs)
                        assert got == g.d_separated(y, x, zs)
                        assert got == oracles.d_separated_brute(adj, x, y, set(zs))

    def test_oracle_random_n5_n6(self, small_er_corpus):
        checked = 0
        for g in small_er_corpus:
            if g.n not in (5, 6):
                continue
            adj = np.asarray(g.adj)
            for x, y in itertools.combinations(range(g.n), 2):
                rest = [v for v in range(g.n) if v not in (x, y)]
                for zs in itertools.combinations(rest, 2):
                    assert g.d_separated(x, y, zs) == \
                        oracles.d_separated_brute(adj, x, y, set(zs))
                    checked += 1
        assert checked > 1000


class TestRelativesProperties:
    def test_monotone_along_edges(self, corpus_200):
        for g in corpus_200:
            reach = g.reachability()
            for i, j in g.edges():
                assert g.relatives(int(i)) <= g.relatives(int(j))
            assert reach is g.reachability()

    def test_relatives_contain_ancestors_and_descendants(self, corpus_200):
        for g in corpus_200[:60]:
            for v in range(g.n):
                assert g.ancestors(v) | g.descendants(v) <= g.relatives(v)

    def test_relatives_closed_under_descendants(self, small_er_corpus):
        for g in small_er_corpus[:40]:
            for v in range(g.n):
                rel = g.relatives(v)
                for z in rel:
                    assert g.descendants(z) <= rel

    def test_ancestral_subset_equivalences(self, small_er_corpus, all_dags_by_n):
        # rel(x) strictly below rel(y) iff new roots iff new root ancestry,
        # for x an ancestor of y.
        graphs = [Dag(a) for a in all_dags_by_n[4]] + small_er_corpus[:40]
        for g in graphs:
            for y in range(g.n):
                for x in g.ancestors(y):
                    strict = g.relatives(x) < g.relatives(y)
                    via_rel = bool(g.roots(y) - g.relatives(x))
                    via_roots = bool(g.roots(y) - g.roots(x))
                    via_anc = bool(g.ancestors(y) - g.relatives(x))
                    assert strict == via_rel == via_roots == via_anc


class TestEdgeListFormat:
    def test_round_trip(self):
        text = COLLIDER.to_edge_list()
        assert text.splitlines()[0] == "3"
        assert Dag.from_edge_list(text) == COLLIDER

    def test_rejects_cycle_text(self):
        with pytest.raises(ValueError, match="cycle"):
            Dag.from_edge_list("2\n0 1\n1 0\n")

    def test_rejects_self_loop_text(self):
        with pytest.raises(ValueError, match="self-loop"):
            Dag.from_edge_list("2\n1 1\n")

    def test_rejects_malformed(self):
        with pytest.raises(ValueError):
            Dag.from_edge_list("2\n0 1 2\n")
        with pytest.raises(ValueError):
            Dag.from_edge_list("")

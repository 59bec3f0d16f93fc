import itertools

import numpy as np
import pytest

import hclocal as hc
from hclocal import oracle
from hclocal.errors import InputError

from .conftest import random_sim


class TestEnumeration:
    @pytest.mark.parametrize("n,count", [(2, 1), (3, 3), (4, 15), (5, 105),
                                         (6, 945), (7, 10395)])
    def test_counts(self, n, count):
        assert oracle.double_factorial_count(n) == count
        assert len(oracle.enumerate_trees(n)) == count

    def test_trees_are_distinct_and_parseable(self):
        space = oracle.enumerate_trees(5)
        assert len(set(space.trees)) == 105
        for text in space.trees:
            t = hc.parse(text)
            assert t.validate()
            assert t.serialize() == text

    def test_out_of_range_rejected(self):
        with pytest.raises(InputError):
            oracle.enumerate_trees(9)
        with pytest.raises(InputError):
            oracle.enumerate_trees(1)


class TestExactOptimum:
    def test_i4(self, i4):
        t, rev = oracle.exact_optimum(i4)
        assert t.serialize() == "((1,2),(3,4));"
        assert rev == pytest.approx(12.0)

    def test_unit_weights_four(self, unit4):
        # cost is constant (n^3 - n)/3 = 20, so revenue is n*total - 20 = 4
        _, rev = oracle.exact_optimum(unit4)
        assert rev == pytest.approx(4.0)

    def test_two_leaves(self):
        w = hc.SimilarityMatrix(np.array([[0.0, 5.0], [5.0, 0.0]]))
        t, rev = oracle.exact_optimum(w)
        assert t.serialize() == "(1,2);"
        assert rev == pytest.approx(0.0)

    def test_agrees_with_fast_objective(self):
        rng = np.random.default_rng(50)
        for n in (4, 5, 6):
            w = random_sim(n, rng)
            space = oracle.enumerate_trees(n)
            best_fast = max(float(hc.revenue(hc.parse(s), w))
                            for s in space.trees)
            _, rev = oracle.exact_optimum(w)
            assert rev == pytest.approx(best_fast, rel=1e-12)

    def test_i4_every_local_optimum_has_revenue_12(self, i4):
        # exhaustive landscape sweep backing the search convergence test
        for text in oracle.enumerate_trees(4).trees:
            t = hc.parse(text)
            if hc.certify_local_optimality(t, i4).locally_optimal:
                assert hc.revenue(t, i4) == pytest.approx(12.0)


class TestInterchangeDistance:
    def test_zero_iff_equal(self):
        t = hc.parse("((1,2),(3,4));")
        assert oracle.idist_exact(t, t) == 0

    def test_single_swap_pair(self):
        t1 = hc.parse("((1,3),(2,4));")
        t2 = hc.parse("((1,(2,4)),3);")
        assert oracle.idist_exact(t1, t2) == 1

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_graph_connected(self, n):
        adj = oracle.interchange_graph(n)
        start = next(iter(adj))
        reach = oracle.bfs_distances(start, adj)
        assert len(reach) == oracle.double_factorial_count(n)

    def test_metric_axioms_exhaustive_n4(self):
        adj = oracle.interchange_graph(4)
        texts = sorted(adj)
        dist = {a: oracle.bfs_distances(a, adj) for a in texts}
        for a, b in itertools.product(texts, texts):
            assert (dist[a][b] == 0) == (a == b)
            assert dist[a][b] == dist[b][a]
        for a, b, c in itertools.product(texts, texts, texts):
            assert dist[a][c] <= dist[a][b] + dist[b][c]

    def test_finite_eccentricity_n4(self):
        adj = oracle.interchange_graph(4)
        ecc = max(max(oracle.bfs_distances(a, adj).values()) for a in adj)
        assert 1 <= ecc <= 6

    def test_mismatched_orders_rejected(self):
        with pytest.raises(InputError):
            oracle.idist_exact(hc.parse("(1,2);"), hc.parse("((1,2),3);"))

    def test_size_cap(self):
        t = hc.random_tree(7, 0)
        with pytest.raises(InputError):
            oracle.idist_exact(t, t)


class TestNeighborGeneration:
    def test_neighbor_count(self):
        for n in (3, 4, 5):
            for text in oracle.enumerate_trees(n).trees[:20]:
                nbs = oracle.neighbors_of_text(text)
                # 2(n-2) moves, possibly yielding coinciding trees
                assert 1 <= len(nbs) <= 2 * (n - 2)

    def test_neighbors_stay_in_space(self):
        space = set(oracle.enumerate_trees(4).trees)
        for text in space:
            assert oracle.neighbors_of_text(text) <= space

    def test_neighbor_relation_symmetric(self):
        adj = oracle.interchange_graph(5)
        for a, nbs in adj.items():
            for b in nbs:
                assert a in adj[b]

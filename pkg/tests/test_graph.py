from itertools import combinations

import networkx as nx
import pytest
from hypothesis import given, strategies as st

from bntomo.graph import (
    UNBOUNDED,
    Network,
    disjoint_paths,
    min_degree,
    path_through_avoiding,
    st_separator,
    vertex_connectivity,
)
from bntomo.topologies import build_augmented_hypergrid, build_hypergrid, canonical_placement

from oracles import bf_disjoint_count, bf_kappa, bf_st_separator, bf_through, disconnects, is_simple_path, to_nx
from strategies import networks, schemes


def complete(n):
    return Network.from_edges(n, combinations(range(n), 2))


def cycle(n):
    return Network.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n):
    return Network.from_edges(n, [(i, i + 1) for i in range(n - 1)])


class TestNetwork:
    def test_dedupes_and_sorts(self):
        g = Network.from_edges(3, [(1, 0), (0, 1), (2, 1)])
        assert g.edges == ((0, 1), (1, 2))
        assert g.adjacency == ((1,), (0, 2), (1,))

    @pytest.mark.parametrize("edges", [[(0, 0)], [(0, 3)], [(-1, 0)]])
    def test_rejects_bad_edges(self, edges):
        with pytest.raises(ValueError):
            Network.from_edges(3, edges)

    @given(networks())
    def test_adjacency_symmetric(self, g):
        for u in range(g.vertex_count):
            for v in g.neighbors(u):
                assert u in g.neighbors(v)
                assert g.has_edge(u, v) and g.has_edge(v, u)
        assert sum(g.degrees()) == 2 * len(g.edges)

    def test_is_path(self):
        g = cycle(5)
        assert g.is_path((0, 1, 2))
        assert not g.is_path((0, 2))
        assert not g.is_path((0, 1, 0))


class TestMinDegree:
    def test_examples(self):
        assert min_degree(complete(4)) == 3
        assert min_degree(build_augmented_hypergrid(4, 2, 3)[0]) == 4
        assert min_degree(path_graph(2)) == 1

    def test_empty(self):
        with pytest.raises(ValueError, match="empty network"):
            min_degree(Network.from_edges(0, []))


class TestVertexConnectivity:
    def test_examples(self):
        assert vertex_connectivity(cycle(5)).kappa == 2
        rep = vertex_connectivity(complete(4))
        assert rep.kappa == 3 and rep.complete
        assert vertex_connectivity(build_hypergrid(3, 2)[0]).kappa == 2

    def test_disconnected(self):
        rep = vertex_connectivity(Network.from_edges(4, [(0, 1), (2, 3)]))
        assert rep.kappa == 0 and rep.disconnected and not rep.min_separator

    @given(networks(2, 8))
    def test_matches_brute_force(self, g):
        rep = vertex_connectivity(g)
        assert rep.kappa == bf_kappa(g)
        assert rep.kappa <= rep.min_degree == min_degree(g)
        if not rep.complete and not rep.disconnected:
            assert len(rep.min_separator) == rep.kappa
            assert disconnects(g, rep.min_separator)

    def test_matches_networkx_on_hypergrids(self):
        for n, d, omega in [(4, 2, 3), (3, 3, 3), (5, 2, 4)]:
            g, _ = build_augmented_hypergrid(n, d, omega)
            assert vertex_connectivity(g).kappa == nx.node_connectivity(to_nx(g))


class TestStSeparator:
    def test_examples(self):
        assert st_separator(path_graph(3), {0}, {2}) == (1, frozenset({1}))
        assert st_separator(path_graph(3), {0, 1}, {1}) == (UNBOUNDED, frozenset())
        assert st_separator(path_graph(3), {0}, {1})[0] == UNBOUNDED
        assert st_separator(cycle(6), {0}, {3})[0] == 2

    @given(schemes(3, 8))
    def test_matches_brute_force(self, case):
        g, S, T = case
        size, cut = st_separator(g, S, T)
        assert size == bf_st_separator(g, S, T)
        if size != UNBOUNDED:
            assert len(cut) == size and not cut & (S | T)
            h = to_nx(g)
            h.remove_nodes_from(cut)
            assert not any(nx.has_path(h, s, t) for s in S for t in T)
            assert size >= vertex_connectivity(g).kappa

    def test_empty_sets_rejected(self):
        with pytest.raises(ValueError):
            st_separator(path_graph(3), set(), {2})


class TestDisjointPaths:
    def test_cycle_arcs(self):
        paths = disjoint_paths(cycle(5), 0, 2)
        assert sorted(paths) == [(0, 1, 2), (0, 4, 3, 2)]

    def test_star_center_forbidden(self):
        star = Network.from_edges(4, [(0, 1), (0, 2), (0, 3)])
        assert disjoint_paths(star, 1, 2, forbidden={0}) == []

    def test_endpoint_forbidden(self):
        with pytest.raises(ValueError):
            disjoint_paths(cycle(5), 0, 2, forbidden={0})

    @given(networks(3, 8), st.data())
    def test_disjoint_and_maximal(self, g, data):
        u, v = data.draw(st.lists(st.integers(0, g.vertex_count - 1), min_size=2, max_size=2, unique=True))
        others = [x for x in range(g.vertex_count) if x not in (u, v)]
        W = set(data.draw(st.lists(st.sampled_from(others), unique=True))) if others else set()
        paths = disjoint_paths(g, u, v, W, want=3)
        inner = [set(p[1:-1]) for p in paths]
        for p in paths:
            assert p[0] == u and p[-1] == v and is_simple_path(g, p) and not W & set(p)
        for a, b in combinations(inner, 2):
            assert not a & b
        assert len(paths) == min(3, bf_disjoint_count(g, u, v, W))

    @given(networks(4, 8), st.data())
    def test_two_paths_when_w_small(self, g, data):
        kappa = vertex_connectivity(g).kappa
        if kappa < 2:
            return
        perm = data.draw(st.permutations(range(g.vertex_count)))
        w = data.draw(st.integers(0, min(kappa - 2, g.vertex_count - 2)))
        u, v, W = perm[0], perm[1], set(perm[2:2 + w])
        assert len(disjoint_paths(g, u, v, W)) == 2


class TestPathThroughAvoiding:
    def test_examples(self):
        g = path_graph(3)
        assert path_through_avoiding(g, {0}, {2}, 1) == (0, 1, 2)
        assert path_through_avoiding(g, {0}, {2}, 0, {1}) is None

    def test_v_in_avoid(self):
        with pytest.raises(ValueError):
            path_through_avoiding(path_graph(3), {0}, {2}, 1, {1})

    @given(schemes(3, 10), st.data())
    def test_matches_dfs(self, case, data):
        g, S, T = case
        v = data.draw(st.integers(0, g.vertex_count - 1))
        others = [x for x in range(g.vertex_count) if x != v]
        avoid = set(data.draw(st.lists(st.sampled_from(others), unique=True, max_size=3)))
        p = path_through_avoiding(g, S, T, v, avoid)
        assert (p is not None) == bf_through(g, S, T, v, avoid)
        if p is not None:
            assert is_simple_path(g, p) and v in p and not avoid & set(p)
            assert (p[0] in S and p[-1] in T) or (p[0] in T and p[-1] in S)

    def test_hypergrid_interior_with_three_obstacles(self):
        g, emb = build_augmented_hypergrid(4, 2, 3)
        pl = canonical_placement(emb)
        interior = [v for v in range(g.vertex_count) if all(1 < c < 4 for c in emb.point(v))]
        for v in interior:
            for W in list(combinations([x for x in range(g.vertex_count) if x != v], 3))[::7]:
                p = path_through_avoiding(g, pl.s_set, pl.t_set, v, W)
                assert (p is not None) == bf_through(g, pl.s_set, pl.t_set, v, W)
                if not set(W) & pl.monitors:
                    assert p is not None

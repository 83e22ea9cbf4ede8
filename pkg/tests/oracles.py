"""Brute-force reference implementations used to check the flow-based code.

Nothing here shares code with the package beyond the Network container.
"""
from itertools import combinations

import networkx as nx


def to_nx(g):
    h = nx.Graph()
    h.add_nodes_from(range(g.vertex_count))
    h.add_edges_from(g.edges)
    return h


def disconnects(g, removed):
    h = to_nx(g)
    h.remove_nodes_from(removed)
    return h.number_of_nodes() > 0 and not nx.is_connected(h)


def bf_kappa(g):
    n = g.vertex_count
    for k in range(n - 1):
        if any(disconnects(g, X) for X in combinations(range(n), k)):
            return k
    return n - 1


def bf_st_separator(g, S, T):
    S, T = set(S), set(T)
    if S & T or any(g.has_edge(s, t) for s in S for t in T):
        return float("inf")
    inner = [x for x in range(g.vertex_count) if x not in S | T]
    for k in range(len(inner) + 1):
        for X in combinations(inner, k):
            h = to_nx(g)
            h.remove_nodes_from(X)
            if not any(nx.has_path(h, s, t) for s in S for t in T):
                return k
    raise AssertionError("unreachable")


def all_st_paths(g, S, T):
    """Every simple path with first vertex in S and last vertex in T."""
    h = to_nx(g)
    out = []
    for s in sorted(S):
        for t in sorted(T):
            out.extend(tuple(p) for p in nx.all_simple_paths(h, s, t))
    return out


def bf_through(g, S, T, v, avoid):
    """Exhaustive over simple v-to-S legs; for each, BFS for a T-leg avoiding it.

    A path through v joins S to T iff some leg from v to S and some leg from v
    to T share only v, so fixing the S-leg reduces the rest to reachability.
    """
    avoid = set(avoid)
    if v in avoid:
        return False
    h = to_nx(g)
    h.remove_nodes_from(avoid)

    def t_reachable(blocked):
        h2 = h.copy()
        h2.remove_nodes_from(blocked - {v})
        return any(t in h2 and nx.has_path(h2, v, t) for t in T if t not in blocked or t == v)

    def legs(x, on_path):
        if x in S:
            yield on_path
        for y in h.neighbors(x):
            if y not in on_path:
                yield from legs(y, on_path | {y})

    return any(t_reachable(leg) for leg in legs(v, {v}))


def bf_mu(g, S, T):
    """mu over the path-covered vertices by comparing explicit path sets; None if no pair fails."""
    paths = all_st_paths(g, S, T)
    nodes = sorted({x for p in paths for x in p})
    hits = {x: frozenset(i for i, p in enumerate(paths) if x in p) for x in nodes}
    seen = {frozenset()}
    for k in range(1, len(nodes) + 1):
        for combo in combinations(nodes, k):
            ps = frozenset().union(*(hits[x] for x in combo))
            if ps in seen:
                return k - 1
            seen.add(ps)
    return None


def is_simple_path(g, p):
    return len(set(p)) == len(p) and all(g.has_edge(a, b) for a, b in zip(p, p[1:]))


def bf_disjoint_count(g, u, v, forbidden=()):
    """Maximum number of internally disjoint u-v paths avoiding ``forbidden``, via Menger.

    A direct edge is one path; the rest equals the smallest set of other
    vertices whose removal (with the edge) separates u from v.
    """
    h = to_nx(g)
    h.remove_nodes_from(forbidden)
    direct = int(h.has_edge(u, v))
    if direct:
        h.remove_edge(u, v)
    inner = [x for x in h.nodes if x not in (u, v)]
    for k in range(len(inner) + 1):
        for X in combinations(inner, k):
            h2 = h.copy()
            h2.remove_nodes_from(X)
            if not nx.has_path(h2, u, v):
                return direct + k
    return direct + len(inner)

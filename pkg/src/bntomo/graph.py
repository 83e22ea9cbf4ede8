"""Immutable undirected graphs and the vertex-connectivity primitives built on split-vertex flows."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels

VertexSet = frozenset  # frozenset[int]
SimplePath = tuple  # tuple[int, ...]

UNBOUNDED = math.inf


@dataclass(frozen=True, eq=False)
class Network:
    """Simple undirected graph on vertices ``0 .. vertex_count-1``.

    Hashing is by identity so instances can key per-graph caches.
    """

    vertex_count: int
    edges: tuple
    adjacency: tuple = field(repr=False)

    @classmethod
    def from_edges(cls, vertex_count: int, edges: Iterable[Sequence[int]]) -> "Network":
        n = int(vertex_count)
        if n < 0:
            raise ValueError("vertex_count must be non-negative")
        es = set()
        for u, v in edges:
            u, v = int(u), int(v)
            if u == v:
                raise ValueError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for {n} vertices")
            es.add((u, v) if u < v else (v, u))
        nbrs = [[] for _ in range(n)]
        for u, v in es:
            nbrs[u].append(v)
            nbrs[v].append(u)
        adjacency = tuple(tuple(sorted(a)) for a in nbrs)
        return cls(n, tuple(sorted(es)), adjacency)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def neighbors(self, u: int) -> tuple:
        return self.adjacency[u]

    def degree(self, u: int) -> int:
        return len(self.adjacency[u])

    def degrees(self) -> np.ndarray:
        return np.fromiter((len(a) for a in self.adjacency), np.int64, self.vertex_count)

    @cached_property
    def _edge_set(self) -> frozenset:
        return frozenset(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return ((u, v) if u < v else (v, u)) in self._edge_set

    def components(self, removed: Iterable[int] = ()) -> list:
        """Connected components of the graph minus ``removed``, each a sorted list, ordered by min vertex."""
        gone = set(removed)
        seen = set(gone)
        comps = []
        for s in range(self.vertex_count):
            if s in seen:
                continue
            seen.add(s)
            comp, stack = [s], [s]
            while stack:
                x = stack.pop()
                for y in self.adjacency[x]:
                    if y not in seen:
                        seen.add(y)
                        comp.append(y)
                        stack.append(y)
            comps.append(sorted(comp))
        return comps

    def is_connected(self) -> bool:
        return self.vertex_count <= 1 or len(self.components()) == 1

    def is_complete(self) -> bool:
        n = self.vertex_count
        return self.edge_count == n * (n - 1) // 2

    def is_path(self, path: Sequence[int]) -> bool:
        """True iff ``path`` is a non-empty simple path of this graph."""
        if len(path) == 0 or len(set(path)) != len(path):
            return False
        if any(not (0 <= x < self.vertex_count) for x in path):
            return False
        return all(self.has_edge(a, b) for a, b in zip(path, path[1:]))


@dataclass(frozen=True)
class ConnectivityReport:
    kappa: int
    min_separator: frozenset
    min_degree: int
    complete: bool = False
    disconnected: bool = False


def min_degree(g: Network) -> int:
    if g.vertex_count == 0:
        raise ValueError("empty network")
    return min(len(a) for a in g.adjacency)


# ---------------------------------------------------------------------------
# split-vertex flow networks
#
# vertex x becomes in-node 2x and out-node 2x+1 joined by an internal arc;
# each undirected edge {x, y} becomes arcs out(x)->in(y) and out(y)->in(x).


class FlowGraph:
    """CSR residual network with explicit reverse arcs."""

    def __init__(self, n_nodes: int, tails, heads, caps):
        tails = np.asarray(tails, np.int64)
        heads = np.asarray(heads, np.int64)
        caps = np.asarray(caps, np.int64)
        m = tails.shape[0]
        t = np.concatenate([tails, heads])
        h = np.concatenate([heads, tails])
        c = np.concatenate([caps, np.zeros(m, np.int64)])
        rev0 = np.concatenate([np.arange(m, 2 * m), np.arange(m)])
        order = np.argsort(t, kind="stable")
        pos = np.empty(2 * m, np.int64)
        pos[order] = np.arange(2 * m)
        self.n_nodes = n_nodes
        self.heads = h[order]
        self.cap = c[order]
        self.rev = pos[rev0[order]]
        self.indptr = np.concatenate([[0], np.cumsum(np.bincount(t, minlength=n_nodes))]).astype(np.int64)
        self.arc_index = pos[:m]  # position of the i-th supplied arc

    def run(self, res, source: int, sink: int, limit: int) -> int:
        return int(_kernels.max_flow(self.indptr, self.heads, self.rev, res, source, sink, limit))

    def reachable(self, res, source: int) -> np.ndarray:
        return _kernels.reachable(self.indptr, self.heads, res, source)

    def decompose(self, cap, res, source: int, sink: int) -> list:
        """Split the flow encoded by ``cap - res`` into source->sink node sequences."""
        flow = cap - res
        flow[self.cap == 0] = 0
        paths = []
        while True:
            seq = [source]
            x = source
            while x != sink:
                nxt = -1
                for a in range(self.indptr[x], self.indptr[x + 1]):
                    if flow[a] > 0:
                        nxt = a
                        break
                if nxt < 0:
                    break
                flow[nxt] -= 1
                x = int(self.heads[nxt])
                if x in seq:  # drop a circulation
                    seq = seq[: seq.index(x) + 1]
                else:
                    seq.append(x)
            if x != sink:
                return paths
            paths.append(seq)


def _split_arcs(g: Network, edge_cap: int):
    n = g.vertex_count
    tails = [2 * x for x in range(n)]
    heads = [2 * x + 1 for x in range(n)]
    caps = [1] * n
    for x in range(n):
        for y in g.adjacency[x]:
            tails.append(2 * x + 1)
            heads.append(2 * y)
            caps.append(edge_cap)
    return tails, heads, caps


def _split_to_vertices(seq: Sequence[int], n: int) -> tuple:
    out = []
    for node in seq:
        if node < 2 * n:
            x = node // 2
            if not out or out[-1] != x:
                out.append(x)
    return tuple(out)


def _local_cut(g: Network, x: int, y: int, bound: int):
    """Minimum x-y vertex separator if smaller than ``bound``; x, y non-adjacent."""
    n = g.vertex_count
    big = n + 1
    fg = _split_flow_cache(g, big)
    res = fg.cap.copy()
    res[fg.arc_index[x]] = big
    res[fg.arc_index[y]] = big
    value = fg.run(res, 2 * x + 1, 2 * y, bound)
    if value >= bound:
        return value, None
    seen = fg.reachable(res, 2 * x + 1)
    cut = frozenset(z for z in range(n) if seen[2 * z] and not seen[2 * z + 1])
    return value, cut


@lru_cache(maxsize=64)
def _split_flow_cache(g: Network, edge_cap: int) -> FlowGraph:
    tails, heads, caps = _split_arcs(g, edge_cap)
    return FlowGraph(2 * g.vertex_count, tails, heads, caps)


def vertex_connectivity(g: Network) -> ConnectivityReport:
    """Vertex connectivity with a realising separator.

    Local cuts are taken from a minimum-degree vertex to each of its
    non-neighbours, then between non-adjacent pairs of its neighbours.
    Complete graphs report ``n - 1`` with an empty separator.
    """
    n = g.vertex_count
    if n < 2:
        raise ValueError("vertex connectivity needs at least 2 vertices")
    delta = min_degree(g)
    if not g.is_connected():
        return ConnectivityReport(0, frozenset(), delta, disconnected=True)
    if g.is_complete():
        return ConnectivityReport(n - 1, frozenset(), delta, complete=True)
    v = min(range(n), key=lambda x: (g.degree(x), x))
    best, best_cut = delta, frozenset(g.adjacency[v])
    nbrs = set(g.adjacency[v])
    for w in range(n):
        if w == v or w in nbrs:
            continue
        k, cut = _local_cut(g, v, w, best)
        if cut is not None and k < best:
            best, best_cut = k, cut
    for x, y in combinations(g.adjacency[v], 2):
        if g.has_edge(x, y):
            continue
        k, cut = _local_cut(g, x, y, best)
        if cut is not None and k < best:
            best, best_cut = k, cut
    return ConnectivityReport(best, best_cut, delta)


def st_separator(g: Network, s_set: Iterable[int], t_set: Iterable[int]):
    """Smallest vertex set outside S and T meeting every S-T path.

    Returns ``(UNBOUNDED, frozenset())`` when S and T intersect or are joined
    by an edge, otherwise ``(size, separator)``.
    """
    S, T = frozenset(s_set), frozenset(t_set)
    if not S or not T:
        raise ValueError("S and T must be non-empty")
    if S & T or any(g.has_edge(s, t) for s in S for t in T):
        return UNBOUNDED, frozenset()
    n = g.vertex_count
    big = n + 1
    tails, heads, caps = _split_arcs(g, big)
    src, snk = 2 * n, 2 * n + 1
    for x in S | T:
        caps[x] = big
    for s in sorted(S):
        tails.append(src)
        heads.append(2 * s)
        caps.append(big)
    for t in sorted(T):
        tails.append(2 * t + 1)
        heads.append(snk)
        caps.append(big)
    fg = FlowGraph(2 * n + 2, tails, heads, caps)
    res = fg.cap.copy()
    value = fg.run(res, src, snk, big)
    seen = fg.reachable(res, src)
    cut = frozenset(z for z in range(n) if seen[2 * z] and not seen[2 * z + 1])
    assert len(cut) == value
    return value, cut


def disjoint_paths(g: Network, u: int, v: int, forbidden: Iterable[int] = (), want: int = 2) -> list:
    """Up to ``want`` internally vertex-disjoint u-v paths in g minus ``forbidden``, shortest first."""
    if u == v:
        raise ValueError("endpoints must differ")
    W = frozenset(forbidden)
    if u in W or v in W:
        raise ValueError("endpoint in forbidden set")
    if want < 1:
        raise ValueError("want must be positive")
    n = g.vertex_count
    fg = _split_flow_cache(g, 1)
    cap = fg.cap.copy()
    for x in W:
        cap[fg.arc_index[x]] = 0
    res = cap.copy()
    value = fg.run(res, 2 * u + 1, 2 * v, want)
    if value == 0:
        return []
    paths = [(u,) + _split_to_vertices(seq[1:], n) for seq in fg.decompose(cap, res, 2 * u + 1, 2 * v)]
    paths.sort(key=lambda p: (len(p), p))
    return paths


class ThroughPathFinder:
    """Decides and builds simple S-T paths through a vertex avoiding a set.

    Two units leave v's in-node (capacity 2 there, 1 on every other vertex);
    one must drain into a sink fed by S, the other into a sink fed by T.  Value
    2 yields two legs meeting only at v; reversing the S-leg and appending the
    T-leg gives the path.
    """

    def __init__(self, g: Network, s_set: Iterable[int], t_set: Iterable[int]):
        self.g = g
        self.S = frozenset(s_set)
        self.T = frozenset(t_set)
        n = g.vertex_count
        tails, heads, caps = _split_arcs(g, n + 2)
        self.sink_s, self.sink_t, self.sink = 2 * n, 2 * n + 1, 2 * n + 2
        for s in sorted(self.S):
            tails.append(2 * s + 1)
            heads.append(self.sink_s)
            caps.append(1)
        for t in sorted(self.T):
            tails.append(2 * t + 1)
            heads.append(self.sink_t)
            caps.append(1)
        tails += [self.sink_s, self.sink_t]
        heads += [self.sink, self.sink]
        caps += [1, 1]
        self.flow = FlowGraph(2 * n + 3, tails, heads, caps)
        self.internal = self.flow.arc_index[:n].copy()

    def _blocked(self, avoid) -> np.ndarray:
        mask = np.zeros(self.g.vertex_count, np.bool_)
        if avoid:
            mask[list(avoid)] = True
        return mask

    def reach(self, avoid: Iterable[int] = (), candidates: Optional[Sequence[int]] = None) -> np.ndarray:
        """Boolean per candidate (default: all vertices): does a path through it avoid ``avoid``?"""
        if candidates is None:
            candidates = np.arange(self.g.vertex_count, dtype=np.int64)
        else:
            candidates = np.asarray(candidates, np.int64)
        fg = self.flow
        return _kernels.through_reach(fg.indptr, fg.heads, fg.rev, fg.cap, self.internal,
                                      self._blocked(frozenset(avoid)), candidates, self.sink)

    def exists(self, v: int, avoid: Iterable[int] = ()) -> bool:
        avoid = frozenset(avoid)
        if v in avoid:
            raise ValueError("v lies in the avoided set")
        return bool(self.reach(avoid, [v])[0])

    def find(self, v: int, avoid: Iterable[int] = ()) -> Optional[tuple]:
        avoid = frozenset(avoid)
        if v in avoid:
            raise ValueError("v lies in the avoided set")
        fg = self.flow
        cap = fg.cap.copy()
        for x in avoid:
            cap[self.internal[x]] = 0
        cap[self.internal[v]] = 2
        res = cap.copy()
        if fg.run(res, 2 * v, self.sink, 2) < 2:
            return None
        n = self.g.vertex_count
        legs = {}
        for seq in fg.decompose(cap, res, 2 * v, self.sink):
            legs[seq[-2]] = _split_to_vertices(seq, n)
        leg_s, leg_t = legs[self.sink_s], legs[self.sink_t]
        return tuple(reversed(leg_s)) + leg_t[1:]


@lru_cache(maxsize=32)
def _through_finder(g: Network, S: frozenset, T: frozenset) -> ThroughPathFinder:
    return ThroughPathFinder(g, S, T)


def path_through_avoiding(g: Network, s_set, t_set, v: int, avoid=()) -> Optional[tuple]:
    """A simple path starting in S, ending in T, visiting v and missing ``avoid``; None if none exists."""
    return _through_finder(g, frozenset(s_set), frozenset(t_set)).find(v, avoid)

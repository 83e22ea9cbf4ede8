"""Probing-scheme semantics: syndromes, separability, exact maximal identifiability.

A probing scheme is a graph plus a monitor placement (S, T); its path set is
every simple path with one end in S and the other in T.  The path set is never
materialised except by :func:`enumerate_paths`, which backs the brute-force
oracle :func:`mu_by_enumeration`.  Everything else reduces to the question
"is there an S-T path through v that avoids X?", answered by a two-unit flow.
"""
from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Optional, Sequence

import numpy as np

from . import _kernels
from .graph import (
    UNBOUNDED,
    Network,
    ThroughPathFinder,
    disjoint_paths,
    st_separator,
    vertex_connectivity,
)
from .topologies import MonitorPlacement

MAX_EXACT_NODES = 62


class PathUniverseTooLarge(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class ProbingScheme:
    network: Network
    placement: MonitorPlacement

    def __post_init__(self):
        self.placement.check(self.network)

    @classmethod
    def of(cls, g: Network, s_set: Iterable[int], t_set: Iterable[int]) -> "ProbingScheme":
        return cls(g, MonitorPlacement(frozenset(s_set), frozenset(t_set)))

    @property
    def S(self) -> frozenset:
        return self.placement.s_set

    @property
    def T(self) -> frozenset:
        return self.placement.t_set

    @cached_property
    def finder(self) -> ThroughPathFinder:
        return ThroughPathFinder(self.network, self.S, self.T)

    @cached_property
    def _exists(self):
        @lru_cache(maxsize=1 << 17)
        def exists(v: int, avoid: frozenset) -> bool:
            return self.finder.exists(v, avoid)

        return exists

    def through_exists(self, v: int, avoid: Iterable[int] = ()) -> bool:
        """Memoised: is there an S-T path through v avoiding ``avoid``?"""
        return self._exists(int(v), frozenset(avoid))

    @cached_property
    def universe(self) -> tuple:
        """Sorted vertices lying on at least one S-T path."""
        reach = self.finder.reach(())
        return tuple(int(v) for v in np.flatnonzero(reach))

    def check_path(self, path: Sequence[int]) -> None:
        if not self.network.is_path(path):
            raise ValueError(f"{tuple(path)} is not a simple path of the network")
        a, b = path[0], path[-1]
        if not ((a in self.S and b in self.T) or (a in self.T and b in self.S)):
            raise ValueError(f"{tuple(path)} does not join S to T")


# ---------------------------------------------------------------------------
# syndromes and explicit path universes


def evaluate_syndrome(scheme: ProbingScheme, paths: Sequence[Sequence[int]], failed: Iterable[int]) -> tuple:
    """Boolean outcome per path: True iff the path contains a failed vertex."""
    F = frozenset(failed)
    for p in paths:
        scheme.check_path(p)
    return tuple(any(x in F for x in p) for p in paths)


def enumerate_paths(scheme: ProbingScheme, cap: int = 200_000) -> list:
    """Every simple path from S to T (internal vertices unrestricted), by DFS."""
    g, S, T = scheme.network, scheme.S, scheme.T
    adj = g.adjacency
    out = []
    for s in sorted(S):
        on_path = [False] * g.vertex_count
        path = [s]
        on_path[s] = True
        stack = [iter(adj[s])]
        while stack:
            y = next(stack[-1], None)
            if y is None:
                stack.pop()
                on_path[path.pop()] = False
                continue
            if on_path[y]:
                continue
            path.append(y)
            on_path[y] = True
            if y in T:
                out.append(tuple(path))
                if len(out) > cap:
                    raise PathUniverseTooLarge(f"path universe too large (more than {cap} paths)")
            stack.append(iter(adj[y]))
    return out


# ---------------------------------------------------------------------------
# separability


@dataclass(frozen=True)
class SeparabilityVerdict:
    separable: bool
    witness_path: Optional[tuple] = None
    witness_side: Optional[str] = None  # "U" or "W": the set the path touches


def separable(scheme: ProbingScheme, u_set: Iterable[int], w_set: Iterable[int],
              certify: bool = True) -> SeparabilityVerdict:
    """Decide separability; with ``certify`` the verdict carries a witness path."""
    U, W = frozenset(u_set), frozenset(w_set)
    if U == W:
        raise ValueError("identical sets")
    for side, own, other in (("U", U, W), ("W", W, U)):
        for v in sorted(own - other):
            if scheme.through_exists(v, other):
                path = scheme.finder.find(v, other) if certify else None
                return SeparabilityVerdict(True, path, side)
    return SeparabilityVerdict(False)


class _SubsetSearch:
    """Level-by-level search over subsets of a node list encoded as int64 bitmasks.

    Subsets are ordered by size then lexicographically; pairs with larger
    member of size k are checked after all pairs below k, ordered by that
    larger member then by the smaller one.
    """

    def __init__(self, scheme: ProbingScheme, nodes: Sequence[int]):
        self.scheme = scheme
        self.nodes = np.asarray(sorted(set(int(x) for x in nodes)), np.int64)
        if len(self.nodes) > MAX_EXACT_NODES:
            raise ValueError(f"exact search limited to {MAX_EXACT_NODES} nodes, got {len(self.nodes)}")
        self.bits = np.left_shift(np.int64(1), np.arange(len(self.nodes), dtype=np.int64))
        self.masks = np.zeros(0, np.int64)
        self.reach = np.zeros(0, np.int64)
        self.level = -1

    def _reach_mask(self, subset: tuple) -> int:
        ok = self.scheme.finder.reach(self.nodes[list(subset)], self.nodes)
        return int(self.bits[ok].sum())

    def _decode(self, mask: int) -> frozenset:
        return frozenset(int(self.nodes[i]) for i in range(len(self.nodes)) if (mask >> i) & 1)

    def advance(self):
        """Add the next level; return the first failing pair at that level or None."""
        k = self.level + 1
        combos = list(combinations(range(len(self.nodes)), k))
        masks = np.fromiter((int(self.bits[list(c)].sum()) for c in combos), np.int64, len(combos))
        reach = np.fromiter((self._reach_mask(c) for c in combos), np.int64, len(combos))
        start = len(self.masks)
        self.masks = np.concatenate([self.masks, masks])
        self.reach = np.concatenate([self.reach, reach])
        self.level = k
        i, j = _kernels.first_nonseparable(self.masks, self.reach, start, len(self.masks))
        if i < 0:
            return None
        return self._decode(int(self.masks[i])), self._decode(int(self.masks[j]))


def is_k_identifiable(scheme: ProbingScheme, k: int, nodes: Optional[Iterable[int]] = None):
    """``(True, None)`` if all distinct subsets of ``nodes`` of size <= k are separable, else ``(False, pair)``."""
    if k < 1:
        raise ValueError("k must be positive")
    search = _SubsetSearch(scheme, scheme.universe if nodes is None else nodes)
    while search.level < min(k, len(search.nodes)):
        pair = search.advance()
        if pair is not None:
            return False, pair
    return True, None


@dataclass
class IdentifiabilityReport:
    mu: int
    exact: bool
    failing_pair: Optional[tuple]
    bounds: dict = field(default_factory=dict)
    universe: tuple = ()
    runtime_ms: float = 0.0

    def to_json_dict(self) -> dict:
        fp = None
        if self.failing_pair is not None:
            fp = {"U": sorted(self.failing_pair[0]), "W": sorted(self.failing_pair[1])}
        bounds = {k: (None if v == UNBOUNDED else v) for k, v in self.bounds.items()}
        if "ub_witness" in bounds and bounds["ub_witness"] is not None:
            U, W = bounds["ub_witness"]
            bounds["ub_witness"] = {"U": sorted(U), "W": sorted(W)}
        return {
            "mu": self.mu,
            "mu_exact": self.exact,
            "bounds": bounds,
            "failing_pair": fp,
            "universe": list(self.universe),
            "runtime_ms": round(self.runtime_ms, 3),
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_dict(), **kw)


def default_k_max(scheme: ProbingScheme) -> int:
    """One more than the least universe-internal degree of a universe vertex.

    For such a vertex x with universe neighbours N, every path through x also
    meets N, so (N, N + {x}) is never separable and the search must stop by then.
    """
    uni = set(scheme.universe)
    if not uni:
        return 1
    return 1 + min(sum(1 for y in scheme.network.adjacency[x] if y in uni) for x in uni)


def scheme_bounds(scheme: ProbingScheme) -> dict:
    g = scheme.network
    conn = vertex_connectivity(g) if g.vertex_count >= 2 else None
    kappa = conn.kappa if conn else 0
    kst, _ = st_separator(g, scheme.S, scheme.T)
    return {
        "delta": conn.min_degree if conn else 0,
        "kappa": kappa,
        "kappa_st": kst,
        "lb_thm5": min(kappa, len(scheme.S), len(scheme.T)) - 2,
        "ub_thm4": kst,
    }


def max_identifiability(scheme: ProbingScheme, k_max: Optional[int] = None, with_bounds: bool = True) -> IdentifiabilityReport:
    """Largest k <= k_max for which the path-covered vertices are k-identifiable.

    ``exact`` is False when no failure was found up to ``k_max`` (mu is then
    only a lower bound).
    """
    t0 = time.perf_counter()
    if k_max is None:
        k_max = default_k_max(scheme)
    if k_max < 1:
        raise ValueError("k_max must be positive")
    search = _SubsetSearch(scheme, scheme.universe)
    mu, exact, pair = k_max, False, None
    search.advance()  # level 0: the empty set alone
    while search.level < k_max:
        if search.level >= len(search.nodes):
            break
        pair = search.advance()
        if pair is not None:
            mu, exact = search.level - 1, True
            break
    bounds = scheme_bounds(scheme) if with_bounds else {}
    return IdentifiabilityReport(mu, exact, pair, bounds, scheme.universe, (time.perf_counter() - t0) * 1e3)


def mu_by_enumeration(scheme: ProbingScheme, k_max: Optional[int] = None, cap: int = 200_000):
    """Brute-force oracle: mu from explicit per-vertex path incidence sets.

    Returns ``(mu, exact)``; two subsets are inseparable iff their path sets
    coincide, detected by hashing the incidence bitsets level by level.
    """
    paths = enumerate_paths(scheme, cap)
    incidence = {}
    for i, p in enumerate(paths):
        for x in p:
            incidence[x] = incidence.get(x, 0) | (1 << i)
    nodes = sorted(incidence)
    limit = len(nodes) if k_max is None else min(k_max, len(nodes))
    seen = {0: ()}  # path set of the empty subset
    for k in range(1, limit + 1):
        current = {}
        for combo in combinations(nodes, k):
            ps = 0
            for x in combo:
                ps |= incidence[x]
            if ps in seen or ps in current:
                return k - 1, True
            current[ps] = combo
        seen.update(current)
    return (limit if k_max is not None else len(nodes)), False


# ---------------------------------------------------------------------------
# constructions from the general-topology bounds


def upper_bound_witness(scheme: ProbingScheme):
    """``(K, K + {w})`` for a minimum S-T separator K and a neighbour w of K.

    Every S-T path meets K, so both sets hit every path and cannot be separated.
    """
    g = scheme.network
    size, K = st_separator(g, scheme.S, scheme.T)
    if size == UNBOUNDED:
        raise ValueError("no separator exists")
    if not K:
        raise ValueError("S and T are disconnected; there is nothing to separate")
    uni = set(scheme.universe)
    nbrs = sorted({y for x in K for y in g.adjacency[x]} - K)
    # prefer a path-covered neighbour so the pair lies inside the identifiability universe
    w = next((y for y in nbrs if y in uni), nbrs[0])
    U, W = frozenset(K), frozenset(K | {w})
    assert not separable(scheme, U, W).separable
    return U, W


def separator_placement(g: Network) -> MonitorPlacement:
    """|S| = |T| = kappa around a minimum separator, S packed into the smallest side."""
    n = g.vertex_count
    if n < 3 or not g.is_connected():
        raise ValueError("needs a connected graph on at least 3 vertices")
    conn = vertex_connectivity(g)
    k = conn.kappa
    if conn.complete or 3 * k > n:
        raise ValueError("connectivity too high for this construction")
    K = conn.min_separator
    comps = g.components(K)
    comps.sort(key=lambda c: (len(c), c[0]))
    smallest, others = comps[0], comps[1:]
    others.sort(key=lambda c: (-len(c), c[0]))
    pool = [x for c in others for x in c]
    S = smallest[:k]
    T = pool[:k]
    extra = k - len(S)
    if extra > 0:
        S = S + pool[len(pool) - extra:]
    if len(T) < k or len(S) < k or set(S) & set(T):
        raise ValueError("not enough vertices outside the separator")
    return MonitorPlacement(frozenset(S), frozenset(T))


def menger_stitch(g: Network, s: int, t: int, u: int, w_set: Iterable[int], kappa: Optional[int] = None) -> tuple:
    """Simple s-t path through u avoiding W, stitched from two pairs of disjoint paths.

    Needs |W| <= kappa(g) - 2.  Take an s-u path from a disjoint pair that
    misses t and the two disjoint u-t paths.  If the s-u path meets neither
    u-t path before u, join it to one of them.  Otherwise cut it at its first
    vertex z shared with a u-t path, walk that path back from z to u, and leave
    u along the other u-t path.
    """
    W = frozenset(w_set)
    if kappa is None:
        kappa = vertex_connectivity(g).kappa
    if len(W) > kappa - 2:
        raise ValueError("Menger precondition violated: |W| > kappa - 2")
    if s in W or t in W or u in W:
        raise ValueError("s, t and u must lie outside W")
    if s == t:
        raise ValueError("s and t must differ")
    if u in (s, t):
        legs = disjoint_paths(g, s, t, W, 1)
        return legs[0]
    to_s = disjoint_paths(g, u, s, W, 2)
    to_t = disjoint_paths(g, u, t, W, 2)
    if len(to_s) < 2 or len(to_t) < 2:
        raise RuntimeError("fewer than two disjoint paths despite the connectivity bound")
    s_legs = [tuple(reversed(p)) for p in to_s]  # s ... u
    s_leg = next(p for p in s_legs if t not in p)
    t1, t2 = to_t  # u ... t
    on_t = {x: 0 for x in t1[1:]}
    on_t.update({x: 1 for x in t2[1:]})
    hit = next((i for i, x in enumerate(s_leg[:-1]) if x in on_t), None)
    if hit is None:
        path = s_leg + t1[1:]
    else:
        z = s_leg[hit]
        j = on_t[z]
        through, other = (t1, t2) if j == 0 else (t2, t1)
        back = tuple(reversed(through[: through.index(z) + 1]))  # z ... u
        path = s_leg[:hit] + back + other[1:]
    assert g.is_path(path) and path[0] == s and path[-1] == t and u in path and not (set(path) & W)
    return path

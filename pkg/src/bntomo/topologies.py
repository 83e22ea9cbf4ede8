"""Line-of-sight networks on integer cubes, canonical monitor placement and monotone path building.

Coordinates are 1-based.  In two dimensions axis 0 runs north (1) to south (n)
and axis 1 runs west (1) to east (n); the low corner ``(1, ..., 1)`` is the
north-west corner.
"""
from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .graph import Network, path_through_avoiding

log = logging.getLogger(__name__)

DIRECTIONS_2D = {"north": (0, -1), "south": (0, 1), "west": (1, -1), "east": (1, 1)}


@dataclass(frozen=True, eq=False)
class LosEmbedding:
    d: int
    n: int
    omega: int
    coords: np.ndarray = field(repr=False)  # (vertex_count, d), 1-based

    def __post_init__(self):
        index = {tuple(int(c) for c in row): i for i, row in enumerate(self.coords)}
        if len(index) != len(self.coords):
            raise ValueError("embedding is not injective")
        object.__setattr__(self, "_index", index)

    @property
    def vertex_count(self) -> int:
        return len(self.coords)

    @property
    def is_full(self) -> bool:
        return self.vertex_count == self.n ** self.d

    def point(self, v: int) -> tuple:
        return tuple(int(c) for c in self.coords[v])

    def vertex(self, point: Sequence[int]) -> Optional[int]:
        return self._index.get(tuple(int(c) for c in point))

    def corner(self, which: str) -> tuple:
        if which == "low":
            return (1,) * self.d
        if which == "high":
            return (self.n,) * self.d
        raise ValueError(f"unknown corner {which!r}")


@dataclass(frozen=True)
class MonitorPlacement:
    s_set: frozenset
    t_set: frozenset

    def __post_init__(self):
        object.__setattr__(self, "s_set", frozenset(int(x) for x in self.s_set))
        object.__setattr__(self, "t_set", frozenset(int(x) for x in self.t_set))
        if not self.s_set or not self.t_set:
            raise ValueError("S and T must be non-empty")
        if self.s_set & self.t_set:
            raise ValueError("S and T must be disjoint")

    @property
    def monitors(self) -> frozenset:
        return self.s_set | self.t_set

    def check(self, g: Network) -> None:
        bad = [x for x in self.monitors if not 0 <= x < g.vertex_count]
        if bad:
            raise ValueError(f"monitor vertices {sorted(bad)} outside the network")


# ---------------------------------------------------------------------------
# generators


def build_los_network(n: int, d: int, omega: int, occupied: Iterable[Sequence[int]]):
    """LoS network on the given cube points; vertex ids follow lexicographic point order."""
    if n < 2 or d < 1:
        raise ValueError("need n >= 2 and d >= 1")
    if omega < 2:
        raise ValueError("omega must exceed 1")
    pts = sorted({tuple(int(c) for c in p) for p in occupied})
    for p in pts:
        if len(p) != d or any(not 1 <= c <= n for c in p):
            raise ValueError(f"point {p} outside the cube {{1..{n}}}^{d}")
    index = {p: i for i, p in enumerate(pts)}
    edges = []
    for p, i in index.items():
        for axis in range(d):
            for step in range(1, omega):
                q = p[:axis] + (p[axis] + step,) + p[axis + 1:]
                j = index.get(q)
                if j is not None:
                    edges.append((i, j))
    coords = np.array(pts, dtype=np.int64).reshape(len(pts), d)
    return Network.from_edges(len(pts), edges), LosEmbedding(d, n, omega, coords)


def _full_cube(n: int, d: int):
    return itertools.product(range(1, n + 1), repeat=d)


def build_augmented_hypergrid(n: int, d: int, omega: int):
    """H_{n,d,omega}: every point of {1..n}^d, vertex i at the mixed-radix digits of i."""
    if omega <= 2:
        raise ValueError("augmented hypergrids need omega > 2; use build_hypergrid")
    return build_los_network(n, d, omega, _full_cube(n, d))


def build_hypergrid(n: int, d: int):
    return build_los_network(n, d, 2, _full_cube(n, d))


# ---------------------------------------------------------------------------
# canonical placement


def canonical_placement(emb: LosEmbedding) -> MonitorPlacement:
    """d*omega - 1 monitors on the low borders (S) and their mirror images (T).

    S is filled from low-border points ordered by distance from the low corner,
    axis lines before off-line points, lower axes first.  T is the point
    reflection of S through the cube centre, so it holds the high corner.
    """
    if not emb.is_full:
        raise ValueError("canonical placement needs a full hypergrid embedding")
    n, d = emb.n, emb.d
    need = d * emb.omega - 1
    low = [p for p in _full_cube(n, d) if 1 in p]
    low.sort(key=lambda p: (sum(p) - d, sum(c != 1 for c in p), tuple(-c for c in p)))
    if len(low) < need:
        raise ValueError(f"n={n} too small to host {need} border monitors")
    s_pts = low[:need]
    t_pts = [tuple(n + 1 - c for c in p) for p in s_pts]
    S = {emb.vertex(p) for p in s_pts}
    T = {emb.vertex(p) for p in t_pts}
    if S & T:
        raise ValueError(f"n={n} too small: low and high border monitors collide")
    return MonitorPlacement(frozenset(S), frozenset(T))


# ---------------------------------------------------------------------------
# directions, saturation, monotone paths


def _direction(emb: LosEmbedding, direction) -> tuple:
    if isinstance(direction, str):
        if emb.d != 2 or direction not in DIRECTIONS_2D:
            raise ValueError(f"invalid direction {direction!r}")
        return DIRECTIONS_2D[direction]
    axis, sign = direction
    if not 0 <= axis < emb.d or sign not in (-1, 1):
        raise ValueError(f"invalid axis direction {direction!r}")
    return int(axis), int(sign)


def _ray(emb: LosEmbedding, u: int, direction):
    """Vertices 1..omega-1 steps from u along a direction; None for missing cells."""
    axis, sign = _direction(emb, direction)
    p = emb.point(u)
    out = []
    for step in range(1, emb.omega):
        c = p[axis] + sign * step
        if not 1 <= c <= emb.n:
            break
        out.append(emb.vertex(p[:axis] + (c,) + p[axis + 1:]))
    return out


def is_w_saturated(emb: LosEmbedding, u: int, direction, w_set: Iterable[int]) -> bool:
    """The omega-1 cells right after u in this direction all exist and all lie in W."""
    W = frozenset(w_set)
    ray = _ray(emb, u, direction)
    return len(ray) == emb.omega - 1 and all(x is not None and x in W for x in ray)


def is_blocked(emb: LosEmbedding, u: int, direction, w_set: Iterable[int]) -> bool:
    """No vertex outside W is reachable from u by one hop in this direction."""
    W = frozenset(w_set)
    return all(x is None or x in W for x in _ray(emb, u, direction))


def _next_hop(emb, u, direction, W) -> Optional[int]:
    for x in _ray(emb, u, direction):
        if x is not None and x not in W:
            return x
    return None


def monotone_path(emb: LosEmbedding, u: int, target_corner: str, w_set: Iterable[int]) -> Optional[tuple]:
    """Greedy coordinate-monotone path from a corner to u avoiding W.

    At each step the unblocked axis with the most remaining distance is used
    and the nearest non-W cell on it is taken.  Returns the path running
    corner -> u for ``"low"`` and u -> corner for ``"high"``, or None when every
    usable direction is blocked.
    """
    W = frozenset(w_set)
    if u in W:
        raise ValueError("u lies in W")
    corner = emb.corner(target_corner)
    cv = emb.vertex(corner)
    if cv is None:
        raise ValueError("target corner is not a vertex of this embedding")
    if cv in W:
        raise ValueError("target corner lies in W")
    sign = -1 if target_corner == "low" else 1
    path = [u]
    cur = u
    while cur != cv:
        p = emb.point(cur)
        axes = [a for a in range(emb.d) if p[a] != corner[a]]
        axes.sort(key=lambda a: (-abs(p[a] - corner[a]), a))
        nxt = None
        for a in axes:
            nxt = _next_hop(emb, cur, (a, sign), W)
            if nxt is not None:
                break
        if nxt is None:
            log.debug("monotone path from %s towards %s corner blocked at %s", emb.point(u), target_corner, p)
            return None
        path.append(nxt)
        cur = nxt
    return tuple(reversed(path)) if target_corner == "low" else tuple(path)


def region(emb: LosEmbedding, u: int, which: str) -> frozenset:
    """Componentwise dominance region of u: all coordinates <= u's (NW) or >= u's (SE)."""
    p = emb.coords[u]
    if which == "NW":
        mask = np.all(emb.coords <= p, axis=1)
    elif which == "SE":
        mask = np.all(emb.coords >= p, axis=1)
    else:
        raise ValueError(f"region must be 'NW' or 'SE', got {which!r}")
    return frozenset(int(v) for v in np.flatnonzero(mask))


def constructive_path(g: Network, emb: LosEmbedding, placement: MonitorPlacement, u: int,
                      w_set: Iterable[int]):
    """S-T path through u avoiding W, by corner-to-corner monotone halves when possible.

    Returns ``(path, method)`` with method ``"monotone"`` or ``"flow"``; path is
    None only when no such path exists at all.
    """
    W = frozenset(w_set)
    lo = emb.vertex(emb.corner("low"))
    hi = emb.vertex(emb.corner("high"))
    if lo in placement.s_set and hi in placement.t_set and lo not in W and hi not in W:
        head = monotone_path(emb, u, "low", W)
        tail = monotone_path(emb, u, "high", W) if head is not None else None
        if head is not None and tail is not None:
            return head + tail[1:], "monotone"
        log.info("monotone construction failed for u=%s, |W|=%d; falling back to flow search", emb.point(u), len(W))
    return path_through_avoiding(g, placement.s_set, placement.t_set, u, W), "flow"

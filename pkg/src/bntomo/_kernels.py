"""Hot inner loops: augmenting-path max-flow, bitmask pair search, configuration walks.

Every kernel is plain Python over numpy arrays.  When numba is importable and
``BNTOMO_DISABLE_NUMBA`` is unset the flow and walk kernels are compiled with
``@njit``; otherwise they run interpreted.  The pair search has a separate
vectorised numpy fallback because the interpreted double loop is far too slow.

Both backends consume identical inputs (including pre-drawn uniforms for the
random walks), so results are bit-for-bit identical across backends.
"""
import os

import numpy as np

_DISABLE = os.environ.get("BNTOMO_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")

try:
    if _DISABLE:
        raise ImportError
    import numba

    USE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    USE_NUMBA = False

BACKEND = "numba" if USE_NUMBA else "numpy"


def _jit(fn):
    if USE_NUMBA:
        return numba.njit(cache=True, nogil=True)(fn)
    return fn


# ---------------------------------------------------------------------------
# max-flow


def max_flow_py(indptr, heads, rev, res, source, sink, limit):
    """Shortest-augmenting-path max flow, stopping once ``limit`` units are routed.

    ``res`` holds residual capacities and is updated in place.  Arcs are stored
    grouped by tail (CSR), ``rev[a]`` is the index of the reverse arc of ``a``.
    """
    n = indptr.shape[0] - 1
    pred = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    total = 0
    while total < limit:
        for i in range(n):
            pred[i] = -1
        pred[source] = -2
        qh = 0
        qt = 1
        queue[0] = source
        found = False
        while qh < qt and not found:
            x = queue[qh]
            qh += 1
            for a in range(indptr[x], indptr[x + 1]):
                if res[a] > 0:
                    y = heads[a]
                    if pred[y] == -1:
                        pred[y] = a
                        if y == sink:
                            found = True
                            break
                        queue[qt] = y
                        qt += 1
        if not found:
            break
        b = limit - total
        y = sink
        while y != source:
            a = pred[y]
            if res[a] < b:
                b = res[a]
            y = heads[rev[a]]
        y = sink
        while y != source:
            a = pred[y]
            res[a] -= b
            res[rev[a]] += b
            y = heads[rev[a]]
        total += b
    return total


def reachable_py(indptr, heads, res, source):
    """Nodes reachable from ``source`` through arcs of positive residual capacity."""
    n = indptr.shape[0] - 1
    seen = np.zeros(n, np.bool_)
    stack = np.empty(n, np.int64)
    seen[source] = True
    stack[0] = source
    top = 1
    while top > 0:
        top -= 1
        x = stack[top]
        for a in range(indptr[x], indptr[x + 1]):
            if res[a] > 0:
                y = heads[a]
                if not seen[y]:
                    seen[y] = True
                    stack[top] = y
                    top += 1
    return seen


def through_reach_py(indptr, heads, rev, cap, internal_arc, blocked, candidates, sink):
    """For each candidate vertex v decide whether two units can leave v's in-node.

    ``internal_arc[x]`` is the in->out arc of vertex x in the split network; the
    source for candidate v is v's in-node, i.e. ``heads[rev[internal_arc[v]]]``.
    Vertices flagged in ``blocked`` get zero capacity.
    """
    m = candidates.shape[0]
    out = np.zeros(m, np.bool_)
    base = cap.copy()
    for x in range(blocked.shape[0]):
        if blocked[x]:
            base[internal_arc[x]] = 0
    for i in range(m):
        v = candidates[i]
        if blocked[v]:
            continue
        res = base.copy()
        a = internal_arc[v]
        res[a] = 2
        src = heads[rev[a]]
        out[i] = max_flow(indptr, heads, rev, res, src, sink, 2) == 2
    return out


max_flow = _jit(max_flow_py)
reachable = _jit(reachable_py)
through_reach = _jit(through_reach_py)


# ---------------------------------------------------------------------------
# pair search over bitmask-encoded vertex subsets


def first_nonseparable_py(masks, reach, start, stop):
    """First index pair (i, j), j in [start, stop), i < j, whose subsets are not separable.

    Subset X = masks[i] is separable from Y = masks[j] iff some vertex of X \\ Y
    lies in reach[j] or some vertex of Y \\ X lies in reach[i], where reach[k]
    marks vertices with a monitored path through them avoiding masks[k].
    """
    for j in range(start, stop):
        y = masks[j]
        ry = reach[j]
        for i in range(j):
            x = masks[i]
            if (x & ~y & ry) == 0 and (y & ~x & reach[i]) == 0:
                return i, j
    return -1, -1


def first_nonseparable_np(masks, reach, start, stop):
    for j in range(start, stop):
        y = masks[j]
        x = masks[:j]
        bad = ((x & ~y & reach[j]) == 0) & (((y & ~x) & reach[:j]) == 0)
        hit = np.flatnonzero(bad)
        if hit.size:
            return int(hit[0]), j
    return -1, -1


# ---------------------------------------------------------------------------
# configuration-model walks

REASON_NONE = 0
REASON_REVISITED = 1
REASON_FORBIDDEN = 2
REASON_MONITOR = 3
REASON_MISSED = 4


def _pool_take_py(pool, pos, size, p):
    # swap-remove point p from the unmatched pool
    i = pos[p]
    last = pool[size - 1]
    pool[i] = last
    pos[last] = i
    pool[size - 1] = p
    pos[p] = size - 1
    return size - 1


_pool_take = _jit(_pool_take_py)


def pathfinder_py(n, r, partner, v, ell_s, ell_t, forbidden, in_s, in_t, block_monitors, uniforms):
    """Grow two bucket walks from v, shoot their free points, then complete the pairing.

    ``partner`` (length n*r, -1 = unmatched) is modified in place.  One uniform
    from ``uniforms`` is consumed per pairing.  Returns
    (reason, walk_s, len_s, walk_t, len_t, hit_s, from_s, hit_t, from_t, walks_done)
    where ``from_*`` is the index on the walk whose free point hit the target.
    """
    npts = n * r
    pool = np.empty(npts, np.int64)
    pos = np.full(npts, -1, np.int64)
    size = 0
    for p in range(npts):
        if partner[p] < 0:
            pool[size] = p
            pos[p] = size
            size += 1
    ui = 0
    visited = np.zeros(n, np.bool_)
    visited[v] = True
    walk_s = np.full(ell_s + 1, -1, np.int64)
    walk_t = np.full(ell_t + 1, -1, np.int64)
    walk_s[0] = v
    walk_t[0] = v
    len_s = 1
    len_t = 1
    reason = REASON_NONE

    for side in range(2):
        ell = ell_s if side == 0 else ell_t
        cur = v
        for step in range(ell):
            p = -1
            for k in range(cur * r, cur * r + r):
                if partner[k] < 0:
                    p = k
                    break
            if p < 0 or size < 2:
                reason = REASON_REVISITED
                break
            size = _pool_take(pool, pos, size, p)
            q = pool[int(uniforms[ui] * size)]
            ui += 1
            size = _pool_take(pool, pos, size, q)
            partner[p] = q
            partner[q] = p
            b = q // r
            if visited[b]:
                reason = REASON_REVISITED
                break
            if forbidden[b]:
                reason = REASON_FORBIDDEN
                break
            if block_monitors and (in_s[b] or in_t[b]):
                reason = REASON_MONITOR
                break
            visited[b] = True
            cur = b
            if side == 0:
                walk_s[len_s] = b
                len_s += 1
            else:
                walk_t[len_t] = b
                len_t += 1
        if reason != REASON_NONE:
            break

    walks_done = reason == REASON_NONE
    hit_s = -1
    from_s = -1
    hit_t = -1
    from_t = -1
    if walks_done:
        # useful points: free points on the walk beyond v, or one free point of v for an empty walk
        useful = np.empty(npts, np.int64)
        owner = np.empty(npts, np.int64)
        nu = 0
        v_taken = -1
        for side in range(2):
            length = len_s if side == 0 else len_t
            if length == 1:
                for k in range(v * r, v * r + r):
                    if partner[k] < 0 and k != v_taken:
                        useful[nu] = k
                        owner[nu] = side * npts
                        nu += 1
                        v_taken = k
                        break
            else:
                for idx in range(1, length):
                    b = walk_s[idx] if side == 0 else walk_t[idx]
                    for k in range(b * r, b * r + r):
                        if partner[k] < 0:
                            useful[nu] = k
                            owner[nu] = side * npts + idx
                            nu += 1
        for i in range(nu):
            p = useful[i]
            if partner[p] < 0 and size >= 2:
                size = _pool_take(pool, pos, size, p)
                q = pool[int(uniforms[ui] * size)]
                ui += 1
                size = _pool_take(pool, pos, size, q)
                partner[p] = q
                partner[q] = p
            q = partner[p]
            if q < 0:
                continue
            b = q // r
            if visited[b]:
                continue
            side = owner[i] // npts
            idx = owner[i] - side * npts
            if side == 0 and hit_s < 0 and in_s[b]:
                hit_s = b
                from_s = idx
            elif side == 1 and hit_t < 0 and in_t[b]:
                hit_t = b
                from_t = idx
        if hit_s < 0 or hit_t < 0:
            reason = REASON_MISSED

    # complete the configuration
    while size >= 2:
        p = pool[size - 1]
        size -= 1
        q = pool[int(uniforms[ui] * size)]
        ui += 1
        size = _pool_take(pool, pos, size, q)
        partner[p] = q
        partner[q] = p
    return reason, walk_s, len_s, walk_t, len_t, hit_s, from_s, hit_t, from_t, walks_done


# ---------------------------------------------------------------------------
# dispatch

first_nonseparable = _jit(first_nonseparable_py) if USE_NUMBA else first_nonseparable_np
pathfinder_kernel = _jit(pathfinder_py)

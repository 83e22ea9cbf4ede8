"""Per-theorem check suites shared by the ``verify`` command and the acceptance tests.

Each suite returns a list of :class:`Check` rows; a run passes when every row does.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from itertools import product
from typing import Iterable, Optional, Sequence

from .graph import UNBOUNDED, Network, vertex_connectivity
from .identifiability import (
    ProbingScheme,
    is_k_identifiable,
    max_identifiability,
    menger_stitch,
    separable,
    separator_placement,
    upper_bound_witness,
)
from .random_models import (
    ExperimentConfig,
    gen_gnp,
    gen_random_regular,
    make_rng,
    monte_carlo_separability,
    pathfinder_experiment,
)
from .topologies import MonitorPlacement, build_augmented_hypergrid, build_hypergrid, canonical_placement

THEOREMS = ("ub", "lb-gen", "kappa3", "los2", "los-d", "gnp-bound", "pathfinder")
CSV_HEADER = ("theorem", "instance", "check", "expected", "observed", "pass")


@dataclass(frozen=True)
class Check:
    theorem: str
    instance: str
    check: str
    expected: str
    observed: str
    passed: bool


@dataclass(frozen=True, eq=False)
class Instance:
    name: str
    scheme: ProbingScheme

    @property
    def network(self) -> Network:
        return self.scheme.network


def checks_csv(rows: Iterable[Check]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in rows:
        w.writerow((c.theorem, c.instance, c.check, c.expected, c.observed, int(c.passed)))
    return buf.getvalue()


def _fmt(x) -> str:
    if x == UNBOUNDED:
        return "inf"
    if isinstance(x, float):
        return f"{x:.6g}"
    if isinstance(x, (set, frozenset)):
        return "{" + " ".join(map(str, sorted(x))) + "}"
    return str(x)


# ---------------------------------------------------------------------------
# instance suites


def random_instances(count: int = 200, seed: int = 0, max_n: int = 9) -> list:
    """Seeded G(n, p) graphs on 3..max_n vertices with random disjoint S, T of size 1..3."""
    out = []
    for i in range(count):
        rng = make_rng(seed, i)
        n = int(rng.integers(3, max_n + 1))
        p = float(rng.uniform(0.25, 0.9))
        g = gen_gnp(n, p, rng)
        perm = rng.permutation(n)
        a = int(rng.integers(1, min(3, n - 1) + 1))
        b = int(rng.integers(1, min(3, n - a) + 1))
        pl = MonitorPlacement(frozenset(perm[:a].tolist()), frozenset(perm[a:a + b].tolist()))
        out.append(Instance(f"gnp-{seed}-{i}", ProbingScheme(g, pl)))
    return out


def cycle(n: int) -> Network:
    return Network.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def generated_instances() -> list:
    """Small named topologies with their natural placements."""
    out = []
    g, emb = build_augmented_hypergrid(4, 2, 3)
    out.append(Instance("H4,2,3-canonical", ProbingScheme(g, canonical_placement(emb))))
    g, _ = build_hypergrid(3, 2)
    out.append(Instance("grid3x3-corners", ProbingScheme.of(g, {0}, {8})))
    c6 = cycle(6)
    out.append(Instance("C6-separator", ProbingScheme(c6, separator_placement(c6))))
    g, _ = gen_random_regular(12, 3, 1)
    out.append(Instance("regular12-3-separator", ProbingScheme(g, separator_placement(g))))
    k5 = Network.from_edges(5, [(i, j) for i in range(5) for j in range(i + 1, 5)])
    out.append(Instance("K5", ProbingScheme.of(k5, {0, 1}, {2, 3})))
    return out


def small_suite(seed: int = 0, count: int = 200) -> list:
    return random_instances(count, seed) + generated_instances()


def kappa3_graphs(count: int = 50, seed: int = 0, max_n: int = 12) -> list:
    """Seeded connected G(n, p) graphs with 1 <= kappa <= n/3, n in 6..max_n."""
    out = []
    attempt = 0
    while len(out) < count:
        rng = make_rng(seed, attempt)
        attempt += 1
        n = int(rng.integers(6, max_n + 1))
        g = gen_gnp(n, float(rng.uniform(0.2, 0.6)), rng)
        if not g.is_connected():
            continue
        kappa = vertex_connectivity(g).kappa
        if 1 <= kappa and 3 * kappa <= n:
            out.append((f"kappa3-{seed}-{attempt - 1}", g))
    return out


# ---------------------------------------------------------------------------
# suites


def verify_ub(instances: Sequence[Instance]) -> list:
    rows = []
    for inst in instances:
        if not inst.scheme.universe:
            # no S-T path at all: mu is vacuous and the bound has nothing to say
            rows.append(Check("ub", inst.name, "mu<=kappa_st", "S-T connected", "no S-T path, skipped", True))
            continue
        rep = max_identifiability(inst.scheme)
        kst = rep.bounds["kappa_st"]
        ok = kst == UNBOUNDED or rep.mu <= kst
        rows.append(Check("ub", inst.name, "mu<=kappa_st", f"<= {_fmt(kst)}", _fmt(rep.mu), ok))
        if kst != UNBOUNDED and kst > 0:
            U, W = upper_bound_witness(inst.scheme)
            ok = not separable(inst.scheme, U, W).separable
            rows.append(Check("ub", inst.name, "witness non-separable", "non-separable",
                              f"{_fmt(U)} vs {_fmt(W)}", ok))
    return rows


def _stitch_query(instances: Sequence[Instance], rng):
    """Random (graph, s, t, u, W) with |W| <= kappa - 2, or None if no graph qualifies."""
    pool = [inst for inst in instances if inst.network.vertex_count >= 3]
    while pool:
        inst = pool[int(rng.integers(len(pool)))]
        g = inst.network
        kappa = vertex_connectivity(g).kappa
        if kappa < 2:
            pool.remove(inst)
            continue
        perm = rng.permutation(g.vertex_count).tolist()
        s, t, u = perm[:3]
        w = int(rng.integers(0, min(kappa - 2, g.vertex_count - 3) + 1))
        return inst, kappa, s, t, u, frozenset(perm[3:3 + w])
    return None


def verify_lb(instances: Sequence[Instance], queries: int = 1000, seed: int = 0) -> list:
    rows = []
    for inst in instances:
        rep = max_identifiability(inst.scheme)
        lb = rep.bounds["lb_thm5"]
        rows.append(Check("lb-gen", inst.name, "mu>=min(kappa,|S|,|T|)-2", f">= {lb}", _fmt(rep.mu), rep.mu >= lb))
    failures, first = 0, ""
    for q in range(queries):
        rng = make_rng(seed, 1_000_000 + q)
        query = _stitch_query(instances, rng)
        if query is None:
            break
        inst, kappa, s, t, u, W = query
        g = inst.network
        try:
            path = menger_stitch(g, s, t, u, W, kappa)
            ok = g.is_path(path) and path[0] == s and path[-1] == t and u in path and not set(path) & W
        except (RuntimeError, AssertionError, ValueError) as exc:
            ok, path = False, str(exc)
        if not ok:
            failures += 1
            first = first or f"{inst.name} s={s} t={t} u={u} W={_fmt(W)}: {path}"
    rows.append(Check("lb-gen", f"{queries} stitch queries", "menger_stitch valid", "0 failures",
                      f"{failures} failures {first}".strip(), failures == 0))
    return rows


def verify_kappa3(count: int = 50, seed: int = 0) -> list:
    rows = []
    for name, g in kappa3_graphs(count, seed):
        kappa = vertex_connectivity(g).kappa
        scheme = ProbingScheme(g, separator_placement(g))
        mu = max_identifiability(scheme, with_bounds=False).mu
        rows.append(Check("kappa3", f"{name} n={g.vertex_count}", "kappa-2<=mu<=kappa",
                          f"[{kappa - 2}, {kappa}]", str(mu), kappa - 2 <= mu <= kappa))
    return rows


def corner_witness(g: Network, emb, placement: MonitorPlacement):
    """``(c, N(c), N(c) + {c})`` for the first non-monitor corner c.

    Falls back to the lowest non-monitor vertex of minimum degree when every
    corner is a monitor (as in H_{3,3,3}); None if all vertices are monitors.
    """
    for corner in product((1, emb.n), repeat=emb.d):
        c = emb.vertex(corner)
        if c is not None and c not in placement.monitors:
            break
    else:
        free = [x for x in range(g.vertex_count) if x not in placement.monitors]
        if not free:
            return None
        c = min(free, key=lambda x: (g.degree(x), x))
    nbrs = frozenset(g.neighbors(c))
    return c, nbrs, nbrs | {c}


def _los_rows(theorem: str, n: int, d: int, omega: int, g, emb, scheme) -> list:
    inst = f"H{n},{d},{omega}"
    wit = corner_witness(g, emb, scheme.placement)
    if wit is None:
        return [Check(theorem, inst, "witness", "non-monitor vertex", "none", False)]
    c, U, W = wit
    ok = not separable(scheme, U, W).separable
    size = d * (omega - 1)
    return [Check(theorem, inst, f"{emb.point(c)} neighbourhood witness non-separable",
                  f"non-separable, sizes {size}/{size + 1}", f"{_fmt(U)} vs {_fmt(W)}", ok and len(U) == size)]


def verify_los2(n: int = 4, omega: int = 3) -> list:
    g, emb = build_augmented_hypergrid(n, 2, omega)
    scheme = ProbingScheme(g, canonical_placement(emb))
    k = 2 * (omega - 1) - 1
    ok, pair = is_k_identifiable(scheme, k)
    observed = "identifiable" if ok else f"fails at {_fmt(pair[0])} vs {_fmt(pair[1])}"
    rows = [Check("los2", f"H{n},2,{omega}", f"{k}-identifiable", "identifiable", observed, ok)]
    return rows + _los_rows("los2", n, 2, omega, g, emb, scheme)


def sample_pairs(universe: Sequence[int], k: int, count: int, seed: int):
    """Seeded distinct pairs of subsets of size <= k.

    Half the pairs are independent draws; the other half differ from each other
    by one swapped or one added element, which are the hard cases.
    """
    uni = list(universe)
    produced = i = 0
    while produced < count:
        rng = make_rng(seed, i)
        i += 1
        a = int(rng.integers(0, k + 1))
        U = frozenset(int(x) for x in rng.choice(uni, a, replace=False))
        if i % 2 == 0:
            b = int(rng.integers(0, k + 1))
            W = frozenset(int(x) for x in rng.choice(uni, b, replace=False))
        else:
            rest = [x for x in uni if x not in U]
            W = set(U)
            if W and (len(W) == k or rng.random() < 0.5):
                W.discard(sorted(W)[int(rng.integers(len(W)))])
            W.add(rest[int(rng.integers(len(rest)))])
            W = frozenset(W)
        if U != W:
            produced += 1
            yield U, W


def verify_losd(n: int = 3, d: int = 3, omega: int = 3, samples: int = 100_000, seed: int = 0) -> list:
    g, emb = build_augmented_hypergrid(n, d, omega)
    scheme = ProbingScheme(g, canonical_placement(emb))
    k = d * (omega - 1) - 1
    checked = failures = 0
    first = ""
    for U, W in sample_pairs(scheme.universe, k, samples, seed):
        checked += 1
        if not separable(scheme, U, W, certify=False).separable:
            failures += 1
            first = first or f" first {_fmt(U)} vs {_fmt(W)}"
    rows = [Check("los-d", f"H{n},{d},{omega}", f"{checked} sampled pairs of size <= {k} separable",
                  "0 failures", f"{failures} failures{first}", failures == 0)]
    return rows + _los_rows("los-d", n, d, omega, g, emb, scheme)


def verify_gnp(n: int = 40, p: float = 0.5, gamma: int = 15, k: int = 2, trials: int = 2000,
               seed: int = 0, threads: Optional[int] = None) -> list:
    cfg = ExperimentConfig(seed=seed, trials=trials, n=n, p=p, gamma=gamma, k=k)
    s = monte_carlo_separability(cfg, "gnp", threads).summary
    name = f"G({n},{p}) gamma={gamma} k={k}"
    bound = min(1.0, s["bound"])
    single = s["single_pair_bound"]
    sigma = math.sqrt(single * (1 - single) / trials)
    return [
        Check("gnp-bound", name, "freq<=min(1,bound)", f"<= {_fmt(bound)}", _fmt(s["freq"]), s["freq"] <= bound),
        Check("gnp-bound", name, "freq<=single+3sigma", f"<= {_fmt(single + 3 * sigma)}", _fmt(s["freq"]),
              s["freq"] <= single + 3 * sigma),
    ]


def verify_gnp_spot(count: int = 20, n: int = 12, p: float = 0.5, need: int = 18, seed: int = 0) -> list:
    """Exact mu on small connected G(n, p) with kappa monitors on each side, drawn uniformly.

    The aggregate row asks for mu == kappa on at least ``need`` instances.
    Note that S and T themselves are an inseparable pair of size gamma, so
    mu <= gamma - 1 always holds for disjoint placements.
    """
    rows, hits, attempt = [], 0, 0
    while len(rows) < count:
        rng = make_rng(seed, attempt)
        attempt += 1
        g = gen_gnp(n, p, rng)
        kappa = vertex_connectivity(g).kappa
        if kappa < 1 or 2 * kappa > n:
            continue
        perm = rng.permutation(n).tolist()
        scheme = ProbingScheme.of(g, perm[:kappa], perm[kappa:2 * kappa])
        rep = max_identifiability(scheme, kappa + 1)
        ok = rep.exact and rep.mu == kappa
        hits += ok
        rows.append(Check("gnp-spot", f"G({n},{p})-{seed}-{attempt - 1}", "mu==kappa", _fmt(kappa),
                          _fmt(rep.mu) if rep.exact else ">=" + _fmt(rep.mu), ok))
    rows.append(Check("gnp-spot", f"{count} instances", f"mu==kappa in >={need}", f">= {need}", str(hits),
                      hits >= need))
    return rows


def verify_pathfinder(n: int = 200, r: int = 3, gammas: Sequence[int] = (20,), ell: int = 10, trials: int = 2000,
                      seed: int = 0, k: int = 1, tol: float = 0.10, threads: Optional[int] = None) -> list:
    """Shooting rate (success among trials whose walks completed) against the closed form."""
    rows, rates = [], []
    for gamma in gammas:
        cfg = ExperimentConfig(seed=seed, trials=trials, n=n, r=r, gamma=gamma, k=k, ell_s=ell, ell_t=ell)
        s = pathfinder_experiment(cfg, threads).summary
        rate, walked = s["shooting_rate"], s["walks_completed"]
        rates.append((gamma, rate, walked))
        ok = rate is not None and abs(rate - s["bound"]) <= tol
        rows.append(Check("pathfinder", f"n={n} r={r} gamma={gamma} ell={ell}", f"|rate-formula|<={tol}",
                          _fmt(s["bound"]), f"{_fmt(rate)} over {walked} walks (unconditional {_fmt(s['freq'])})", ok))
    for (g1, a, na), (g2, b, nb) in zip(rates, rates[1:]):
        if a is None or b is None:
            ok, sigma = False, float("nan")
        else:
            sigma = math.sqrt(a * (1 - a) / na + b * (1 - b) / nb)
            ok = (b - a) > 3 * sigma if g2 > g1 else (a - b) > 3 * sigma
        rows.append(Check("pathfinder", f"gamma {g1}->{g2}", "monotone (3 sigma)", f"> {_fmt(3 * sigma)}",
                          _fmt(None if a is None or b is None else b - a), ok))
    return rows

"""Random graphs (binomial, configuration model), PathFinder trials and Monte-Carlo separability.

All randomness comes from counter-based Philox streams keyed by
``(seed, *spawn_key)``; trial ``i`` of an experiment always uses stream
``(seed, i)``, so serial and threaded runs give identical results.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from . import _kernels
from .graph import Network
from .identifiability import ProbingScheme, separable
from .topologies import MonitorPlacement

REASONS = {
    _kernels.REASON_NONE: "none",
    _kernels.REASON_REVISITED: "revisited_bucket",
    _kernels.REASON_FORBIDDEN: "hit_forbidden",
    _kernels.REASON_MONITOR: "hit_monitor",
    _kernels.REASON_MISSED: "shooting_missed",
}
WALK_FAILURES = ("revisited_bucket", "hit_forbidden", "hit_monitor")


def make_rng(seed: int, *key: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("BNT_THREADS", "1")))
    except ValueError:
        return 1


def run_trials(fn: Callable[[int], object], trials: int, threads: Optional[int] = None) -> list:
    """``[fn(0), ..., fn(trials-1)]``, optionally spread over a thread pool."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or trials < 2:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, range(trials)))


# ---------------------------------------------------------------------------
# graph models


def gen_gnp(n: int, p: float, seed: int) -> Network:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    rng = make_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.shape[0]) < p
    return Network.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


@dataclass
class Configuration:
    """n buckets of r points; ``partner[p]`` is p's matched point or -1."""

    n: int
    r: int
    partner: np.ndarray = None

    def __post_init__(self):
        if self.partner is None:
            self.partner = np.full(self.n * self.r, -1, np.int64)
        if self.partner.shape != (self.n * self.r,):
            raise ValueError("partner array has the wrong length")

    @property
    def matched(self) -> np.ndarray:
        return self.partner >= 0

    def bucket(self, point: int) -> int:
        return point // self.r

    def is_perfect(self) -> bool:
        p = self.partner
        idx = np.arange(p.shape[0])
        return bool(np.all(p >= 0) and np.all(p[p] == idx) and np.all(p != idx))

    def pairs(self) -> np.ndarray:
        idx = np.arange(self.partner.shape[0])
        mine = (self.partner > idx)
        return np.stack([idx[mine], self.partner[mine]], axis=1)

    def projected_edges(self) -> np.ndarray:
        return self.pairs() // self.r

    def is_simple(self) -> bool:
        e = self.projected_edges()
        if np.any(e[:, 0] == e[:, 1]):
            return False
        e = np.sort(e, axis=1)
        return np.unique(e, axis=0).shape[0] == e.shape[0]

    def network(self) -> Network:
        if not self.is_simple():
            raise ValueError("configuration projects to a multigraph")
        return Network.from_edges(self.n, self.projected_edges().tolist())


def random_pairing(n: int, r: int, rng: np.random.Generator) -> Configuration:
    perm = rng.permutation(n * r)
    partner = np.empty(n * r, np.int64)
    a, b = perm[0::2], perm[1::2]
    partner[a] = b
    partner[b] = a
    return Configuration(n, r, partner)


def gen_random_regular(n: int, r: int, seed, max_attempts: int = 1_000_000):
    """Uniform simple r-regular graph by rejection over uniform pairings."""
    if (n * r) % 2:
        raise ValueError("n*r must be even")
    if r < 3 or r >= n:
        raise ValueError("need 3 <= r < n")
    rng = make_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    for _ in range(max_attempts):
        cfg = random_pairing(n, r, rng)
        if cfg.is_simple():
            return cfg.network(), cfg
    raise RuntimeError("no simple pairing found")


def pairing_acceptance_rate(n: int, r: int, attempts: int, seed: int) -> float:
    rng = make_rng(seed)
    return sum(random_pairing(n, r, rng).is_simple() for _ in range(attempts)) / attempts


# ---------------------------------------------------------------------------
# PathFinder


@dataclass
class TrialOutcome:
    success: bool
    failure_reason: str
    paths: Optional[tuple] = None  # (S-side path ending at v, T-side path starting at v)
    walks: tuple = ((), ())
    configuration: Optional[Configuration] = field(default=None, repr=False)

    @property
    def walks_completed(self) -> bool:
        return self.failure_reason not in WALK_FAILURES


def _mask(n: int, members: Iterable[int]) -> np.ndarray:
    m = np.zeros(n, np.bool_)
    idx = list(members)
    if idx:
        m[idx] = True
    return m


def pathfinder(cfg: Configuration, v: int, ell_s: int, ell_t: int, w_set: Iterable[int],
               monitors: MonitorPlacement, seed, block_monitors: bool = False) -> TrialOutcome:
    """Reveal a configuration while growing two walks from bucket v and shooting at S and T.

    Each walk step pairs the lowest free point of the current bucket with a
    uniform unmatched point; a walk fails on a revisited bucket or a bucket in
    W (and, with ``block_monitors``, a bucket in S or T).  The free points left
    on the walks are then paired uniformly; success needs one on the S-walk to
    land in an unvisited S bucket and one on the T-walk in an unvisited T
    bucket.  Leftover points are paired uniformly at the end.
    """
    n, r = cfg.n, cfg.r
    W = frozenset(w_set)
    if v in W:
        raise ValueError("v lies in W")
    if ell_s >= n or ell_t >= n or ell_s < 0 or ell_t < 0:
        raise ValueError("walk lengths must lie in [0, n)")
    rng = make_rng(seed) if not isinstance(seed, np.random.Generator) else seed
    uniforms = rng.random(n * r // 2 + 1)
    partner = cfg.partner.copy()
    out = _kernels.pathfinder_kernel(
        n, r, partner, int(v), int(ell_s), int(ell_t), _mask(n, W),
        _mask(n, monitors.s_set), _mask(n, monitors.t_set), bool(block_monitors), uniforms)
    reason, walk_s, len_s, walk_t, len_t, hit_s, from_s, hit_t, from_t, _ = out
    walk_s = tuple(int(x) for x in walk_s[:len_s])
    walk_t = tuple(int(x) for x in walk_t[:len_t])
    done = Configuration(n, r, partner)
    name = REASONS[int(reason)]
    if name != "none":
        return TrialOutcome(False, name, None, (walk_s, walk_t), done)
    s_path = (int(hit_s),) + tuple(reversed(walk_s[: from_s + 1]))
    t_path = walk_t[: from_t + 1] + (int(hit_t),)
    return TrialOutcome(True, name, (s_path, t_path), (walk_s, walk_t), done)


# ---------------------------------------------------------------------------
# closed forms


def log_gnp_failure_bound(n: int, k: int, gamma: int, p: float) -> float:
    log_binom = math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)
    return math.log(2 * k) + 2 * log_binom + (2 * k - gamma) * p


def gnp_failure_bound(n: int, k: int, gamma: int, p: float) -> float:
    """2k * C(n,k)^2 * exp((2k - gamma) p): chance G(n,p) is not k-separable."""
    if min(n, k, gamma) <= 0 or p <= 0:
        raise ValueError("parameters must be positive")
    lb = log_gnp_failure_bound(n, k, gamma, p)
    return math.exp(lb) if lb < 709 else math.inf


def single_pair_failure_bound(gamma: int, k: int, p: float) -> float:
    """2 (1-p)^(gamma - 2k): chance one fixed pair defeats the direct-neighbour argument."""
    if gamma <= 2 * k:
        return 1.0
    return min(1.0, 2.0 * (1.0 - p) ** (gamma - 2 * k))


def useful_points(r: int, ell: int) -> int:
    return (r - 2) * ell + 1


def regular_success_probability(n: int, gamma: int, ell_s: int, ell_t: int, r: int) -> float:
    if not 0 <= gamma <= n:
        raise ValueError("need 0 <= gamma <= n")
    miss = 1.0 - gamma / n
    return (1.0 - miss ** useful_points(r, ell_s)) * (1.0 - miss ** useful_points(r, ell_t))


def wilson_interval(successes: int, trials: int, z: float = 1.959963984540054):
    if trials <= 0:
        return 0.0, 1.0
    ph = successes / trials
    den = 1 + z * z / trials
    centre = (ph + z * z / (2 * trials)) / den
    half = z * math.sqrt(ph * (1 - ph) / trials + z * z / (4 * trials * trials)) / den
    lo = 0.0 if successes == 0 else max(0.0, centre - half)
    hi = 1.0 if successes == trials else min(1.0, centre + half)
    return lo, hi


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentConfig:
    seed: int = 0
    trials: int = 100
    n: int = 40
    p: Optional[float] = None
    r: Optional[int] = None
    gamma: int = 10
    k: int = 1
    ell_s: int = 0
    ell_t: int = 0
    block_monitors: bool = False

    def validate(self, model: str) -> None:
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if model == "gnp":
            if self.p is None or not 0.0 <= self.p <= 1.0:
                raise ValueError("gnp model needs p in [0, 1]")
            if not 2 * self.gamma < self.n:
                raise ValueError("need gamma < n/2")
        elif model == "regular":
            if self.r is None or self.r < 3:
                raise ValueError("regular model needs r >= 3")
        else:
            raise ValueError(f"unknown model {model!r}")
        if self.gamma < 1 or self.k < 1:
            raise ValueError("gamma and k must be positive")

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    rows: list  # (seed, trial, success, reason)
    summary: dict

    def csv(self) -> str:
        lines = ["seed,trial,success,reason"]
        lines += [f"{s},{t},{int(ok)},{why}" for s, t, ok, why in self.rows]
        return "\n".join(lines) + "\n"


def _sample_graph(cfg: ExperimentConfig, model: str, rng) -> Network:
    if model == "gnp":
        return gen_gnp(cfg.n, cfg.p, rng)
    return gen_random_regular(cfg.n, cfg.r, rng)[0]


def monte_carlo_separability(cfg: ExperimentConfig, model: str = "gnp", threads: Optional[int] = None) -> ExperimentReport:
    """Empirical chance that a random pair of disjoint k-sets outside S and T is inseparable.

    Per trial: sample a graph, draw disjoint S and T of size gamma, draw
    disjoint U and W of size k among the remaining vertices, test exactly.
    """
    cfg.validate(model)
    if cfg.n - 2 * cfg.gamma < 2 * cfg.k:
        raise ValueError("gamma and k too large to fit disjointly")

    def trial(i):
        rng = make_rng(cfg.seed, i)
        g = _sample_graph(cfg, model, rng)
        perm = rng.permutation(cfg.n)
        g_, k = cfg.gamma, cfg.k
        S, T = perm[:g_], perm[g_:2 * g_]
        U, W = perm[2 * g_:2 * g_ + k], perm[2 * g_ + k:2 * g_ + 2 * k]
        scheme = ProbingScheme.of(g, S.tolist(), T.tolist())
        ok = separable(scheme, U.tolist(), W.tolist()).separable
        return cfg.seed, i, ok, "" if ok else "not_separable"

    rows = run_trials(trial, cfg.trials, threads)
    failures = sum(1 for r in rows if not r[2])
    lo, hi = wilson_interval(failures, cfg.trials)
    summary = {"freq": failures / cfg.trials, "ci_low": lo, "ci_high": hi,
               "bound": None, "failures": failures, "trials": cfg.trials}
    if model == "gnp":
        summary["bound"] = gnp_failure_bound(cfg.n, cfg.k, cfg.gamma, cfg.p) if cfg.p > 0 else None
        summary["single_pair_bound"] = single_pair_failure_bound(cfg.gamma, cfg.k, cfg.p)
    return ExperimentReport("separability-" + model, cfg.as_dict(), rows, summary)


def pathfinder_experiment(cfg: ExperimentConfig, threads: Optional[int] = None) -> ExperimentReport:
    """Repeated PathFinder trials on fresh configurations.

    Per trial, in stream ``(seed, i)``: a uniform random bucket v, disjoint
    S, T of size gamma and W of size k drawn from the other buckets.
    ``shooting_rate`` is the success frequency among trials whose walks
    completed; it is the empirical counterpart of the closed-form estimate.
    """
    cfg.validate("regular")
    n, r = cfg.n, cfg.r
    if 2 * cfg.gamma + cfg.k + 1 > n:
        raise ValueError("gamma and k too large to fit disjointly")

    def trial(i):
        rng = make_rng(cfg.seed, i)
        perm = rng.permutation(n)
        v = int(perm[0])
        S = perm[1:1 + cfg.gamma].tolist()
        T = perm[1 + cfg.gamma:1 + 2 * cfg.gamma].tolist()
        W = perm[1 + 2 * cfg.gamma:1 + 2 * cfg.gamma + cfg.k].tolist()
        out = pathfinder(Configuration(n, r), v, cfg.ell_s, cfg.ell_t, W,
                         MonitorPlacement(frozenset(S), frozenset(T)), rng, cfg.block_monitors)
        return cfg.seed, i, out.success, out.failure_reason

    rows = run_trials(trial, cfg.trials, threads)
    succ = sum(1 for row in rows if row[2])
    walked = sum(1 for row in rows if row[3] not in WALK_FAILURES)
    lo, hi = wilson_interval(succ, cfg.trials)
    counts = {name: sum(1 for row in rows if row[3] == name) for name in REASONS.values()}
    summary = {
        "freq": succ / cfg.trials, "ci_low": lo, "ci_high": hi,
        "bound": regular_success_probability(n, cfg.gamma, cfg.ell_s, cfg.ell_t, r),
        "walks_completed": walked,
        "shooting_rate": succ / walked if walked else None,
        "reasons": counts, "trials": cfg.trials,
    }
    return ExperimentReport("pathfinder", cfg.as_dict(), rows, summary)

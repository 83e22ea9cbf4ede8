"""Time the hot kernels under the numba and pure-numpy backends.

Each backend runs in its own interpreter because the choice is fixed at
import time by ``BNTOMO_DISABLE_NUMBA``.  Every workload runs once to warm
up (numba compilation), then ``--repeat`` times; the best time is reported.

    python benchmarks/bench_kernels.py --repeat 3
"""
import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from bntomo import _kernels
from bntomo.graph import vertex_connectivity
from bntomo.identifiability import ProbingScheme, max_identifiability
from bntomo.random_models import ExperimentConfig, pathfinder_experiment
from bntomo.topologies import build_augmented_hypergrid, canonical_placement
from bntomo.verify import kappa3_graphs, verify_losd

repeat = int(sys.argv[1])
g, emb = build_augmented_hypergrid(4, 2, 3)
h423 = ProbingScheme(g, canonical_placement(emb))
graphs = [g for _, g in kappa3_graphs(50, 0)]
cfg = ExperimentConfig(seed=0, trials=2000, n=200, r=3, gamma=20, k=1, ell_s=10, ell_t=10)

workloads = {
    "vertex_connectivity x50": lambda: [vertex_connectivity(x) for x in graphs],
    "mu H(4,2,3) kmax=5": lambda: max_identifiability(h423, 5),
    "los-d 5000 sampled pairs": lambda: verify_losd(samples=5000),
    "pathfinder 2000 trials": lambda: pathfinder_experiment(cfg, threads=1),
}
out = {"backend": _kernels.BACKEND, "times": {}}
for name, fn in workloads.items():
    fn()
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    out["times"][name] = best
print(json.dumps(out))
"""


def run(disable: bool, repeat: int) -> dict:
    env = dict(os.environ)
    env.pop("BNTOMO_DISABLE_NUMBA", None)
    if disable:
        env["BNTOMO_DISABLE_NUMBA"] = "1"
    proc = subprocess.run([sys.executable, "-c", WORKER, str(repeat)], env=env,
                          capture_output=True, text=True, check=True)
    return json.loads(proc.stdout)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    print(f"{'workload':<28}{fast['backend']:>10}{slow['backend']:>10}{'speedup':>10}")
    for name, t_fast in fast["times"].items():
        t_slow = slow["times"][name]
        print(f"{name:<28}{t_fast:>9.3f}s{t_slow:>9.3f}s{t_slow / t_fast:>9.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())

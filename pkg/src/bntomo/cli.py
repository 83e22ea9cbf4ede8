"""``bntomo`` command line: generate, identifiability, verify, experiment.

Exit codes: 0 success, 1 a verified property was violated, 2 usage or parse error.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from dataclasses import fields
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__, verify
from .graph import UNBOUNDED, st_separator, vertex_connectivity
from .identifiability import ProbingScheme, max_identifiability, separator_placement, upper_bound_witness
from .io import (
    ParseError,
    read_edge_list,
    read_embedding_csv,
    read_placement,
    write_edge_list,
    write_embedding_csv,
    write_manifest,
    write_placement,
)
from .random_models import ExperimentConfig, gen_gnp, gen_random_regular, monte_carlo_separability, pathfinder_experiment
from .topologies import (
    build_augmented_hypergrid,
    build_hypergrid,
    build_los_network,
    canonical_placement,
)

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("bntomo")


class UsageError(Exception):
    pass


def _jsonable(obj):
    """Replace infinities by null and numpy scalars by Python numbers."""
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return None
    return obj


def _dump(payload: dict) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def _params(args) -> dict:
    return {k: v for k, v in vars(args).items() if k not in ("func", "verbose") and v is not None}


# ---------------------------------------------------------------------------
# generate


def _read_points(path) -> list:
    try:
        data = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2, comments="#")
    except ValueError:
        data = np.loadtxt(path, delimiter=",", dtype=np.int64, ndmin=2, comments="#", skiprows=1)
    return [tuple(row) for row in data]


def cmd_generate(args) -> int:
    started = time.time()
    kind = args.kind
    emb = None
    need = {"hypergrid": ("n", "d"), "aug-hypergrid": ("n", "d", "omega"), "los": ("n", "d", "omega", "points"),
            "gnp": ("n", "p"), "regular": ("n", "r")}[kind]
    missing = [f"--{k}" for k in need if getattr(args, k) is None]
    if missing:
        raise UsageError(f"generate {kind} needs {' '.join(missing)}")
    try:
        if kind == "hypergrid":
            g, emb = build_hypergrid(args.n, args.d)
        elif kind == "aug-hypergrid":
            g, emb = build_augmented_hypergrid(args.n, args.d, args.omega)
        elif kind == "los":
            g, emb = build_los_network(args.n, args.d, args.omega, _read_points(args.points))
        elif kind == "gnp":
            if not 0.0 <= args.p <= 1.0:
                raise ValueError("p must lie in [0, 1]")
            g = gen_gnp(args.n, args.p, args.seed)
        else:
            g, _ = gen_random_regular(args.n, args.r, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None

    prefix = Path(args.out or kind)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    outputs = [prefix.with_suffix(".edges")]
    write_edge_list(g, outputs[0])
    if emb is not None:
        outputs.append(prefix.with_suffix(".coords.csv"))
        write_embedding_csv(emb, outputs[-1])
        if emb.is_full and emb.omega > 2:
            try:
                pl = canonical_placement(emb)
            except ValueError as exc:
                log.info("no canonical placement: %s", exc)
            else:
                outputs.append(prefix.with_suffix(".placement"))
                write_placement(pl, outputs[-1])
    write_manifest(prefix.with_suffix(".manifest.json"), f"generate {kind}", _params(args),
                   args.seed, outputs, started, __version__)
    print(f"{outputs[0]}: {g.vertex_count} vertices, {len(g.edges)} edges")
    return EXIT_OK


# ---------------------------------------------------------------------------
# identifiability


def _infer_embedding(g, coords_path, omega):
    coords = np.loadtxt(coords_path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    n = int(coords[:, 1:].max())
    if omega is None:
        # the longest axis hop of any edge is omega - 1
        pts = coords[np.argsort(coords[:, 0]), 1:]
        omega = 1 + max((int(np.abs(pts[u] - pts[v]).sum()) for u, v in g.edges), default=1)
    return read_embedding_csv(coords_path, n, omega)


def cmd_identifiability(args) -> int:
    started = time.time()
    g = read_edge_list(args.graph)
    if args.placement_file:
        pl = read_placement(args.placement_file)
    elif args.placement == "canonical":
        if not args.coords:
            raise UsageError("--placement canonical needs --coords")
        emb = _infer_embedding(g, args.coords, args.omega)
        if emb.vertex_count != g.vertex_count:
            raise ParseError("embedding and edge list disagree on the vertex count")
        pl = canonical_placement(emb)
    else:
        pl = separator_placement(g)
    scheme = ProbingScheme(g, pl)
    rep = max_identifiability(scheme, args.kmax)
    payload = rep.to_json_dict()
    payload["placement"] = {"S": sorted(pl.s_set), "T": sorted(pl.t_set)}

    kst, K = st_separator(g, pl.s_set, pl.t_set)
    witness = None
    if kst != UNBOUNDED and K and scheme.universe:
        U, W = upper_bound_witness(scheme)
        witness = {"U": sorted(U), "W": sorted(W)}
    conn = vertex_connectivity(g) if g.vertex_count >= 2 else None
    payload["certificates"] = {
        "ub_witness": witness,
        "st_separator": sorted(K) if kst != UNBOUNDED else None,
        "min_vertex_separator": sorted(conn.min_separator) if conn and conn.min_separator is not None else None,
    }
    if kst == UNBOUNDED:
        log.warning("S and T are adjacent or overlap: kappa_ST is unbounded")
    text = _dump(payload)
    if args.out:
        Path(args.out).write_text(text)
        write_manifest(Path(args.out).with_suffix(".manifest.json"), "identifiability", _params(args),
                       None, [args.out], started, __version__)
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify

VERIFY_DEFAULTS = {
    "ub": {},
    "lb-gen": {"queries": 1000},
    "kappa3": {"count": 50},
    "los2": {"n": 4, "omega": 3},
    "los-d": {"n": 3, "d": 3, "omega": 3, "samples": 100_000},
    "gnp-bound": {"n": 40, "p": 0.5, "gamma": [15], "k": 2, "trials": 2000},
    "pathfinder": {"n": 200, "r": 3, "gamma": [20], "ell": 10, "k": 1, "trials": 2000, "tol": 0.10},
}


def run_verify(theorem: str, **opts) -> list:
    o = dict(VERIFY_DEFAULTS[theorem])
    o.update({k: v for k, v in opts.items() if v is not None})
    seed = o.get("seed", 0)
    if theorem in ("ub", "lb-gen"):
        if o.get("suite", "small") != "small":
            raise UsageError(f"unknown suite {o['suite']!r}")
        suite = verify.small_suite(seed, o.get("count", 200))
        if theorem == "ub":
            return verify.verify_ub(suite)
        return verify.verify_lb(suite, o["queries"], seed)
    if theorem == "kappa3":
        return verify.verify_kappa3(o["count"], seed)
    if theorem == "los2":
        return verify.verify_los2(o["n"], o["omega"])
    if theorem == "los-d":
        return verify.verify_losd(o["n"], o["d"], o["omega"], o["samples"], seed)
    if theorem == "gnp-bound":
        return verify.verify_gnp(o["n"], o["p"], o["gamma"][0], o["k"], o["trials"], seed)
    return verify.verify_pathfinder(o["n"], o["r"], o["gamma"], o["ell"], o["trials"], seed, o["k"], o["tol"])


def cmd_verify(args) -> int:
    started = time.time()
    opts = {k: getattr(args, k) for k in ("suite", "count", "n", "d", "omega", "r", "p", "gamma", "k", "ell",
                                          "trials", "seed", "queries", "samples", "tol")}
    try:
        rows = run_verify(args.theorem, **opts)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    text = verify.checks_csv(rows)
    if args.out:
        Path(args.out).write_text(text)
        write_manifest(Path(args.out).with_suffix(".manifest.json"), f"verify {args.theorem}", _params(args),
                       args.seed, [args.out], started, __version__)
    else:
        sys.stdout.write(text)
    bad = sum(not r.passed for r in rows)
    print(f"verify {args.theorem}: {len(rows) - bad}/{len(rows)} checks passed", file=sys.stderr)
    return EXIT_VIOLATION if bad else EXIT_OK


# ---------------------------------------------------------------------------
# experiment

CONFIG_KEYS = {f.name for f in fields(ExperimentConfig)} | {"kind", "model", "ell"}


def load_experiment_config(path, overrides) -> dict:
    """Read a TOML key = value file and apply ``--set key=value`` overrides."""
    cfg = {}
    if path:
        try:
            with open(path, "rb") as fh:
                cfg = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    for item in overrides or ():
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects key=value, got {item!r}")
        key = key.strip()
        try:
            cfg[key] = tomllib.loads(f"v = {value.strip()}")["v"]
        except tomllib.TOMLDecodeError:
            cfg[key] = value.strip()
    unknown = sorted(set(cfg) - CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    return cfg


def cmd_experiment(args) -> int:
    started = time.time()
    cfg = load_experiment_config(args.config, args.set)
    kind = cfg.pop("kind", "separability")
    model = cfg.pop("model", "gnp" if kind == "separability" else "regular")
    ell = cfg.pop("ell", None)
    if ell is not None:
        cfg.setdefault("ell_s", ell)
        cfg.setdefault("ell_t", ell)
    try:
        ec = ExperimentConfig(**cfg)
        if kind == "separability":
            report = monte_carlo_separability(ec, model)
        elif kind == "pathfinder":
            if model != "regular":
                raise ValueError("pathfinder runs on the regular model only")
            report = pathfinder_experiment(ec)
        else:
            raise ValueError(f"unknown experiment kind {kind!r}")
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from None

    prefix = Path(args.out)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    csv_path, json_path = prefix.with_suffix(".csv"), prefix.with_suffix(".json")
    csv_path.write_text(report.csv())
    json_path.write_text(_dump({"kind": report.kind, "config": report.config, "summary": report.summary}))
    write_manifest(prefix.with_suffix(".manifest.json"), f"experiment {kind}",
                   {"model": model, **report.config}, ec.seed, [csv_path, json_path], started, __version__)
    s = report.summary
    print(f"{report.kind}: freq={s['freq']:.4f} [{s['ci_low']:.4f}, {s['ci_high']:.4f}] bound={s['bound']}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="bntomo", description="Node-failure identifiability toolkit.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a topology as an edge list")
    g.add_argument("kind", choices=("hypergrid", "aug-hypergrid", "los", "gnp", "regular"))
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--omega", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--r", type=int)
    g.add_argument("--points", help="CSV of occupied points (los only)")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", help="output path prefix (default: the kind)")
    g.set_defaults(func=cmd_generate)

    i = sub.add_parser("identifiability", help="exact maximal identifiability with bounds")
    i.add_argument("graph", help="edge-list file")
    where = i.add_mutually_exclusive_group(required=True)
    where.add_argument("--placement", choices=("canonical", "separator"))
    where.add_argument("--placement-file")
    i.add_argument("--coords", help="embedding CSV (for canonical placement)")
    i.add_argument("--omega", type=int, help="LoS range (inferred from the edges if omitted)")
    i.add_argument("--kmax", type=int)
    i.add_argument("--out", help="JSON output path (default: stdout)")
    i.set_defaults(func=cmd_identifiability)

    v = sub.add_parser("verify", help="run a theorem check suite")
    v.add_argument("theorem", choices=verify.THEOREMS)
    v.add_argument("--suite", choices=("small",))
    v.add_argument("--count", type=int)
    v.add_argument("--n", type=int)
    v.add_argument("--d", type=int)
    v.add_argument("--omega", type=int)
    v.add_argument("--r", type=int)
    v.add_argument("--p", type=float)
    v.add_argument("--gamma", type=int, nargs="+")
    v.add_argument("--k", type=int)
    v.add_argument("--ell", type=int)
    v.add_argument("--trials", type=int)
    v.add_argument("--queries", type=int)
    v.add_argument("--samples", type=int)
    v.add_argument("--tol", type=float)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--out", help="CSV output path (default: stdout)")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="Monte-Carlo sweep from a key = value config")
    e.add_argument("--config", help="TOML config file")
    e.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a config key")
    e.add_argument("--out", default="experiment", help="output path prefix")
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"bntomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValueError, OSError) as exc:
        print(f"bntomo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Text formats: edge lists, placement files, embedding CSV, run manifests."""
from __future__ import annotations

import hashlib
import json
import platform
import re
import time
from pathlib import Path

import numpy as np

from .graph import Network
from .topologies import LosEmbedding, MonitorPlacement


class ParseError(ValueError):
    pass


_VERTICES_RE = re.compile(r"#\s*vertices\s*:\s*(\d+)")


def write_edge_list(g: Network, path) -> None:
    lines = [f"# vertices: {g.vertex_count}"] + [f"{u} {v}" for u, v in g.edges]
    Path(path).write_text("\n".join(lines) + "\n")


def parse_edge_list(text: str) -> Network:
    """``u v`` per line, ``#`` comments; the vertex count is the largest id + 1
    unless a ``# vertices: N`` comment says otherwise."""
    declared = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        m = _VERTICES_RE.match(raw.strip())
        if m:
            declared = int(m.group(1))
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise ParseError(f"line {lineno}: non-integer vertex in {raw!r}") from None
    n = max((max(e) for e in edges), default=-1) + 1
    if declared is not None:
        if declared < n:
            raise ParseError(f"declared {declared} vertices but edges mention vertex {n - 1}")
        n = declared
    try:
        return Network.from_edges(n, edges)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_edge_list(path) -> Network:
    return parse_edge_list(Path(path).read_text())


def format_placement(pl: MonitorPlacement) -> str:
    return "S: " + " ".join(map(str, sorted(pl.s_set))) + "\nT: " + " ".join(map(str, sorted(pl.t_set))) + "\n"


def write_placement(pl: MonitorPlacement, path) -> None:
    Path(path).write_text(format_placement(pl))


def parse_placement(text: str) -> MonitorPlacement:
    sets = {}
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        key = key.strip().upper()
        if not sep or key not in ("S", "T") or key in sets:
            raise ParseError(f"bad placement line {raw!r}")
        try:
            sets[key] = frozenset(int(x) for x in rest.split())
        except ValueError:
            raise ParseError(f"non-integer vertex in {raw!r}") from None
    if set(sets) != {"S", "T"}:
        raise ParseError("placement needs one 'S:' and one 'T:' line")
    try:
        return MonitorPlacement(sets["S"], sets["T"])
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_placement(path) -> MonitorPlacement:
    return parse_placement(Path(path).read_text())


def write_embedding_csv(emb: LosEmbedding, path) -> None:
    header = ",".join(["vertex"] + [f"x{i + 1}" for i in range(emb.d)])
    rows = [header] + [",".join(map(str, [v, *emb.point(v)])) for v in range(emb.vertex_count)]
    Path(path).write_text("\n".join(rows) + "\n")


def read_embedding_csv(path, n: int, omega: int) -> LosEmbedding:
    data = np.loadtxt(path, delimiter=",", skiprows=1, dtype=np.int64, ndmin=2)
    order = np.argsort(data[:, 0])
    coords = data[order, 1:]
    return LosEmbedding(coords.shape[1], n, omega, coords)


def sha256_file(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(path, command: str, params: dict, seed, outputs, started: float, version: str) -> dict:
    """Record what produced ``outputs``; only ``wall_clock_s`` varies between identical runs."""
    manifest = {
        "command": command,
        "params": params,
        "seed": seed,
        "rng": "numpy Philox, stream (seed, trial) per trial",
        "tool_version": version,
        "python": platform.python_version(),
        "wall_clock_s": round(time.time() - started, 3),
        "outputs": {Path(p).name: sha256_file(p) for p in outputs},
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return manifest

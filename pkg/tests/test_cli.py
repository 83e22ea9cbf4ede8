import csv
import json
import os
import tempfile
from importlib import resources

import jsonschema
import pytest
from hypothesis import given

from bntomo.cli import EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main
from bntomo.io import (
    ParseError,
    format_placement,
    parse_edge_list,
    parse_placement,
    read_edge_list,
    write_edge_list,
)
from bntomo.topologies import MonitorPlacement
from bntomo.verify import CSV_HEADER

from strategies import networks, schemes


def schema(name):
    return json.loads(resources.files("bntomo").joinpath("schemas", name).read_text())


def write(path, text):
    path.write_text(text)
    return str(path)


def without_timing(manifest):
    return {k: v for k, v in manifest.items() if k != "wall_clock_s"}


class TestEdgeList:
    def test_comments_and_inference(self):
        g = parse_edge_list("# a path\n0 1\n1 2  # trailing\n\n")
        assert g.vertex_count == 3 and g.edges == ((0, 1), (1, 2))

    def test_declared_isolated_vertices(self):
        assert parse_edge_list("# vertices: 5\n0 1\n").vertex_count == 5
        with pytest.raises(ParseError):
            parse_edge_list("# vertices: 1\n0 1\n")

    @pytest.mark.parametrize("text", ["0\n", "0 1 2\n", "a b\n", "1 1\n", "-1 2\n"])
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_edge_list(text)

    def test_line_number_in_message(self):
        with pytest.raises(ParseError, match="line 3"):
            parse_edge_list("0 1\n1 2\nx y\n")

    @given(networks(1, 9))
    def test_round_trip(self, g):
        fd, path = tempfile.mkstemp()
        os.close(fd)
        try:
            write_edge_list(g, path)
            h = read_edge_list(path)
        finally:
            os.unlink(path)
        assert h.vertex_count == g.vertex_count and h.edges == g.edges


class TestPlacementFile:
    @given(schemes(3, 9))
    def test_round_trip(self, case):
        _, S, T = case
        pl = MonitorPlacement(frozenset(S), frozenset(T))
        assert parse_placement(format_placement(pl)) == pl

    @pytest.mark.parametrize("text", ["S: 0\n", "S: 0\nT: 0\n", "S: 0\nS: 1\nT: 2\n", "X: 1\nT: 2\n", "S: a\nT: 1\n"])
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_placement(text)


class TestGenerate:
    def test_aug_hypergrid(self, tmp_path):
        prefix = tmp_path / "h"
        assert main(["generate", "aug-hypergrid", "--n", "4", "--d", "2", "--omega", "3", "--out", str(prefix)]) == EXIT_OK
        g = read_edge_list(f"{prefix}.edges")
        assert g.vertex_count == 16 and len(g.edges) == 40
        assert (tmp_path / "h.coords.csv").exists() and (tmp_path / "h.placement").exists()
        man = json.loads((tmp_path / "h.manifest.json").read_text())
        jsonschema.validate(man, schema("manifest.schema.json"))
        assert set(man["outputs"]) >= {"h.edges", "h.coords.csv"}

    def test_gnp_deterministic(self, tmp_path):
        for name in ("a", "b"):
            assert main(["generate", "gnp", "--n", "30", "--p", "0.5", "--seed", "7", "--out", str(tmp_path / name)]) == 0
        assert (tmp_path / "a.edges").read_bytes() == (tmp_path / "b.edges").read_bytes()
        ma = json.loads((tmp_path / "a.manifest.json").read_text())
        mb = json.loads((tmp_path / "b.manifest.json").read_text())
        assert ma["outputs"]["a.edges"] == mb["outputs"]["b.edges"]

    def test_regular(self, tmp_path):
        assert main(["generate", "regular", "--n", "50", "--r", "3", "--seed", "1", "--out", str(tmp_path / "r")]) == 0
        assert len(read_edge_list(tmp_path / "r.edges").edges) == 75

    def test_los_points(self, tmp_path):
        pts = write(tmp_path / "pts.csv", "x1,x2\n1,1\n1,3\n3,3\n")
        assert main(["generate", "los", "--n", "3", "--d", "2", "--omega", "3", "--points", pts,
                     "--out", str(tmp_path / "l")]) == 0
        assert read_edge_list(tmp_path / "l.edges").edges == ((0, 1), (1, 2))

    @pytest.mark.parametrize("argv", [
        ["generate", "gnp", "--n", "10"],
        ["generate", "regular", "--n", "5", "--r", "3"],
        ["generate", "aug-hypergrid", "--n", "4", "--d", "2", "--omega", "2"],
        ["generate", "torus", "--n", "4"],
    ])
    def test_usage_errors(self, argv, tmp_path, monkeypatch):
        monkeypatch.chdir(tmp_path)
        try:
            code = main(argv)
        except SystemExit as exc:
            code = exc.code
        assert code == EXIT_USAGE


class TestIdentifiability:
    def run(self, tmp_path, argv):
        out = tmp_path / "rep.json"
        code = main(["identifiability", *argv, "--out", str(out)])
        return code, json.loads(out.read_text()) if out.exists() else None

    def test_h423(self, tmp_path):
        prefix = tmp_path / "h"
        main(["generate", "aug-hypergrid", "--n", "4", "--d", "2", "--omega", "3", "--out", str(prefix)])
        code, rep = self.run(tmp_path, [f"{prefix}.edges", "--placement", "canonical", "--coords",
                                        f"{prefix}.coords.csv", "--kmax", "5"])
        assert code == EXIT_OK
        jsonschema.validate(rep, schema("identifiability_report.schema.json"))
        assert rep["mu"] in (3, 4) and rep["mu_exact"]
        assert rep["failing_pair"] is not None and rep["certificates"]["ub_witness"] is not None
        assert json.loads((tmp_path / "rep.manifest.json").read_text())["command"] == "identifiability"

    def test_path_graph(self, tmp_path):
        g = write(tmp_path / "p.edges", "0 1\n1 2\n")
        pl = write(tmp_path / "p.placement", "S: 0\nT: 2\n")
        code, rep = self.run(tmp_path, [g, "--placement-file", pl])
        assert code == 0 and rep["mu"] == 0
        jsonschema.validate(rep, schema("identifiability_report.schema.json"))

    def test_c6_separator(self, tmp_path):
        g = write(tmp_path / "c6.edges", "".join(f"{i} {(i + 1) % 6}\n" for i in range(6)))
        code, rep = self.run(tmp_path, [g, "--placement", "separator"])
        assert code == 0
        kappa = rep["bounds"]["kappa"]
        assert kappa - 2 <= rep["mu"] <= kappa
        assert rep["bounds"]["kappa_st"] is None  # unbounded is reported, not an error

    def test_parse_failure(self, tmp_path):
        g = write(tmp_path / "bad.edges", "0 1\nnope\n")
        pl = write(tmp_path / "p.placement", "S: 0\nT: 1\n")
        assert self.run(tmp_path, [g, "--placement-file", pl])[0] == EXIT_USAGE

    def test_bad_placement(self, tmp_path):
        g = write(tmp_path / "p.edges", "0 1\n1 2\n")
        pl = write(tmp_path / "p.placement", "S: 0\nT: 7\n")
        assert self.run(tmp_path, [g, "--placement-file", pl])[0] == EXIT_USAGE

    def test_canonical_needs_coords(self, tmp_path):
        g = write(tmp_path / "p.edges", "0 1\n1 2\n")
        assert self.run(tmp_path, [g, "--placement", "canonical"])[0] == EXIT_USAGE

    def test_stdout(self, tmp_path, capsys):
        g = write(tmp_path / "p.edges", "0 1\n1 2\n")
        pl = write(tmp_path / "p.placement", "S: 0\nT: 2\n")
        assert main(["identifiability", g, "--placement-file", pl]) == 0
        assert json.loads(capsys.readouterr().out)["mu"] == 0


class TestVerify:
    def rows(self, path):
        with open(path) as fh:
            reader = csv.reader(fh)
            return next(reader), list(reader)

    def test_ub_small(self, tmp_path):
        out = tmp_path / "ub.csv"
        assert main(["verify", "ub", "--suite", "small", "--count", "30", "--out", str(out)]) == EXIT_OK
        header, rows = self.rows(out)
        assert tuple(header) == CSV_HEADER and rows and all(r[-1] == "1" for r in rows)

    def test_los2(self, tmp_path):
        out = tmp_path / "los2.csv"
        assert main(["verify", "los2", "--n", "4", "--omega", "3", "--out", str(out)]) == EXIT_OK
        _, rows = self.rows(out)
        assert any("witness" in r[2] for r in rows)

    def test_pathfinder_row(self, tmp_path):
        out = tmp_path / "pf.csv"
        code = main(["verify", "pathfinder", "--n", "200", "--r", "3", "--gamma", "20", "--ell", "10",
                     "--trials", "300", "--tol", "0.2", "--out", str(out)])
        assert code in (EXIT_OK, EXIT_VIOLATION)
        _, rows = self.rows(out)
        assert rows and rows[0][0] == "pathfinder"

    def test_violation_exit(self, tmp_path):
        # a zero tolerance cannot be met by a Monte-Carlo estimate
        out = tmp_path / "pf.csv"
        code = main(["verify", "pathfinder", "--n", "200", "--r", "3", "--gamma", "20", "--ell", "10",
                     "--trials", "50", "--tol", "0", "--out", str(out)])
        assert code == EXIT_VIOLATION

    def test_deterministic(self, tmp_path):
        for name in ("a", "b"):
            main(["verify", "gnp-bound", "--n", "20", "--p", "0.5", "--gamma", "6", "--k", "1",
                  "--trials", "50", "--seed", "3", "--out", str(tmp_path / f"{name}.csv")])
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_unknown_theorem(self):
        with pytest.raises(SystemExit) as exc:
            main(["verify", "thm99"])
        assert exc.value.code == EXIT_USAGE


class TestExperiment:
    def test_gnp_config(self, tmp_path):
        cfg = write(tmp_path / "e.toml", 'kind = "separability"\nmodel = "gnp"\nn = 20\np = 0.5\n'
                                         'gamma = 4\nk = 1\ntrials = 40\nseed = 5\n')
        prefix = tmp_path / "e"
        assert main(["experiment", "--config", cfg, "--out", str(prefix)]) == EXIT_OK
        summary = json.loads((tmp_path / "e.json").read_text())
        jsonschema.validate(summary, schema("experiment_summary.schema.json"))
        man = json.loads((tmp_path / "e.manifest.json").read_text())
        jsonschema.validate(man, schema("manifest.schema.json"))
        first = (tmp_path / "e.csv").read_bytes()
        assert main(["experiment", "--config", cfg, "--out", str(prefix)]) == EXIT_OK
        assert (tmp_path / "e.csv").read_bytes() == first
        assert without_timing(json.loads((tmp_path / "e.manifest.json").read_text())) == without_timing(man)

    def test_override(self, tmp_path):
        cfg = write(tmp_path / "e.toml", 'kind = "pathfinder"\nn = 100\nr = 3\ngamma = 10\nk = 1\nell = 5\ntrials = 30\n')
        prefix = tmp_path / "e"
        assert main(["experiment", "--config", cfg, "--set", "trials=12", "--out", str(prefix)]) == 0
        summary = json.loads((tmp_path / "e.json").read_text())
        assert summary["config"]["trials"] == 12
        jsonschema.validate(summary, schema("experiment_summary.schema.json"))
        assert len((tmp_path / "e.csv").read_text().splitlines()) == 13

    def test_unknown_key(self, tmp_path):
        cfg = write(tmp_path / "e.toml", "bogus = 1\n")
        assert main(["experiment", "--config", cfg, "--out", str(tmp_path / "e")]) == EXIT_USAGE

    def test_bad_toml(self, tmp_path):
        cfg = write(tmp_path / "e.toml", "n = = 3\n")
        assert main(["experiment", "--config", cfg, "--out", str(tmp_path / "e")]) == EXIT_USAGE

import json
import subprocess
import sys

import numpy as np
import pytest

from rgraph.cli import run
from rgraph.graph import Graph, load_graph, save_graph
from rgraph.models import BetaParams, dump_params, load_params, sample_graph


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    beta = np.random.default_rng(0).uniform(0.5, 2, 30)
    (tmp_path / "b.json").write_text(dump_params(BetaParams(beta)))
    save_graph(sample_graph(BetaParams(beta), seed=1), tmp_path / "g.txt")
    save_graph(Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)]), tmp_path / "star.txt")
    return tmp_path


def json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_gen_is_reproducible(workdir):
    assert run(["gen", "--model", "beta", "--params", "b.json", "--seed", "7", "-o", "a.txt"]) == 0
    assert run(["gen", "--model", "beta", "--params", "b.json", "--seed", "7", "-o", "b.txt"]) == 0
    assert (workdir / "a.txt").read_bytes() == (workdir / "b.txt").read_bytes()
    config = json.loads((workdir / "a.txt.run.json").read_text())["config"]
    assert config["seed"] == 7 and config["model"] == "beta" and config["subcommand"] == "gen"
    assert load_graph(workdir / "a.txt").n == 30


def test_gen_model_mismatch(workdir):
    assert run(["gen", "--model", "rank", "--params", "b.json", "-o", "x.txt"]) == 1


def test_fit_star_is_numerical_failure(workdir, capsys):
    assert run(["fit", "--model", "beta", "star.txt", "-o", "fit.json"]) == 2
    assert "does not exist" in capsys.readouterr().err
    assert not (workdir / "fit.json").exists()


def test_fit_writes_loadable_params(workdir):
    assert run(["fit", "--model", "beta", "g.txt", "-o", "fit.json"]) == 0
    params = load_params(workdir / "fit.json")
    assert isinstance(params, BetaParams) and params.n == 30
    report = json.loads((workdir / "fit.json.report.json").read_text())
    assert set(report["report"]) >= {"converged", "iterations", "objective", "warnings"}
    assert run(["gen", "--model", "beta", "--params", "fit.json", "-o", "again.txt"]) == 0


@pytest.mark.parametrize("args", [
    ["--model", "additive"],
    ["--model", "rank", "--k", "2"],
    ["--model", "kbeta", "--k", "2", "--restarts", "3"],
])
def test_fit_other_models(workdir, capsys, args):
    assert run(["fit", "g.txt", *args]) == 0
    doc = json_out(capsys)
    assert doc["params"]["model"] == args[1]
    assert doc["config"]["seed"] == 0


def test_fit_kbeta_with_label_file(workdir, capsys):
    (workdir / "labels.json").write_text(json.dumps([1, 2] * 15))
    assert run(["fit", "g.txt", "--model", "kbeta", "--labels", "labels.json"]) == 0
    assert json_out(capsys)["params"]["labels"] == [1, 2] * 15
    (workdir / "bad.json").write_text(json.dumps([1, 2]))
    assert run(["fit", "g.txt", "--model", "kbeta", "--labels", "bad.json"]) == 1
    assert run(["fit", "g.txt", "--model", "rank"]) == 1


def test_gof_mc_pvalue_bounds(workdir, capsys):
    argv = ["gof", "--test", "mc", "--stat", "eig2", "--replicates", "199", "--seed", "3", "g.txt"]
    assert run(argv) == 0
    doc = json_out(capsys)
    assert doc["test"] == "mc-second-largest-eigenvalue-abs"
    assert 1 / 200 <= doc["p_value"] <= 1
    assert doc["seed"] == 3 and doc["replicates"] == 199
    assert doc["config"]["stat"] == "eig2"


def test_gof_analytic_tests(workdir, capsys):
    assert run(["gof", "--test", "ks", "g.txt", "--seed", "2"]) == 0
    ks = json_out(capsys)
    assert ks["test"] == "ks-uniform" and 0 <= ks["p_value"] <= 1
    assert run(["gof", "--test", "blocked", "--blocks", "4", "--params", "b.json", "g.txt"]) == 0
    assert json_out(capsys)["null_sample"] == "chi2(4)"


def test_gof_errors(workdir):
    assert run(["gof", "--test", "mc", "--replicates", "5", "g.txt"]) == 1
    assert run(["gof", "--test", "mc", "--stat", "bogus", "g.txt"]) == 1
    assert run(["gof", "--test", "mc", "--replicates", "19", "star.txt"]) == 2


def test_spectrum_and_dae(workdir, capsys):
    assert run(["spectrum", "g.txt", "--threshold", "2.5"]) == 0
    doc = json_out(capsys)
    assert len(doc["eigenvalues"]) == 30 and doc["threshold"] == 2.5
    assert run(["dae", "--params", "b.json"]) == 0
    assert 1 <= json_out(capsys)["dae"] <= 2


def test_color(workdir, capsys):
    assert run(["color", "g.txt", "--k", "2", "--restarts", "4", "--seed", "9"]) == 0
    doc = json_out(capsys)
    assert len(doc["labels"]) == 30 and set(doc["labels"]) == {1, 2}
    assert len(doc["per_restart_q"]) == 4 and doc["q"] == min(doc["per_restart_q"])


def test_sample_deg_keeps_degrees(workdir):
    assert run(["sample-deg", "g.txt", "--steps", "2000", "--seed", "4", "-o", "s.txt"]) == 0
    assert load_graph(workdir / "s.txt").degrees().tolist() == load_graph(workdir / "g.txt").degrees().tolist()
    assert json.loads((workdir / "s.txt.run.json").read_text())["config"]["steps"] == 2000


def test_sample_deg_frozen_warns(workdir, capsys):
    assert run(["sample-deg", "star.txt", "-o", "s.txt"]) == 0
    assert "frozen" in capsys.readouterr().err
    assert load_graph(workdir / "s.txt") == load_graph(workdir / "star.txt")


def test_usage_errors(workdir, capsys):
    assert run(["bogus"]) == 1
    assert run(["spectrum", "missing.txt"]) == 1
    assert run(["spectrum", "g.txt", "--nope"]) == 1
    assert run(["gen", "--model", "beta", "--params", "b.json", "--seed", "-1"]) == 1
    assert run([]) == 1
    (workdir / "broken.txt").write_text("3 1\n1 1\n")
    assert run(["spectrum", "broken.txt"]) == 1
    assert "line 2" in capsys.readouterr().err


def test_inputs_not_modified(workdir):
    before = (workdir / "g.txt").read_bytes()
    run(["sample-deg", "g.txt", "--steps", "100", "-o", "s.txt"])
    run(["fit", "--model", "beta", "g.txt", "-o", "f.json"])
    assert (workdir / "g.txt").read_bytes() == before


def test_console_script_entry_point(workdir):
    proc = subprocess.run([sys.executable, "-m", "rgraph.cli", "spectrum", "star.txt"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["nontrivial_count"] == 0
    proc = subprocess.run([sys.executable, "-m", "rgraph.cli", "fit", "--model", "beta", "star.txt"],
                          capture_output=True, text=True)
    assert proc.returncode == 2

import io
import json
import subprocess
import sys

import numpy as np
import pytest

from kgcn.cli import main
from kgcn.gcn import GcnModel, save_model
from kgcn.graph import generate_er, write_graphs

from conftest import path3


@pytest.fixture
def path_file(tmp_path):
    p = tmp_path / "path.jsonl"
    write_graphs(p, [(path3(), 0, "er", 0.5, 0)])
    return p


def test_solve_exact(path_file, capsys):
    assert main(["solve", str(path_file), "--k", "0", "--method", "exact"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["members"] == [0, 2] and out["weight"] == pytest.approx(0.9)


def test_solve_greedy_from_stdin(path_file, capsys, monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO(path_file.read_text()))
    assert main(["solve", "--method", "greedy"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["members"] == [1] and out["weight"] == pytest.approx(0.6)


def test_solve_gcn_greedy(path_file, tmp_path, capsys):
    model = tmp_path / "m.txt"
    save_model(GcnModel.zeros(), model)
    assert main(["solve", str(path_file), "--method", "gcn-greedy", "--model", str(model)]) == 0
    assert json.loads(capsys.readouterr().out)["members"] == [1]
    assert main(["solve", str(path_file), "--method", "gcn-greedy"]) == 1
    assert "--model" in capsys.readouterr().err


def test_no_arguments_usage(capsys):
    assert main([]) == 1
    assert "usage" in capsys.readouterr().err


def test_unknown_subcommand_and_flag(capsys):
    assert main(["frobnicate"]) == 1
    assert main(["solve", "--bogus"]) == 1
    assert "usage" in capsys.readouterr().err


def test_eval_missing_model(capsys, path_file):
    assert main(["eval", "--data", str(path_file)]) == 1
    err = capsys.readouterr().err
    assert "usage" in err and "--model" in err


def test_user_errors_exit_1(tmp_path, capsys):
    assert main(["solve", str(tmp_path / "missing.jsonl")]) == 1
    bad = tmp_path / "bad.jsonl"
    bad.write_text("{oops\n")
    assert main(["solve", str(bad)]) == 1
    assert "error" in capsys.readouterr().err


def test_capacity_error_exit_1(tmp_path, capsys):
    p = tmp_path / "big.jsonl"
    write_graphs(p, [(generate_er(30, 0.1, np.random.default_rng(0)), 0, "er", 0.1, 0)])
    assert main(["solve", str(p), "--method", "exact"]) == 1


def test_pipeline(tmp_path, capsys):
    data = tmp_path / "data"
    assert main(["gen-data", "--family", "ba", "--n", "20", "--count-train", "6", "--count-val", "3",
                 "--count-test", "4", "--seed", "2", "--out-dir", str(data)]) == 0
    assert (data / "manifest-gen-data.json").exists()
    model = tmp_path / "run" / "model.txt"
    log = tmp_path / "run" / "log.csv"
    assert main(["train", "--data-dir", str(data), "--epochs", "2", "--seed", "1",
                 "--out-model", str(model), "--log", str(log)]) == 0
    assert model.exists() and log.read_text().startswith("epoch,step,graph_id")
    manifest = json.loads((tmp_path / "run" / "manifest-train.json").read_text())
    assert manifest["subcommand"] == "train" and len(manifest["inputs"]) == 2
    out = tmp_path / "ev" / "table.csv"
    assert main(["eval", "--model", str(model), "--data", str(data / "test.jsonl"), "--out-csv",
                 str(out), "--per-graph-csv", str(tmp_path / "ev" / "pg.csv"),
                 "--train-family", "ba"]) == 0
    rows = out.read_text().splitlines()
    assert len(rows) == 2 and rows[1].startswith("ba,ba,0,5.0,5.0,10.0,")
    assert len((tmp_path / "ev" / "pg.csv").read_text().splitlines()) == 5
    sim = tmp_path / "sim" / "q.csv"
    assert main(["simulate", "--graph", str(data / "test.jsonl"), "--scheduler", "gcn-greedy",
                 "--model", str(model), "--arrival", "bernoulli:0.05", "--horizon", "200",
                 "--out-csv", str(sim)]) == 0
    assert len(sim.read_text().splitlines()) == 201
    assert (tmp_path / "sim" / "manifest-simulate.json").exists()


def test_simulate_generated_graph(tmp_path, capsys):
    out = tmp_path / "s.csv"
    assert main(["simulate", "--family", "er", "--n", "8", "--param", "0.3", "--scheduler", "exact",
                 "--arrival", "constant:0", "--horizon", "50", "--out-csv", str(out)]) == 0
    assert "max queue 0" in capsys.readouterr().out
    assert main(["simulate", "--family", "er", "--horizon", "5"]) == 1


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "kgcn"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr

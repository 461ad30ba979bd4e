import filecmp

import numpy as np
import pytest

from kgcn import train as train_mod
from kgcn.errors import ParameterError, TrainingDiverged
from kgcn.eval import evaluate
from kgcn.gcn import forward, gradients, init_model
from kgcn.graph import WeightedGraph, read_graphs
from kgcn.loss import Betas, cost_and_grad
from kgcn.train import (Adam, DatasetSpec, TrainConfig, build_dataset, generate_split, record_seed,
                        train_model)


def small_sets(family="ba", n=20, counts=(10, 5, 5), seed=0):
    spec = DatasetSpec(family, n, counts=counts, master_seed=seed)
    return [[x[0] for x in generate_split(spec, s)] for s in ("train", "val", "test")]


def test_full_scale_dataset(tmp_path):
    spec = DatasetSpec("er", 100, counts=(5000, 50, 500), master_seed=1)
    paths = build_dataset(spec, tmp_path)
    total = 0
    for split, path in paths.items():
        meta, items = read_graphs(path)
        assert meta["split"] == split and meta["n"] == 100
        total += len(items)
        if split == "train":
            params = [rec["param"] for _, rec in items]
            assert {p: params.count(p) for p in set(params)} == {
                0.02: 1000, 0.05: 1000, 0.075: 1000, 0.1: 1000, 0.15: 1000}
    assert total == 5550


def test_dataset_deterministic(tmp_path):
    spec = DatasetSpec("ba", 30, counts=(20, 5, 5), master_seed=3)
    a = build_dataset(spec, tmp_path / "a")
    b = build_dataset(spec, tmp_path / "b")
    for split in a:
        assert filecmp.cmp(a[split], b[split], shallow=False)


def test_ba_params():
    assert DatasetSpec("ba", 100).params == [2, 5, 8, 10, 15]


def test_record_seeds_distinct():
    seeds = {record_seed(0, s, i) for s in ("train", "val", "test") for i in range(100)}
    assert len(seeds) == 300


def test_records_regenerate_from_seed(tmp_path):
    spec = DatasetSpec("er", 25, counts=(3, 1, 1), master_seed=9)
    _, items = read_graphs(build_dataset(spec, tmp_path)["train"])
    for g, rec in items:
        h = train_mod.make_graph(rec["model"], rec["n"], rec["param"], rec["seed"])
        assert np.array_equal(g.adjacency, h.adjacency)
        assert g.weights.tobytes() == h.weights.tobytes()


@pytest.mark.parametrize("kwargs", [dict(family="ws"), dict(p_values=()), dict(p_values=(0.0,)),
                                    dict(counts=(0, 1, 1))])
def test_dataset_spec_validation(kwargs):
    with pytest.raises(ParameterError):
        DatasetSpec(**kwargs)


def test_config_validation():
    with pytest.raises(ParameterError):
        TrainConfig(epochs=0)
    with pytest.raises(ParameterError):
        TrainConfig(learning_rate=0.0)
    with pytest.raises(ParameterError):
        TrainConfig(optimizer="rmsprop")


def test_one_epoch_step_count():
    tr, va, _ = small_sets()
    _, log = train_model(tr, va, TrainConfig(epochs=1))
    assert len(log.steps) == 10
    assert [r["step"] for r in log.steps] == list(range(1, 11))
    assert sorted(r["graph_id"] for r in log.steps) == list(range(10))


def test_log_rows(tmp_path):
    tr, va, _ = small_sets()
    _, log = train_model(tr, va, TrainConfig(epochs=3, patience=10))
    keys = [(r["epoch"], r["step"]) for r in log.steps]
    assert keys == sorted(keys)
    csv = log.to_csv().splitlines()
    assert csv[0] == "epoch,step,graph_id,r1,p1,p2,cost,w_gcn"
    assert len(csv) == 31


def test_reward_only_pushes_likelihood_up():
    g = WeightedGraph.from_edges(1, [], [0.8])
    model = init_model((1, 32, 1), seed=5)
    opt = Adam(model.parameters(), lr=1e-3)
    betas = Betas(0, 0, 1)
    history = []
    for _ in range(50):
        pi, trace = forward(model, g)
        history.append(pi[0])
        _, dpi = cost_and_grad(g, pi, 0, betas)
        assert dpi[0] == -0.8
        g0, g1 = gradients(model, g, dpi, trace)
        opt.step(model.parameters(), [x for pair in zip(g0, g1) for x in pair])
    assert np.all(np.diff(history) > 0)


def test_reproducible():
    tr, va, _ = small_sets()
    cfg = TrainConfig(epochs=2, seed=4)
    a, _ = train_model(tr, va, cfg)
    b, _ = train_model(tr, va, cfg)
    for x, y in zip(a.parameters(), b.parameters()):
        assert x.tobytes() == y.tobytes()


def test_best_checkpoint_not_worse_than_untrained():
    tr, va, _ = small_sets(counts=(15, 8, 5), seed=2)
    cfg = TrainConfig(epochs=3, seed=8)
    model, log = train_model(tr, va, cfg)
    untrained = log.epochs[0]["val_ratio"]
    assert evaluate(model, va, cfg.k).mean >= untrained
    assert log.epochs[log.best_epoch]["val_ratio"] == evaluate(model, va, cfg.k).mean


def test_sgd_runs():
    tr, va, _ = small_sets()
    model, log = train_model(tr, va, TrainConfig(epochs=1, optimizer="sgd", learning_rate=1e-4))
    assert len(log.steps) == 10


def test_divergence_reported(monkeypatch):
    tr, va, _ = small_sets()

    def broken(g, pi, k, betas, one_sided=False):
        bd, grad = cost_and_grad(g, pi, k, betas)
        return bd, grad * np.nan

    monkeypatch.setattr(train_mod, "cost_and_grad", broken)
    with pytest.raises(TrainingDiverged, match="epoch 1, graph"):
        train_model(tr, va, TrainConfig(epochs=1))


def test_empty_sets_rejected():
    tr, va, _ = small_sets()
    with pytest.raises(ParameterError):
        train_model([], va, TrainConfig())
    with pytest.raises(ParameterError):
        train_model(tr, [], TrainConfig())

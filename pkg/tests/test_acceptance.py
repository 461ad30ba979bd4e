"""Exit criteria, one test per criterion. Run with ``pytest tests/test_acceptance.py``."""

import filecmp
import os
import time

import numpy as np
import pytest

from kgcn.cli import main
from kgcn.eval import evaluate
from kgcn.gcn import GcnModel, forward, gradients, init_model
from kgcn.graph import generate_ba, generate_er
from kgcn.kis import exact_max_weight_kis, greedy_k_independent_set, is_k_independent, set_weight
from kgcn.loss import Betas, cost_and_grad
from kgcn.sim import ArrivalProcess, growth_slope, run
from kgcn.train import DatasetSpec, TrainConfig, generate_split, train_model

from conftest import random_graph, triangle
from oracles import central_difference, cost_naive, max_rel_error


def _random_scores(rng, g):
    kind = rng.integers(0, 4)
    if kind == 0:
        return g.weights.copy()
    if kind == 1:
        return rng.normal(size=g.n)
    if kind == 2:
        return rng.integers(0, 3, g.n).astype(float)  # many ties
    return rng.uniform(size=g.n) * g.weights


def test_1_greedy_feasible_and_maximal(criterion):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    cases = bad = 0
    while cases < 10_000:
        n = int(rng.integers(1, 51))
        if n >= 2 and cases % 2:
            g = generate_ba(n, int(rng.integers(1, min(6, n - 1) + 1)), rng)
        else:
            g = generate_er(n, float(rng.uniform(0.0, 0.5)), rng)
        k = cases % 5
        s = greedy_k_independent_set(g, _random_scores(rng, g), k)
        ok = is_k_independent(g, s.members, k)
        for v in np.flatnonzero(~s.members):
            trial = s.members.copy()
            trial[v] = True
            if is_k_independent(g, trial, k):
                ok = False
                break
        bad += not ok
        cases += 1
    elapsed = time.perf_counter() - t0
    criterion("1 greedy feasible+maximal", bad == 0 and elapsed < 60,
              f"{cases} cases, {bad} failures, {elapsed:.1f}s (< 60s)")


def _exact_reversed(g, k):
    """Second enumeration: bit v is node v, masks walked from 2^n - 1 down to 0."""
    n = g.n
    masks = np.arange((1 << n) - 1, -1, -1, dtype=np.int64)
    nb = [int(sum(1 << u for u in g.neighbors[v])) for v in range(n)]
    ok = np.ones(masks.size, dtype=bool)
    weight = np.zeros(masks.size)
    for v in range(n):
        has_v = (masks >> v) & 1
        deg = np.bitwise_count(masks & nb[v])
        ok &= ~((has_v == 1) & (deg > k))
        weight += has_v * g.weights[v]
    weight[~ok] = -np.inf
    best = weight.max()
    tied = masks[weight >= best - 1e-12]
    vectors = [tuple((int(m) >> v) & 1 for v in range(n)) for m in tied]
    return best, min(vectors)


def test_2_exact_oracle_equivalence(criterion):
    rng = np.random.default_rng(77)
    t0 = time.perf_counter()
    mismatches = dominated = equal = 0
    count = 600
    for i in range(count):
        g = random_graph(rng, n_max=14)
        k = i % 5
        ex = exact_max_weight_kis(g, k)
        w_ref, vec_ref = _exact_reversed(g, k)
        if not (abs(set_weight(g, ex) - w_ref) <= 1e-12 and tuple(ex.members.astype(int)) == vec_ref
                and is_k_independent(g, ex.members, k)):
            mismatches += 1
        w_gr = set_weight(g, greedy_k_independent_set(g, g.weights, k))
        if set_weight(g, ex) < w_gr - 1e-12:
            dominated += 1
        equal += abs(set_weight(g, ex) - w_gr) <= 1e-12
    elapsed = time.perf_counter() - t0
    criterion("2 exact oracle equivalence", mismatches == 0 and dominated == 0 and elapsed < 120,
              f"{count} instances, {mismatches} mismatches, {dominated} greedy>exact, "
              f"greedy optimal in {equal}/{count} ({equal / count:.1%}), {elapsed:.1f}s")


def test_3_gradient_check(criterion):
    rng = np.random.default_rng(3)
    worst = 0.0
    cases = 30
    for seed in range(cases):
        g = random_graph(rng, n_max=8, n_min=2)
        k = int(rng.integers(0, 3))
        betas = Betas(*rng.uniform(0.0, 10.0, 3))
        model = init_model((1, 4, 1), seed=seed)
        pi, trace = forward(model, g)
        bd, dpi = cost_and_grad(g, pi, k, betas)
        g0, g1 = gradients(model, g, dpi, trace)

        def cost():
            return cost_naive(g, forward(model, g)[0], k, betas, bd.w_gcn)

        for analytic, params in ((g0, model.theta0), (g1, model.theta1)):
            for a, p in zip(analytic, params):
                worst = max(worst, max_rel_error(a, central_difference(cost, p, h=1e-5)))
    criterion("3 gradient check", worst < 1e-4, f"{cases} cases, max rel error {worst:.2e} (< 1e-4)")


def test_4_identity_ratio(criterion):
    spec = DatasetSpec("er", 50, counts=(1, 1, 100), master_seed=5)
    test_er = [x[0] for x in generate_split(spec, "test")]
    spec = DatasetSpec("ba", 50, counts=(1, 1, 100), master_seed=5)
    test_ba = [x[0] for x in generate_split(spec, "test")]
    results = [evaluate(GcnModel.zeros(), ts, k) for ts in (test_er, test_ba) for k in range(5)]
    ok = all(r.mean == 1.0 and r.variance == 0.0 for r in results)
    criterion("4 identity ratio", ok, f"{len(results)} (test set, k) combinations, mean == 1.0, var == 0")


@pytest.fixture(scope="module")
def desk_data():
    spec = DatasetSpec("ba", 50, counts=(500, 20, 100), master_seed=0)
    return {s: [x[0] for x in generate_split(spec, s)] for s in ("train", "val", "test")}


@pytest.fixture(scope="module")
def desk_runs(desk_data):
    out = {}
    for k in (0, 2):
        t0 = time.perf_counter()
        model, log = train_model(desk_data["train"], desk_data["val"],
                                 TrainConfig(Betas(5, 5, 10), k=k, epochs=20, seed=0))
        out[k] = (model, evaluate(model, desk_data["test"], k), time.perf_counter() - t0)
    return out


def test_5_desk_scale_improvement(criterion, desk_runs):
    _, stats, elapsed = desk_runs[0]
    criterion("5 desk-scale ratio k=0", stats.mean >= 1.02 and elapsed < 900,
              f"mean {stats.mean:.4f} (>= 1.02), variance {stats.variance:.2e}, train {elapsed:.0f}s")


def test_6_k_transfer(criterion, desk_runs, desk_data):
    model, stats2, _ = desk_runs[2]
    stats0 = desk_runs[0][1]
    feasible = True
    for g in desk_data["test"]:
        pi, _ = forward(model, g)
        s = greedy_k_independent_set(g, pi * g.weights, 2)
        feasible &= is_k_independent(g, s.members, 2)
    criterion("6 k=2 non-degradation", feasible and stats2.mean >= stats0.mean - 0.01,
              f"k=2 mean {stats2.mean:.4f} vs k=0 mean {stats0.mean:.4f} - 0.01, feasible={feasible}")


def test_7_simulator(criterion):
    g = generate_er(10, 0.3, np.random.default_rng(0))
    zero = run(g, 1, ArrivalProcess("bernoulli", 0.0, seed=1), "greedy", horizon=100_000)
    a = zero.max_queue == 0.0 and not zero.total_queue.any()
    over = run(triangle(), 0, ArrivalProcess("constant", 0.5), "greedy", horizon=10_000)
    slope = growth_slope(over.total_queue, tail=0.5)
    one = generate_er(1, 0.0, np.random.default_rng(2))
    single = run(one, 0, ArrivalProcess("bernoulli", 0.4, seed=3), "greedy", horizon=10_000)
    c = single.mean_queue[0] < 1.0
    criterion("7 simulator", a and slope > 0.3 and c,
              f"(a) zero arrivals max queue {zero.max_queue}; (b) overload slope {slope:.3f} (> 0.3); "
              f"(c) single-node mean queue {single.mean_queue[0]:.3f} (< 1)")


def _pipeline(workdir):
    cwd = os.getcwd()
    os.chdir(workdir)
    try:
        codes = [
            main(["gen-data", "--family", "ba", "--n", "30", "--count-train", "40", "--count-val", "5",
                  "--count-test", "10", "--seed", "11", "--out-dir", "data"]),
            main(["train", "--data-dir", "data", "--epochs", "2", "--seed", "3", "--out-model",
                  "run/model.txt", "--log", "run/log.csv"]),
            main(["eval", "--model", "run/model.txt", "--data", "data/test.jsonl", "--out-csv",
                  "ev/table.csv", "--per-graph-csv", "ev/per_graph.csv"]),
            main(["simulate", "--graph", "data/test.jsonl", "--scheduler", "gcn-greedy", "--model",
                  "run/model.txt", "--arrival", "bernoulli:0.05", "--horizon", "2000", "--seed", "4",
                  "--out-csv", "sim/queues.csv"]),
        ]
    finally:
        os.chdir(cwd)
    return codes


def test_8_determinism(criterion, tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir()
    b.mkdir()
    codes = _pipeline(a) + _pipeline(b)
    capsys.readouterr()
    files = sorted(str(p.relative_to(a)) for p in a.rglob("*") if p.is_file())
    diff = [f for f in files if not filecmp.cmp(a / f, b / f, shallow=False)]
    manifests = [f for f in files if "manifest-" in f]
    criterion("8 determinism", codes == [0] * 8 and not diff and len(manifests) == 4,
              f"{len(files)} output files compared, {len(diff)} differ, {len(manifests)} manifests")

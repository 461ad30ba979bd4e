"""
Datasets and the training loop
------------------------------

Datasets are sets of random ER or BA graphs with uniform [0, 1) node weights.
Training does one optimizer step per graph on the unsupervised cost and keeps
the parameters with the best validation ratio (the untrained model included).
"""

import csv
import io
import os
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, TrainingDiverged
from .eval import as_items, evaluate
from .gcn import DEFAULT_DIMS, forward, gradients, init_model
from .graph import ba_attachments, generate_ba, generate_er, normalized_laplacian, write_graphs
from .loss import Betas, cost_and_grad

DEFAULT_P_VALUES = (0.02, 0.05, 0.075, 0.10, 0.15)
SPLITS = ("train", "val", "test")
LOG_COLUMNS = ["epoch", "step", "graph_id", "r1", "p1", "p2", "cost", "w_gcn"]


@dataclass(frozen=True)
class DatasetSpec:
    family: str = "er"
    n: int = 100
    p_values: tuple = DEFAULT_P_VALUES
    counts: tuple = (5000, 50, 500)
    master_seed: int = 0

    def __post_init__(self):
        if self.family not in ("er", "ba"):
            raise ParameterError(f"family must be 'er' or 'ba', got {self.family!r}")
        if self.n < 2:
            raise ParameterError(f"n must be at least 2, got {self.n}")
        if not self.p_values:
            raise ParameterError("p_values must be non-empty")
        if any(not 0.0 < p < 1.0 for p in self.p_values):
            raise ParameterError(f"p values must lie in (0, 1), got {self.p_values}")
        if len(self.counts) != 3 or any(c < 1 for c in self.counts):
            raise ParameterError(f"counts must be three positive integers, got {self.counts}")

    @property
    def params(self):
        """Generator parameters: p for ER, attachment counts for BA."""
        if self.family == "er":
            return list(self.p_values)
        return [ba_attachments(self.n, p) for p in self.p_values]

    def metadata(self, split):
        return {"family": self.family, "n": self.n, "p_values": list(self.p_values),
                "params": self.params, "counts": dict(zip(SPLITS, self.counts)),
                "master_seed": self.master_seed, "split": split,
                "weights": "uniform[0,1)"}


def record_seed(master_seed, split, index):
    """Per-graph seed derived from ``(master_seed, split, index)``."""
    ss = np.random.SeedSequence([master_seed, SPLITS.index(split), index])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def make_graph(family, n, param, seed):
    rng = np.random.default_rng(seed)
    if family == "er":
        return generate_er(n, param, rng)
    return generate_ba(n, param, rng)


def generate_split(spec, split):
    """``[(graph, id, family, param, seed), ...]`` for one split, cycling over the params."""
    count = spec.counts[SPLITS.index(split)]
    params = spec.params
    out = []
    for i in range(count):
        param = params[i % len(params)]
        seed = record_seed(spec.master_seed, split, i)
        out.append((make_graph(spec.family, spec.n, param, seed), i, spec.family, param, seed))
    return out


def build_dataset(spec, out_dir):
    """Write ``train.jsonl``, ``val.jsonl`` and ``test.jsonl`` under ``out_dir``."""
    os.makedirs(out_dir, exist_ok=True)
    paths = {}
    for split in SPLITS:
        path = os.path.join(out_dir, f"{split}.jsonl")
        write_graphs(path, generate_split(spec, split), meta=spec.metadata(split))
        paths[split] = path
    return paths


class Adam:
    def __init__(self, params, lr=1e-3, b1=0.9, b2=0.999, eps=1e-8):
        self.lr, self.b1, self.b2, self.eps = lr, b1, b2, eps
        self.m = [np.zeros_like(p) for p in params]
        self.v = [np.zeros_like(p) for p in params]
        self.t = 0

    def step(self, params, grads):
        self.t += 1
        c1 = 1.0 - self.b1**self.t
        c2 = 1.0 - self.b2**self.t
        for p, g, m, v in zip(params, grads, self.m, self.v):
            m *= self.b1
            m += (1.0 - self.b1) * g
            v *= self.b2
            v += (1.0 - self.b2) * g * g
            p -= self.lr * (m / c1) / (np.sqrt(v / c2) + self.eps)


class SGD:
    def __init__(self, params, lr=1e-3):
        self.lr = lr

    def step(self, params, grads):
        for p, g in zip(params, grads):
            p -= self.lr * g


@dataclass(frozen=True)
class TrainConfig:
    betas: Betas = Betas()
    k: int = 0
    epochs: int = 20
    learning_rate: float = 1e-3
    optimizer: str = "adam"
    seed: int = 0
    patience: int = 5
    dims: tuple = DEFAULT_DIMS
    one_sided_p1: bool = False

    def __post_init__(self):
        if self.epochs < 1:
            raise ParameterError(f"epochs must be >= 1, got {self.epochs}")
        if not self.learning_rate > 0:
            raise ParameterError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.optimizer not in ("adam", "sgd"):
            raise ParameterError(f"optimizer must be 'adam' or 'sgd', got {self.optimizer!r}")
        if self.k < 0:
            raise ParameterError(f"k must be >= 0, got {self.k}")


@dataclass
class TrainLog:
    steps: list = field(default_factory=list)   # one dict per optimizer step
    epochs: list = field(default_factory=list)  # {"epoch", "val_ratio", "improved"}
    best_epoch: int = 0

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(LOG_COLUMNS)
        for row in self.steps:
            writer.writerow([row["epoch"], row["step"], row["graph_id"]]
                            + [repr(row[c]) for c in LOG_COLUMNS[3:]])
        return buf.getvalue()


def train_model(train_set, val_set, config):
    """Fit a GCN by stochastic descent on the unsupervised cost.

    Returns ``(model, log)``: the parameters with the best mean validation
    ratio seen after any epoch (epoch 0 being the freshly initialized model)
    and the step/epoch log.
    """
    train_items = as_items(train_set)
    val_items = as_items(val_set)
    if not train_items or not val_items:
        raise ParameterError("training and validation sets must be non-empty")

    init_ss, order_ss = np.random.SeedSequence(config.seed).spawn(2)
    model = init_model(config.dims, rng=np.random.default_rng(init_ss))
    model.seed = config.seed
    order_rng = np.random.default_rng(order_ss)

    params = model.parameters()
    if config.optimizer == "adam":
        opt = Adam(params, lr=config.learning_rate)
    else:
        opt = SGD(params, lr=config.learning_rate)

    train_laps = [normalized_laplacian(g) for _, g in train_items]
    val_graphs = [g for _, g in val_items]
    val_laps = [normalized_laplacian(g) for g in val_graphs]

    log = TrainLog()
    best_metric = evaluate(model, val_graphs, config.k, val_laps).mean
    best = model.copy()
    log.epochs.append({"epoch": 0, "val_ratio": best_metric, "improved": True})
    stale = 0
    step = 0
    for epoch in range(1, config.epochs + 1):
        for j in order_rng.permutation(len(train_items)).tolist():
            gid, g = train_items[j]
            pi, trace = forward(model, g, train_laps[j])
            breakdown, dpi = cost_and_grad(g, pi, config.k, config.betas,
                                           one_sided=config.one_sided_p1)
            g0, g1 = gradients(model, g, dpi, trace)
            grads = [x for pair in zip(g0, g1) for x in pair]
            if not np.isfinite(breakdown.cost) or not all(np.isfinite(x).all() for x in grads):
                raise TrainingDiverged(f"non-finite cost or gradient at epoch {epoch}, graph {gid}")
            opt.step(params, grads)
            step += 1
            log.steps.append({"epoch": epoch, "step": step, "graph_id": gid,
                              "r1": breakdown.r1, "p1": breakdown.p1, "p2": breakdown.p2,
                              "cost": breakdown.cost, "w_gcn": breakdown.w_gcn})
        metric = evaluate(model, val_graphs, config.k, val_laps).mean
        improved = metric > best_metric
        log.epochs.append({"epoch": epoch, "val_ratio": metric, "improved": improved})
        if improved:
            best_metric = metric
            best = model.copy()
            log.best_epoch = epoch
            stale = 0
        else:
            stale += 1
            if stale >= config.patience:
                break
    return best, log

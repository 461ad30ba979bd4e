"""
Ratio statistics W_gcn / W_gr over a test set, and CSV tables of them.
"""

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractViolation, ParameterError
from .gcn import forward
from .kis import greedy_k_independent_set, is_k_independent, set_weight

TABLE_COLUMNS = ["train_family", "test_family", "k", "beta1", "beta2", "beta3",
                 "mean_ratio", "variance", "count"]


@dataclass
class RatioStats:
    mean: float
    variance: float
    count: int
    per_graph: list = field(default_factory=list)  # (graph id, w_gcn, w_gr, ratio)
    skipped: int = 0


def as_items(graphs):
    """Normalize a graph collection to ``[(id, graph), ...]``.

    Accepts bare graphs (ids are list positions) or the ``(graph, record)``
    pairs returned by :func:`kgcn.graph.read_graphs`.
    """
    items = []
    for i, item in enumerate(graphs):
        if isinstance(item, tuple):
            g, rec = item
            items.append((rec["id"] if isinstance(rec, dict) else rec, g))
        else:
            items.append((i, item))
    return items


def graph_ratio(model, g, k, laplacian=None):
    """``(w_gcn, w_gr)`` for one graph; both decodes are checked for feasibility."""
    pi, _ = forward(model, g, laplacian)
    gcn_set = greedy_k_independent_set(g, pi * g.weights, k)
    gr_set = greedy_k_independent_set(g, g.weights, k)
    for s in (gcn_set, gr_set):
        if not is_k_independent(g, s.members, k):
            raise ContractViolation(f"greedy produced an infeasible set for k={k}")
    return set_weight(g, gcn_set), set_weight(g, gr_set)


def evaluate(model, test_set, k, laplacians=None):
    """Mean and population variance of ``W_gcn / W_gr`` over ``test_set``.

    Graphs whose plain greedy weight is 0 have no defined ratio; they are left
    out and counted in ``skipped``.
    """
    items = as_items(test_set)
    if not items:
        raise ParameterError("test set is empty")
    per_graph = []
    skipped = 0
    for j, (gid, g) in enumerate(items):
        lap = None if laplacians is None else laplacians[j]
        w_gcn, w_gr = graph_ratio(model, g, k, lap)
        if w_gr == 0.0:
            skipped += 1
            continue
        per_graph.append((gid, w_gcn, w_gr, w_gcn / w_gr))
    if not per_graph:
        return RatioStats(float("nan"), float("nan"), 0, per_graph, skipped)
    ratios = np.array([r[3] for r in per_graph])
    return RatioStats(float(np.mean(ratios)), float(np.var(ratios)), len(per_graph),
                      per_graph, skipped)


def emit_table(rows):
    """CSV text for ``[(config, RatioStats), ...]``.

    ``config`` is a mapping with ``train_family``, ``test_family``, ``k`` and
    ``beta1..3``. Variances are absolute, not scaled.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TABLE_COLUMNS)
    for config, stats in rows:
        writer.writerow([config["train_family"], config["test_family"], config["k"],
                         config["beta1"], config["beta2"], config["beta3"],
                         repr(stats.mean), repr(stats.variance), stats.count])
    return buf.getvalue()


def per_graph_csv(stats):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["graph_id", "w_gcn", "w_gr", "ratio"])
    for gid, w_gcn, w_gr, ratio in stats.per_graph:
        writer.writerow([gid, repr(w_gcn), repr(w_gr), repr(ratio)])
    return buf.getvalue()

"""
Weighted conflict graphs
------------------------

Undirected node-weighted graphs, the ER / BA random generators used for the
datasets, the normalized Laplacian consumed by the GCN, and the line-delimited
record format used for graph files.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParameterError

RECORD_FORMAT = "kgcn-graphs"
RECORD_VERSION = 1


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with a non-negative weight on every node.

    Both arrays are stored read-only; use :meth:`with_weights` to get a copy
    with different weights on the same topology.
    """

    adjacency: np.ndarray
    weights: np.ndarray
    _neighbors: tuple = field(init=False, repr=False)

    def __post_init__(self):
        adj = np.array(self.adjacency, dtype=bool)
        w = np.array(self.weights, dtype=np.float64)
        if adj.ndim != 2 or adj.shape[0] != adj.shape[1] or adj.shape[0] < 1:
            raise ParameterError(f"adjacency must be a non-empty square matrix, got shape {adj.shape}")
        if not np.array_equal(adj, adj.T):
            raise ParameterError("adjacency must be symmetric")
        if adj.diagonal().any():
            raise ParameterError("adjacency must not contain self-loops")
        if w.shape != (adj.shape[0],):
            raise ParameterError(f"expected {adj.shape[0]} weights, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise ParameterError("weights must be finite and non-negative")
        adj.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "weights", w)
        nbrs = tuple(tuple(int(u) for u in np.flatnonzero(row)) for row in adj)
        object.__setattr__(self, "_neighbors", nbrs)

    @classmethod
    def from_edges(cls, n, edges, weights):
        adj = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"invalid edge ({u}, {v}) for n={n}")
            adj[u, v] = adj[v, u] = True
        return cls(adj, weights)

    @property
    def n(self):
        return self.adjacency.shape[0]

    @property
    def neighbors(self):
        """Per-node sorted neighbor tuples."""
        return self._neighbors

    @property
    def degrees(self):
        return self.adjacency.sum(axis=1)

    def edges(self):
        """Sorted list of ``(u, v)`` pairs with ``u < v``."""
        rows, cols = np.nonzero(np.triu(self.adjacency, 1))
        return [(int(u), int(v)) for u, v in zip(rows, cols)]

    @property
    def n_edges(self):
        return int(np.triu(self.adjacency, 1).sum())

    def with_weights(self, weights):
        return WeightedGraph(self.adjacency, weights)

    def permute(self, perm):
        """Relabel nodes so that new node ``i`` is old node ``perm[i]``."""
        perm = np.asarray(perm)
        return WeightedGraph(self.adjacency[np.ix_(perm, perm)], self.weights[perm])


def _check_n(n):
    if int(n) != n or n < 1:
        raise ParameterError(f"node count must be a positive integer, got {n}")
    return int(n)


def generate_er(n, p, rng):
    """Erdos-Renyi graph: every unordered pair is an edge with probability ``p``.

    Edge draws come first (upper triangle, row-major), then the uniform [0, 1)
    node weights, both from ``rng``.
    """
    n = _check_n(n)
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"edge probability must lie in [0, 1], got {p}")
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(iu.size) < p
    adj = np.zeros((n, n), dtype=bool)
    adj[iu[keep], ju[keep]] = True
    adj |= adj.T
    weights = rng.uniform(0.0, 1.0, n)
    return WeightedGraph(adj, weights)


def generate_ba(n, m, rng):
    """Barabasi-Albert graph grown from a clique on the first ``m`` nodes.

    Each later node attaches to ``m`` distinct existing nodes drawn with
    probability proportional to their current degree. With ``m == 1`` the seed
    node has degree zero, so the first attachment is uniform.
    """
    n = _check_n(n)
    if int(m) != m or not 1 <= m < n:
        raise ParameterError(f"attachment count must satisfy 1 <= m < n, got m={m}, n={n}")
    m = int(m)
    adj = np.zeros((n, n), dtype=bool)
    adj[:m, :m] = True
    np.fill_diagonal(adj, False)
    deg = adj.sum(axis=1).astype(np.float64)
    for v in range(m, n):
        existing = deg[:v]
        total = existing.sum()
        p = existing / total if total > 0 else None
        targets = rng.choice(v, size=m, replace=False, p=p)
        adj[v, targets] = adj[targets, v] = True
        deg[targets] += 1
        deg[v] = m
    weights = rng.uniform(0.0, 1.0, n)
    return WeightedGraph(adj, weights)


def ba_attachments(n, p):
    """Attachment count for a BA graph matched to ER density: round(n * p), at least 1.

    Halves round up (``7.5 -> 8``).
    """
    return max(1, int(math.floor(n * p + 0.5 + 1e-9)))


def normalized_laplacian(g):
    """``I - D^{-1/2} A D^{-1/2}`` with ``D^{-1/2}`` set to 0 at isolated nodes.

    Isolated nodes therefore get an identity row. The result is exactly
    symmetric.
    """
    deg = g.degrees.astype(np.float64)
    inv_sqrt = np.zeros_like(deg)
    nz = deg > 0
    inv_sqrt[nz] = 1.0 / np.sqrt(deg[nz])
    off = np.where(g.adjacency, -np.multiply.outer(inv_sqrt, inv_sqrt), 0.0)
    # force bitwise symmetry regardless of multiplication order
    off = np.triu(off, 1)
    lap = off + off.T
    np.fill_diagonal(lap, 1.0)
    return lap


# -- record format --------------------------------------------------------

def _fmt_float(x):
    return format(float(x), ".17g")


def graph_to_record(g, *, id, model, param, seed):
    """Serialize one graph as a single JSON line (no trailing newline)."""
    head = json.dumps({"id": id, "model": model, "n": g.n, "param": param, "seed": seed})
    edges = json.dumps([list(e) for e in g.edges()], separators=(",", ":"))
    weights = "[" + ",".join(_fmt_float(x) for x in g.weights) + "]"
    return head[:-1] + f', "edges": {edges}, "weights": {weights}}}'


def record_to_graph(line):
    """Parse one record line; returns ``(graph, record_dict)``."""
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise FormatError(f"record is not valid JSON: {exc}") from None
    for key in ("id", "model", "n", "edges", "weights"):
        if key not in rec:
            raise FormatError(f"record missing field '{key}'")
    n = rec["n"]
    if not isinstance(n, int) or n < 1:
        raise FormatError(f"field 'n' must be a positive integer, got {n!r}")
    if len(rec["weights"]) != n:
        raise FormatError(f"field 'weights' has {len(rec['weights'])} entries, expected {n}")
    try:
        g = WeightedGraph.from_edges(n, [tuple(e) for e in rec["edges"]], rec["weights"])
    except (ParameterError, TypeError, ValueError) as exc:
        raise FormatError(f"field 'edges'/'weights' invalid: {exc}") from None
    return g, rec


def write_graphs(path, records, meta=None):
    """Write ``(graph, id, model, param, seed)`` tuples, optionally after a metadata line."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        if meta is not None:
            f.write(json.dumps({"format": RECORD_FORMAT, "version": RECORD_VERSION, **meta},
                               sort_keys=True) + "\n")
        for g, id_, model, param, seed in records:
            f.write(graph_to_record(g, id=id_, model=model, param=param, seed=seed) + "\n")


def read_graphs(path):
    """Read a graph file; returns ``(meta_or_None, [(graph, record), ...])``."""
    meta = None
    out = []
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            if lineno == 1 and '"format"' in line:
                meta = json.loads(line)
                if meta.get("format") != RECORD_FORMAT:
                    raise FormatError(f"unknown file format {meta.get('format')!r}")
                continue
            try:
                out.append(record_to_graph(line))
            except FormatError as exc:
                raise FormatError(f"{path}:{lineno}: {exc}") from None
    return meta, out

"""
k-independent sets
------------------

A node set is k-independent when every selected node has at most ``k``
selected neighbours. Schedules in a k-tolerant conflict graph are exactly these
sets. This module provides the feasibility check, the greedy decoder used both
as the plain baseline and behind the GCN, and a brute-force exact solver for
small graphs.
"""

from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, ParameterError

EXACT_MAX_NODES = 24
_CHUNK_BITS = 16


@dataclass(frozen=True, eq=False)
class ScheduleSet:
    members: np.ndarray
    k: int

    @property
    def nodes(self):
        return [int(v) for v in np.flatnonzero(self.members)]

    def __len__(self):
        return int(self.members.sum())


def _members(g, members):
    members = np.asarray(members, dtype=bool)
    if members.shape != (g.n,):
        raise ParameterError(f"members must have length {g.n}, got shape {members.shape}")
    return members


def _check_k(k):
    if int(k) != k or k < 0:
        raise ParameterError(f"tolerance k must be a non-negative integer, got {k}")
    return int(k)


def is_k_independent(g, members, k):
    members = _members(g, members)
    in_deg = g.adjacency[:, members].sum(axis=1)
    return bool(np.all(in_deg[members] <= k))


def set_weight(g, s):
    members = s.members if isinstance(s, ScheduleSet) else s
    members = _members(g, members)
    return float(g.weights[members].sum())


def greedy_k_independent_set(g, scores, k):
    """Greedy k-independent set, visiting nodes by descending score.

    Ties go to the lower node index. A node joins the set when it has at most
    ``k`` selected neighbours and none of those neighbours is already at ``k``.
    Once a selected node reaches ``k`` selected neighbours, its remaining
    unselected neighbours are dropped from consideration.

    Parameters
    ----------
    g : WeightedGraph
    scores : array_like
        One finite score per node. The plain baseline passes ``g.weights``; the
        GCN decoder passes ``pi * g.weights``.
    k : int
        Tolerance.

    Returns
    -------
    ScheduleSet
        A maximal k-independent set.
    """
    k = _check_k(k)
    scores = np.asarray(scores, dtype=np.float64)
    if scores.shape != (g.n,):
        raise ParameterError(f"scores must have length {g.n}, got shape {scores.shape}")
    if np.isnan(scores).any():
        raise ParameterError("scores contain NaN")
    if not np.isfinite(scores).all():
        raise ParameterError("scores must be finite")

    # stable sort on -score keeps lower index first among ties
    order = np.argsort(-scores, kind="stable")
    nbrs = g.neighbors
    in_deg = [0] * g.n
    selected = [False] * g.n
    eligible = [True] * g.n
    for v in order.tolist():
        if not eligible[v] or in_deg[v] > k:
            continue
        if any(selected[u] and in_deg[u] >= k for u in nbrs[v]):
            continue
        selected[v] = True
        eligible[v] = False
        saturated = [v] if in_deg[v] == k else []
        for u in nbrs[v]:
            in_deg[u] += 1
            if selected[u] and in_deg[u] == k:
                saturated.append(u)
        for s in saturated:
            for u in nbrs[s]:
                if not selected[u]:
                    eligible[u] = False
    return ScheduleSet(np.array(selected, dtype=bool), k)


def _subset_bits(n, start, stop):
    """Member rows for masks ``start..stop-1``; bit ``n-1-i`` of the mask is node ``i``.

    With this layout ascending mask order is lexicographic order on member vectors.
    """
    masks = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((masks[:, None] >> shifts) & 1).astype(bool)


def feasible_subsets(g, k):
    """All k-independent member vectors of ``g`` in lexicographic order (n <= 24)."""
    k = _check_k(k)
    if g.n > EXACT_MAX_NODES:
        raise CapacityError(f"exhaustive search supports n <= {EXACT_MAX_NODES}, got n={g.n}")
    adj = g.adjacency.astype(np.int32)
    total = 1 << g.n
    step = 1 << _CHUNK_BITS
    parts = []
    for start in range(0, total, step):
        bits = _subset_bits(g.n, start, min(total, start + step))
        in_deg = bits.astype(np.int32) @ adj
        ok = ~np.any(bits & (in_deg > k), axis=1)
        parts.append(bits[ok])
    return np.concatenate(parts)


def exact_max_weight_kis(g, k):
    """Maximum-weight k-independent set by exhaustive enumeration (n <= 24).

    Among sets of equal weight the lexicographically smallest member vector
    wins.
    """
    k = _check_k(k)
    if g.n > EXACT_MAX_NODES:
        raise CapacityError(f"exhaustive search supports n <= {EXACT_MAX_NODES}, got n={g.n}")
    adj = g.adjacency.astype(np.int32)
    w = g.weights
    total = 1 << g.n
    step = 1 << _CHUNK_BITS
    best_w = -np.inf
    best = None
    for start in range(0, total, step):
        bits = _subset_bits(g.n, start, min(total, start + step))
        in_deg = bits.astype(np.int32) @ adj
        ok = ~np.any(bits & (in_deg > k), axis=1)
        vals = np.where(ok, bits @ w, -np.inf)
        i = int(np.argmax(vals))
        # strict '>' keeps the earliest (lexicographically smallest) maximiser
        if vals[i] > best_w:
            best_w = vals[i]
            best = bits[i].copy()
    return ScheduleSet(best, k)

"""
Unsupervised training cost
--------------------------

``C = beta1 * P1 + beta2 * P2 - beta3 * R1`` where

* ``R1 = sum_v pi_v w_v`` rewards likely heavy nodes,
* ``P1 = sum_v (pi_v * (sum_{u in N(v)} pi_u - k))**2`` penalises
  tolerance violations of the relaxed selection ``pi``,
* ``P2 = (sum_v pi_v w_v - W_gcn)**2`` pulls the relaxed weight towards the
  weight of the greedy decode of ``pi * w``.

``W_gcn`` comes from a discrete decoder and is treated as a constant when
differentiating.
"""

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .kis import greedy_k_independent_set, set_weight


@dataclass(frozen=True)
class Betas:
    beta1: float = 5.0
    beta2: float = 5.0
    beta3: float = 10.0

    def __post_init__(self):
        for name in ("beta1", "beta2", "beta3"):
            v = getattr(self, name)
            if not np.isfinite(v) or v < 0:
                raise ParameterError(f"{name} must be finite and >= 0, got {v}")

    def as_tuple(self):
        return (self.beta1, self.beta2, self.beta3)


@dataclass(frozen=True)
class CostBreakdown:
    r1: float
    p1: float
    p2: float
    cost: float
    w_gcn: float


def _pi(g, pi):
    pi = np.asarray(pi, dtype=np.float64)
    if pi.shape != (g.n,):
        raise ParameterError(f"pi must have length {g.n}, got shape {pi.shape}")
    return pi


def reward_r1(g, pi):
    pi = _pi(g, pi)
    return float(pi @ g.weights)


def _slack(g, pi, k, one_sided):
    s = g.adjacency.astype(np.float64) @ pi - k
    return np.maximum(s, 0.0) if one_sided else s


def penalty_p1(g, pi, k, one_sided=False):
    """Tolerance penalty. ``one_sided=True`` only charges neighbour excess above ``k``."""
    pi = _pi(g, pi)
    s = _slack(g, pi, k, one_sided)
    return float(np.sum((pi * s) ** 2))


def penalty_p2(g, pi, w_gcn):
    pi = _pi(g, pi)
    return float((pi @ g.weights - w_gcn) ** 2)


def cost_and_grad(g, pi, k, betas, one_sided=False):
    """Cost breakdown and ``dC/dpi`` with the greedy weight held fixed.

    Returns
    -------
    breakdown : CostBreakdown
    dcost_dpi : ndarray, shape (n,)
    """
    pi = _pi(g, pi)
    w = g.weights
    w_gcn = set_weight(g, greedy_k_independent_set(g, pi * w, k))

    adj = g.adjacency.astype(np.float64)
    s = _slack(g, pi, k, one_sided)
    r1 = float(pi @ w)
    p1 = float(np.sum((pi * s) ** 2))
    dev = r1 - w_gcn
    p2 = float(dev**2)
    cost = betas.beta1 * p1 + betas.beta2 * p2 - betas.beta3 * r1

    # d/dpi_j of sum_v (pi_v s_v)^2 = 2 pi_j s_j^2 + 2 sum_{u ~ j} pi_u^2 s_u
    # (for the one-sided variant s is clipped at 0, which zeroes both terms there)
    dp1 = 2.0 * pi * s**2 + 2.0 * adj @ (pi**2 * s)
    dp2 = 2.0 * dev * w
    grad = betas.beta1 * dp1 + betas.beta2 * dp2 - betas.beta3 * w
    return CostBreakdown(r1, p1, p2, cost, w_gcn), grad

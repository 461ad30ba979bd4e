# %% [markdown]
# # Queues under Max-Weight style scheduling
#
# Each slot the scheduler treats queue lengths as node weights and serves one
# packet at every scheduled node.

# %%
import numpy as np

from kgcn.graph import WeightedGraph, generate_er
from kgcn.sim import ArrivalProcess, growth_slope, run

triangle = WeightedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], [0.0] * 3)
for rate, k in ((0.3, 0), (0.5, 0), (0.5, 1)):
    rep = run(triangle, k, ArrivalProcess("constant", rate), "greedy", horizon=10_000)
    print(f"triangle, k={k}, load {rate}/node: slope {growth_slope(rep.total_queue):+.3f} packets/slot")

# %% [markdown]
# With k = 0 only one triangle node can transmit, so 3 x 0.5 arrivals outrun
# the single unit of service. With k = 1 two nodes transmit and the queues stay bounded.
#
# On a random graph, compare plain greedy with the exact Max-Weight schedule.

# %%
g = generate_er(10, 0.35, np.random.default_rng(3))
for scheduler in ("greedy", "exact"):
    rep = run(g, 0, ArrivalProcess("bernoulli", 0.22, seed=4), scheduler, horizon=50_000)
    print(f"{scheduler:>6}: mean total queue {rep.mean_queue.sum():8.2f}, max {rep.max_queue:.0f}")

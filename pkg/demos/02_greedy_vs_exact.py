# %% [markdown]
# # Greedy k-independent sets against the exact optimum
#
# A schedule may include a node only if at most `k` of its neighbours are
# also scheduled. On small graphs we can enumerate every subset and see how
# far greedy falls short.

# %%
import numpy as np

from kgcn.graph import WeightedGraph, generate_er
from kgcn.kis import exact_max_weight_kis, greedy_k_independent_set, set_weight

path = WeightedGraph.from_edges(3, [(0, 1), (1, 2)], [0.5, 0.6, 0.4])
g = greedy_k_independent_set(path, path.weights, 0)
e = exact_max_weight_kis(path, 0)
print(f"path graph, k=0: greedy {g.nodes} ({set_weight(path, g):.1f}), "
      f"exact {e.nodes} ({set_weight(path, e):.1f})")

# %% [markdown]
# Over random graphs with 14 nodes, the gap depends on `k`.

# %%
rng = np.random.default_rng(1)
graphs = [generate_er(14, 0.3, rng) for _ in range(100)]
for k in range(5):
    ratios = [set_weight(h, greedy_k_independent_set(h, h.weights, k))
              / set_weight(h, exact_max_weight_kis(h, k)) for h in graphs]
    print(f"k={k}: greedy / optimum = {np.mean(ratios):.4f}  (worst {np.min(ratios):.3f})")

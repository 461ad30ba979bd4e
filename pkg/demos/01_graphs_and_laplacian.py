# %% [markdown]
# # Conflict graphs and the normalized Laplacian
#
# Nodes are wireless links, edges mark links that interfere. Every node
# carries a weight in [0, 1) (later: a queue length).

# %%
import numpy as np

from kgcn.graph import ba_attachments, generate_ba, generate_er, normalized_laplacian

rng = np.random.default_rng(0)
er = generate_er(100, 0.05, rng)
ba = generate_ba(100, ba_attachments(100, 0.05), rng)
print(f"ER: {er.n_edges} edges, mean degree {er.degrees.mean():.2f}")
print(f"BA: {ba.n_edges} edges, max degree {ba.degrees.max()} (hubs)")

# %% [markdown]
# The GCN propagates features with `I - D^-1/2 A D^-1/2`. Its spectrum lies
# in [0, 2]; isolated nodes get an identity row.

# %%
for name, g in (("ER", er), ("BA", ba)):
    eig = np.linalg.eigvalsh(normalized_laplacian(g))
    print(f"{name}: eigenvalues in [{eig.min():.3f}, {eig.max():.3f}]")

isolated = np.flatnonzero(er.degrees == 0)
if isolated.size:
    v = isolated[0]
    print(f"isolated node {v}: row is e_{v} ->", np.flatnonzero(normalized_laplacian(er)[v]))

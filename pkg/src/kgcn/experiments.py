"""
Table-style experiment drivers: a beta sweep at k=0 and a k sweep at fixed
betas, each training one model per row and testing it on every family.
"""

from .eval import evaluate
from .graph import normalized_laplacian
from .loss import Betas
from .train import DatasetSpec, TrainConfig, generate_split, train_model

FIG1_BETAS = [(5, 5, 10), (10, 10, 1), (5, 5, 1), (1, 1, 1), (5, 5, 30), (5, 5, 50),
              (5, 5, 100), (30, 1, 1), (1, 20, 1)]
FIG2_KS = (1, 2, 3, 4)


def load_splits(family, n, counts, seed):
    spec = DatasetSpec(family, n, counts=counts, master_seed=seed)
    return {split: [x[0] for x in generate_split(spec, split)] for split in ("train", "val", "test")}


def _run(rows_spec, families, test_families, n, counts, seed, epochs, log=print):
    data = {f: load_splits(f, n, counts, seed) for f in sorted(set(families) | set(test_families))}
    laps = {f: [normalized_laplacian(g) for g in data[f]["test"]] for f in test_families}
    rows = []
    for train_family in families:
        for k, betas in rows_spec:
            config = TrainConfig(Betas(*betas), k=k, epochs=epochs, seed=seed)
            model, _ = train_model(data[train_family]["train"], data[train_family]["val"], config)
            for test_family in test_families:
                stats = evaluate(model, data[test_family]["test"], k, laps[test_family])
                cfg = {"train_family": train_family, "test_family": test_family, "k": k,
                       "beta1": betas[0], "beta2": betas[1], "beta3": betas[2]}
                rows.append((cfg, stats))
                if log:
                    log(f"train={train_family} test={test_family} k={k} betas={betas} "
                        f"mean={stats.mean:.4f} var={stats.variance:.3e}")
    return rows


def beta_sweep(betas=FIG1_BETAS, families=("ba", "er"), test_families=("er", "ba"),
               n=100, counts=(5000, 50, 500), seed=0, epochs=20, log=print):
    """k = 0 rows over a grid of cost weights."""
    return _run([(0, b) for b in betas], families, test_families, n, counts, seed, epochs, log)


def k_sweep(ks=FIG2_KS, betas=(5, 5, 10), families=("ba", "er"), test_families=("er", "ba"),
            n=100, counts=(5000, 50, 500), seed=0, epochs=20, log=print):
    """Fixed cost weights, one model per tolerance ``k``."""
    return _run([(k, betas) for k in ks], families, test_families, n, counts, seed, epochs, log)


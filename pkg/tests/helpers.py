import numpy as np

from omvcdr.dataset import MultiViewDataset
from omvcdr.solver import SolverState, refresh_cluster_sums


def random_labels(rng, n, k):
    """Labels with every cluster non-empty."""
    labels = rng.integers(0, k, size=n)
    labels[rng.permutation(n)[:k]] = np.arange(k)
    return labels


def random_orthonormal(rng, rows, cols):
    q, r = np.linalg.qr(rng.standard_normal((rows, cols)))
    return q * np.sign(np.diag(r))


def random_problem(seed, n=60, view_dims=(6, 9), dims=(2, 4), k=3, scale=1.0):
    """A dataset plus an arbitrary (not optimized) solver state."""
    rng = np.random.default_rng(seed)
    views = tuple(scale * rng.standard_normal((d, n)) for d in view_dims)
    dataset = MultiViewDataset(views)
    factors = [[random_orthonormal(rng, d_v, d_p) for d_v in view_dims] for d_p in dims]
    offsets = np.concatenate([[0], np.cumsum(dims)])
    zcat = scale * rng.standard_normal((n, offsets[-1]))
    alpha = rng.dirichlet(np.ones(len(dims)))
    state = SolverState(factors, zcat, offsets, random_labels(rng, n, k), k, alpha)
    return dataset, refresh_cluster_sums(state)

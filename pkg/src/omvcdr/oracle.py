"""Slow, literal reference implementations for cross-checking the solver.

Everything here builds dense n x n distance matrices or enumerates
permutations, so each function refuses inputs beyond a small size.
Not used anywhere on the fitting path.
"""

import itertools

import numpy as np

from .solver import Partition

MAX_DENSE_N = 2000
MAX_PERM_K = 6


def _guard_n(n):
    if n > MAX_DENSE_N:
        raise ValueError(f"oracle refuses n={n} > {MAX_DENSE_N}")


def dense_distance_matrix(z):
    """Pairwise squared Euclidean distances between the columns of ``z``."""
    z = np.asarray(z, dtype=np.float64)
    n = z.shape[1]
    _guard_n(n)
    d = np.empty((n, n))
    for i in range(n):
        diff = z - z[:, [i]]
        d[i] = np.sum(diff * diff, axis=0)
    return d


def _one_hot(labels, k):
    y = np.zeros((len(labels), k))
    y[np.arange(len(labels)), labels] = 1.0
    return y


def dense_m(state):
    return sum(a**2 * dense_distance_matrix(z) for a, z in zip(state.alpha, state.embeddings))


def naive_objective(state, dataset, config):
    _guard_n(dataset.n)
    recon = 0.0
    for p, z in enumerate(state.embeddings):
        for h, x in zip(state.factors[p], dataset.views):
            recon += np.linalg.norm(x - h @ z, "fro") ** 2
    y = _one_hot(state.labels, state.k)
    return recon + config.lam / 2 * np.trace(y.T @ dense_m(state) @ y)


def naive_r2(state):
    _guard_n(state.n)
    y = _one_hot(state.labels, state.k)
    return np.array([np.trace(y.T @ dense_distance_matrix(z) @ y) for z in state.embeddings])


def naive_weights(state):
    inv = 1.0 / naive_r2(state)
    return inv / inv.sum()


def naive_partition_step(state, config=None):
    """Reassignment sweep computing ``(m_i^T Y)_c`` from the dense matrix
    ``M = sum_p alpha_p^2 D_p``. Does not modify ``state``."""
    _guard_n(state.n)
    mm = dense_m(state)
    labels = state.labels.copy()
    k = state.k
    counts = np.bincount(labels, minlength=k)
    for i in range(state.n):
        c = labels[i]
        if counts[c] <= 1:
            continue
        counts[c] -= 1
        labels[i] = -1
        scores = [mm[i, labels == cc].sum() for cc in range(k)]
        best = int(np.argmin(scores))
        labels[i] = best
        counts[best] += 1
    return Partition(labels, counts)


def _compositions(total, parts):
    if parts == 1:
        return np.array([[total]])
    if parts == 2:
        first = np.arange(total + 1)
        return np.column_stack([first, total - first])
    blocks = []
    for first in range(total + 1):
        rest = _compositions(total - first, parts - 1)
        blocks.append(np.hstack([np.full((len(rest), 1), first), rest]))
    return np.vstack(blocks)


def simplex_grid_min(r_sq, resolution):
    """Grid search for the simplex point minimizing ``sum_p alpha_p^2 r_p``.

    Returns ``(alpha, value)``.
    """
    r_sq = np.asarray(r_sq, dtype=np.float64)
    if not 0 < resolution <= 0.1:
        raise ValueError("resolution must lie in (0, 0.1]")
    steps = int(round(1.0 / resolution))
    grid = _compositions(steps, len(r_sq)) / steps
    values = (grid**2) @ r_sq
    best = int(np.argmin(values))
    return grid[best], float(values[best])


def exhaustive_accuracy(truth, predicted):
    """Best matching fraction over every bijection of cluster ids."""
    _, t = np.unique(truth, return_inverse=True)
    _, c = np.unique(predicted, return_inverse=True)
    size = max(t.max(), c.max()) + 1
    if size > MAX_PERM_K:
        raise ValueError(f"oracle refuses {size} labels > {MAX_PERM_K}")
    best = 0
    for perm in itertools.permutations(range(size)):
        best = max(best, int(np.sum(np.asarray(perm)[c] == t)))
    return best / len(t)

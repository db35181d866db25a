"""Compiled inner loops.

Everything here is strictly sequential: the Jacobi rotations, the
Gauss-Seidel embedding sweep and the sample reassignment sweep all read
values written earlier in the same pass, so none of it may be vectorized
or parallelized without changing results.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def jacobi_sweeps(u, v, tol, max_sweeps, floor_sq):
    """Orthogonalize the columns of ``u`` in place by one-sided Jacobi.

    Rotations are accumulated into ``v``. Columns whose squared norm is at
    most ``floor_sq`` count as zero and are never rotated. Returns
    ``(sweeps, residual)`` where residual is the largest relative column
    coherence seen in the final sweep.
    """
    rows, cols = u.shape
    residual = 0.0
    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        residual = 0.0
        for p in range(cols - 1):
            for q in range(p + 1, cols):
                alpha = 0.0
                beta = 0.0
                gamma = 0.0
                for r in range(rows):
                    alpha += u[r, p] * u[r, p]
                    beta += u[r, q] * u[r, q]
                    gamma += u[r, p] * u[r, q]
                if alpha <= floor_sq or beta <= floor_sq or gamma == 0.0:
                    continue
                coherence = abs(gamma) / np.sqrt(alpha * beta)
                if coherence > residual:
                    residual = coherence
                if coherence <= tol:
                    continue
                zeta = (beta - alpha) / (2.0 * gamma)
                if zeta >= 0.0:
                    t = 1.0 / (zeta + np.sqrt(1.0 + zeta * zeta))
                else:
                    t = -1.0 / (-zeta + np.sqrt(1.0 + zeta * zeta))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = c * t
                for r in range(rows):
                    up = u[r, p]
                    uq = u[r, q]
                    u[r, p] = c * up - s * uq
                    u[r, q] = s * up + c * uq
                for r in range(cols):
                    vp = v[r, p]
                    vq = v[r, q]
                    v[r, p] = c * vp - s * vq
                    v[r, q] = s * vp + c * vq
        if residual <= tol:
            break
    return sweeps, residual


@njit(cache=True, nogil=True)
def embedding_sweep(zt, at, labels, counts, tsum, vsum, n_views, coef):
    """Gauss-Seidel pass over the columns of one latent space.

    ``zt`` is the (n, d) row view of the embedding (one row per sample),
    ``at`` the matching rows of sum_v H^T X. Cluster sums ``tsum`` (k, d)
    and ``vsum`` (k,) are kept consistent as each row is replaced.
    """
    n, d = zt.shape
    new = np.empty(d)
    for i in range(n):
        c = labels[i]
        denom = n_views + coef * (counts[c] - 1)
        old_sq = 0.0
        new_sq = 0.0
        for j in range(d):
            old = zt[i, j]
            val = (at[i, j] + coef * (tsum[c, j] - old)) / denom
            new[j] = val
            old_sq += old * old
            new_sq += val * val
        for j in range(d):
            tsum[c, j] += new[j] - zt[i, j]
            zt[i, j] = new[j]
        vsum[c] += new_sq - old_sq


@njit(cache=True, nogil=True)
def partition_sweep(zcat, offsets, weights_sq, labels, counts, tsum, vsum):
    """Sequential reassignment of every sample to its cheapest cluster.

    ``zcat`` stacks all latent spaces side by side (n, sum d_p) with space
    ``p`` occupying columns ``offsets[p]:offsets[p + 1]``; ``tsum`` has the
    same column layout and ``vsum`` is (k, m). A sample whose cluster would
    become empty is left in place. Returns the number of samples that moved.
    """
    n = zcat.shape[0]
    k = counts.shape[0]
    m = offsets.shape[0] - 1
    sq = np.empty(m)
    cost = np.empty(k)
    moved = 0
    for i in range(n):
        c = labels[i]
        if counts[c] <= 1:
            continue
        for p in range(m):
            acc = 0.0
            for j in range(offsets[p], offsets[p + 1]):
                acc += zcat[i, j] * zcat[i, j]
            sq[p] = acc
        counts[c] -= 1
        for j in range(zcat.shape[1]):
            tsum[c, j] -= zcat[i, j]
        for p in range(m):
            vsum[c, p] -= sq[p]
        for cc in range(k):
            total = 0.0
            for p in range(m):
                dot = 0.0
                for j in range(offsets[p], offsets[p + 1]):
                    dot += zcat[i, j] * tsum[cc, j]
                total += weights_sq[p] * (
                    counts[cc] * sq[p] - 2.0 * dot + vsum[cc, p]
                )
            cost[cc] = total
        best = 0
        for cc in range(1, k):
            if cost[cc] < cost[best]:
                best = cc
        if best != c:
            moved += 1
        labels[i] = best
        counts[best] += 1
        for j in range(zcat.shape[1]):
            tsum[best, j] += zcat[i, j]
        for p in range(m):
            vsum[best, p] += sq[p]
    return moved

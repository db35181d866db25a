"""Dense linear algebra used by the solver.

Matrices are plain ``float64`` ndarrays. Embeddings are held column-major
(one column per sample) so a sample's latent vector is a contiguous run.
"""

from typing import NamedTuple

import numpy as np

from ._kernels import jacobi_sweeps
from .exceptions import DimensionError, SVDConvergenceError

SVD_TOL = 1e-12
SVD_MAX_SWEEPS = 100


class ThinSvd(NamedTuple):
    left: np.ndarray
    singular_values: np.ndarray
    right: np.ndarray


def as_matrix(a, name="matrix"):
    """Return ``a`` as a finite 2-D float64 array (Fortran order)."""
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise ValueError(f"{name} contains non-finite entries")
    return np.asfortranarray(a)


def matmul(a, b):
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def matmul_at_b(a, b):
    """``a.T @ b`` without materializing the transpose."""
    if a.shape[0] != b.shape[0]:
        raise DimensionError(
            f"row counts differ: {a.shape[0]} vs {b.shape[0]}"
        )
    return a.T @ b


def _complete_columns(q, keep):
    """Replace the columns of ``q`` not flagged in ``keep`` so that all
    columns are orthonormal. Candidates are the standard basis vectors in
    index order, which keeps the completion deterministic."""
    rows, cols = q.shape
    basis = [q[:, j] for j in range(cols) if keep[j]]
    fill = iter(np.flatnonzero(~keep))
    for e in range(rows):
        if len(basis) == cols:
            break
        cand = np.zeros(rows)
        cand[e] = 1.0
        for _ in range(2):
            for b in basis:
                cand -= (b @ cand) * b
        norm = np.linalg.norm(cand)
        if norm > 0.5:
            cand /= norm
            basis.append(cand)
            q[:, next(fill)] = cand
    return q


def thin_svd(b, tol=SVD_TOL, max_sweeps=SVD_MAX_SWEEPS):
    """Thin SVD by one-sided (Hestenes) Jacobi.

    Returns ``ThinSvd(left, singular_values, right)`` with ``left`` of shape
    (rows, r), ``right`` of shape (cols, r) and r = min(rows, cols); the
    singular values are sorted non-increasing. Left singular vectors for
    numerically zero singular values are filled by a deterministic
    orthonormal completion.

    Raises
    ------
    SVDConvergenceError
        If the relative off-diagonal residual is still above ``tol`` after
        ``max_sweeps`` sweeps.
    """
    b = as_matrix(b, "b")
    rows, cols = b.shape
    if rows < cols:
        res = thin_svd(b.T, tol=tol, max_sweeps=max_sweeps)
        return ThinSvd(res.right, res.singular_values, res.left)

    u = np.array(b, order="F", copy=True)
    v = np.eye(cols, order="F")
    eps = np.finfo(np.float64).eps
    floor_sq = (eps * np.linalg.norm(b)) ** 2
    sweeps, residual = jacobi_sweeps(u, v, tol, max_sweeps, floor_sq)
    if residual > tol:
        raise SVDConvergenceError(residual, sweeps)

    sigma = np.sqrt(np.einsum("ij,ij->j", u, u))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    u = u[:, order]
    v = v[:, order]

    cutoff = sigma[0] * max(rows, cols) * np.finfo(float).eps if cols else 0.0
    keep = sigma > cutoff
    left = np.zeros_like(u)
    left[:, keep] = u[:, keep] / sigma[keep]
    if not keep.all():
        left = _complete_columns(left, keep)
    return ThinSvd(np.asfortranarray(left), sigma, np.asfortranarray(v))


def procrustes_factor(b):
    """Orthonormal-column ``H`` maximizing ``trace(H.T @ b)``.

    Returns ``(H, achieved_trace)`` where the trace equals the sum of the
    singular values of ``b``.
    """
    svd = thin_svd(b)
    return svd.left @ svd.right.T, float(svd.singular_values.sum())

"""scikit-learn compatible front end."""

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils import check_array
from sklearn.utils.validation import check_is_fitted

from .dataset import MultiViewDataset, zscore_normalize
from .solver import VARIANTS, SolverConfig, fit


def check_views(Xs):
    """Validate a list of views given sample-major, shape (n_samples, n_features_v).

    Returns a list of float64 arrays. Raises ``ValueError`` when views
    disagree on the number of samples.
    """
    if isinstance(Xs, np.ndarray) and Xs.ndim == 2:
        Xs = [Xs]
    Xs = [check_array(X, dtype=np.float64) for X in Xs]
    if not Xs:
        raise ValueError("at least one view is required")
    n = Xs[0].shape[0]
    for v, X in enumerate(Xs):
        if X.shape[0] != n:
            raise ValueError(f"view {v} has {X.shape[0]} samples, expected {n}")
    return Xs


class OMVCDR(ClusterMixin, BaseEstimator):
    """One-step multi-view clustering with diverse latent representations.

    Each view is factorized into orthonormal bases at several latent
    dimensions; the per-dimension consensus embeddings are weighted
    automatically and a hard partition is learned jointly with them.

    Parameters
    ----------
    n_clusters : int
        Number of clusters k.
    n_spaces : int, default=3
        Number of latent spaces m.
    latent_dims : sequence of int, optional
        Dimension of each latent space. Defaults to ``k, 2k, ..., mk``
        capped at the smallest view dimension.
    lam : float, default=1.0
        Weight of the clustering term relative to reconstruction.
    max_iter : int, default=100
    tol : float, default=1e-6
        Relative change of the objective below which the fit stops.
    variant : {"full", "omvc", "omvcdr2", "equal_alpha"}, default="full"
        ``omvc`` and ``omvcdr2`` keep one or two latent spaces,
        ``equal_alpha`` freezes the space weights at 1/m.
    normalize : bool, default=False
        Z-score every feature before fitting.
    random_state : int, default=0
        Seed of the k-means initialization.

    Attributes
    ----------
    labels_ : ndarray of shape (n_samples,)
    weights_ : ndarray of shape (n_spaces,)
    latent_dims_ : tuple of int
    objective_trace_ : ndarray
        Objective after every iteration.
    n_iter_ : int
    converged_ : bool
    result_ : FitResult
        Full solver output including bases and embeddings.
    """

    def __init__(self, n_clusters=2, n_spaces=3, latent_dims=None, lam=1.0,
                 max_iter=100, tol=1e-6, variant="full", normalize=False,
                 random_state=0):
        self.n_clusters = n_clusters
        self.n_spaces = n_spaces
        self.latent_dims = latent_dims
        self.lam = lam
        self.max_iter = max_iter
        self.tol = tol
        self.variant = variant
        self.normalize = normalize
        self.random_state = random_state

    def _config(self):
        if self.variant not in VARIANTS:
            raise ValueError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        return SolverConfig(
            k=self.n_clusters, m=self.n_spaces,
            latent_dims=None if self.latent_dims is None else tuple(self.latent_dims),
            lam=self.lam, max_iters=self.max_iter, rel_tol=self.tol,
            seed=0 if self.random_state is None else int(self.random_state),
        )

    def fit(self, Xs, y=None):
        """Cluster the samples.

        Parameters
        ----------
        Xs : list of array-like, each of shape (n_samples, n_features_v)
        y : ignored
        """
        config = self._config()
        Xs = check_views(Xs)
        dataset = MultiViewDataset(tuple(X.T for X in Xs))
        if self.normalize:
            dataset = zscore_normalize(dataset)
        result = fit(dataset, config, self.variant)
        self.result_ = result
        self.labels_ = result.labels
        self.weights_ = result.weights
        self.latent_dims_ = result.latent_dims
        self.objective_trace_ = result.objective_trace
        self.n_iter_ = result.iterations_run
        self.converged_ = result.converged
        self.n_views_ = len(Xs)
        return self

    def embedding(self):
        """In-sample consensus embeddings as (n_samples, d_p) arrays."""
        check_is_fitted(self, "result_")
        return [z.T for z in self.result_.embeddings]

"""Alternating optimization for one-step multi-view clustering.

The model learns, for every latent space p (dimension d_p) and view v, an
orthonormal-column basis ``H[p][v]`` (d_v x d_p), a consensus embedding
``Z[p]`` (d_p x n) shared by all views, a hard partition of the n samples
into k clusters, and simplex weights ``alpha`` over the latent spaces, by
minimizing

    sum_p sum_v ||X_v - H[p][v] Z[p]||_F^2
        + lam / 2 * sum_p alpha_p^2 * sum_c sum_{i, j in c} ||z_p^i - z_p^j||^2

Each outer iteration runs four exact block updates (embeddings, bases,
partition, weights), so the objective never increases. The partition and
embedding updates only touch per-cluster sums of embeddings and squared
norms, which keeps an iteration linear in n.
"""

import logging
import time
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
from sklearn.cluster import KMeans

from . import _kernels
from .dataset import concat_views
from .exceptions import KMeansError, MonotonicityError, SolverError
from .linalg import matmul, matmul_at_b, procrustes_factor

logger = logging.getLogger(__name__)

VARIANTS = ("full", "omvc", "omvcdr2", "equal_alpha")
DEGENERATE_R2 = 1e-12
KMEANS_RESEEDS = 10


@dataclass(frozen=True)
class SolverConfig:
    """Hyper-parameters of a fit.

    ``latent_dims`` defaults to ``(k, 2k, ..., mk)``, each capped at the
    smallest view dimension. ``check_steps`` evaluates the objective after
    every sub-step and raises :class:`MonotonicityError` on any increase;
    it roughly doubles the cost of an iteration.
    """

    k: int
    m: int = 3
    latent_dims: tuple | None = None
    lam: float = 1.0
    max_iters: int = 100
    rel_tol: float = 1e-6
    seed: int = 0
    check_steps: bool = False
    refresh_every: int = 10

    def __post_init__(self):
        if self.latent_dims is not None:
            object.__setattr__(
                self, "latent_dims", tuple(int(d) for d in self.latent_dims)
            )
        if int(self.k) != self.k or self.k < 2:
            raise ValueError(f"k must be an integer >= 2, got {self.k}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if not (np.isfinite(self.lam) and self.lam > 0):
            raise ValueError(f"lam must be a positive finite number, got {self.lam}")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.rel_tol < 0:
            raise ValueError("rel_tol must be non-negative")
        if self.latent_dims is not None:
            if len(self.latent_dims) != self.m:
                raise ValueError(
                    f"got {len(self.latent_dims)} latent dims for m={self.m}"
                )
            if min(self.latent_dims) < 1:
                raise ValueError("latent dims must be positive")

    def resolve_dims(self, view_dims):
        """Latent dimensions to use for views of the given sizes."""
        cap = min(view_dims)
        if self.latent_dims is not None:
            if max(self.latent_dims) > cap:
                raise ValueError(
                    f"latent dims {self.latent_dims} exceed the smallest view "
                    f"dimension {cap}"
                )
            return self.latent_dims
        dims = tuple((p + 1) * self.k for p in range(self.m))
        if max(dims) > cap:
            warnings.warn(
                f"latent dims {dims} capped at smallest view dimension {cap}",
                stacklevel=3,
            )
            dims = tuple(min(d, cap) for d in dims)
        return dims

    def for_variant(self, variant):
        """Config with the latent-space count forced by an ablation variant."""
        if variant not in VARIANTS:
            raise ValueError(f"unknown variant {variant!r}; pick one of {VARIANTS}")
        m = {"omvc": 1, "omvcdr2": 2}.get(variant)
        if m is None:
            return self
        dims = None if self.latent_dims is None else self.latent_dims[:m]
        return replace(self, m=m, latent_dims=dims)


@dataclass(frozen=True)
class Partition:
    labels: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_labels(cls, labels, k):
        labels = np.asarray(labels, dtype=np.int64)
        return cls(labels, np.bincount(labels, minlength=k).astype(np.int64))


class SolverState:
    """Mutable optimization state.

    Embeddings of all latent spaces are stored side by side in ``zcat``
    (n x sum d_p, row i holding every latent vector of sample i); space p
    occupies columns ``offsets[p]:offsets[p + 1]``. This is the column-major
    layout of each ``Z[p]``. ``tsum`` (k x sum d_p) and ``vsum`` (k x m)
    hold the per-cluster sums of embeddings and of squared norms.
    """

    def __init__(self, factors, zcat, offsets, labels, k, alpha):
        self.factors = factors
        self.zcat = np.ascontiguousarray(zcat, dtype=np.float64)
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.labels = np.ascontiguousarray(labels, dtype=np.int64)
        self.k = int(k)
        self.alpha = np.asarray(alpha, dtype=np.float64)
        self.counts = np.zeros(self.k, dtype=np.int64)
        self.tsum = np.zeros((self.k, self.zcat.shape[1]))
        self.vsum = np.zeros((self.k, self.m))
        self.degenerate_weights = False
        refresh_cluster_sums(self)

    @property
    def n(self):
        return self.zcat.shape[0]

    @property
    def m(self):
        return len(self.offsets) - 1

    @property
    def dims(self):
        return tuple(int(d) for d in np.diff(self.offsets))

    def space(self, p):
        return slice(self.offsets[p], self.offsets[p + 1])

    @property
    def embeddings(self):
        """``Z[p]`` as (d_p, n) views into the shared buffer."""
        return [self.zcat[:, self.space(p)].T for p in range(self.m)]

    @property
    def cluster_vec_sums(self):
        return [self.tsum[:, self.space(p)] for p in range(self.m)]

    @property
    def cluster_sq_sums(self):
        return [self.vsum[:, p] for p in range(self.m)]

    @property
    def partition(self):
        return Partition(self.labels.copy(), self.counts.copy())

    def copy(self):
        new = object.__new__(SolverState)
        new.factors = [[h.copy() for h in row] for row in self.factors]
        new.zcat = self.zcat.copy()
        new.offsets = self.offsets.copy()
        new.labels = self.labels.copy()
        new.k = self.k
        new.alpha = self.alpha.copy()
        new.counts = self.counts.copy()
        new.tsum = self.tsum.copy()
        new.vsum = self.vsum.copy()
        new.degenerate_weights = self.degenerate_weights
        return new


@dataclass(frozen=True)
class FitResult:
    partition: Partition
    weights: np.ndarray
    factors: list
    embeddings: list
    cluster_vec_sums: list
    cluster_sq_sums: list
    objective_trace: np.ndarray
    iterations_run: int
    converged: bool
    latent_dims: tuple
    variant: str = "full"
    initial_objective: float = np.nan
    degenerate_weights: bool = False
    step_trace: list = field(default_factory=list)
    timings: dict = field(default_factory=dict, compare=False)

    @property
    def labels(self):
        return self.partition.labels


def refresh_cluster_sums(state):
    """Recompute cluster counts and sums exactly from embeddings and labels."""
    k = state.k
    state.counts[:] = np.bincount(state.labels, minlength=k)
    tsum = np.zeros((k, state.zcat.shape[1]))
    np.add.at(tsum, state.labels, state.zcat)
    state.tsum[:] = tsum
    sq = np.empty((state.n, state.m))
    for p in range(state.m):
        block = state.zcat[:, state.space(p)]
        sq[:, p] = np.einsum("ij,ij->i", block, block)
    vsum = np.zeros((k, state.m))
    np.add.at(vsum, state.labels, sq)
    state.vsum[:] = vsum
    return state


def kmeans_lloyd(x, k, seed):
    """Lloyd k-means with k-means++ seeding on the columns of ``x`` (d x n).

    Runs ten seedings derived from ``seed`` and keeps the lowest inertia;
    each run stops at a fixed point or after 300 iterations.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[1]
    if n < k:
        raise KMeansError(f"cannot form {k} clusters from {n} samples")
    with warnings.catch_warnings():
        # duplicate points are handled by the empty-cluster check below
        warnings.simplefilter("ignore")
        km = KMeans(
            n_clusters=k, init="k-means++", n_init=10, max_iter=300,
            tol=0.0, random_state=seed,
        ).fit(x.T)
    return Partition.from_labels(km.labels_, k)


def _initial_partition(x, k, seed):
    for attempt in range(KMEANS_RESEEDS + 1):
        part = kmeans_lloyd(x, k, seed + attempt)
        if part.counts.min() > 0:
            return part
        logger.info("k-means left an empty cluster; reseeding (attempt %d)", attempt + 1)
    raise KMeansError(
        f"k-means produced an empty cluster after {KMEANS_RESEEDS} reseeds"
    )


def _space_projection(state, dataset, p):
    """``A_p = sum_v H[p][v].T @ X_v`` as a (d_p, n) array."""
    acc = None
    for h, x in zip(state.factors[p], dataset.views):
        term = matmul_at_b(h, x)
        acc = term if acc is None else acc + term
    return acc


def init_state(dataset, config):
    """Starting point of the alternating optimization.

    Bases are truncated identities, the partition comes from k-means on the
    stacked views, weights are uniform, and each embedding is ``A_p / V``
    (the closed-form embedding update with the clustering term switched off).
    """
    if dataset.n < config.k:
        raise SolverError(f"n={dataset.n} is smaller than k={config.k}")
    dims = config.resolve_dims(dataset.view_dims)
    factors = [
        [np.asfortranarray(np.eye(d_v, d_p)) for d_v in dataset.view_dims]
        for d_p in dims
    ]
    part = _initial_partition(concat_views(dataset), config.k, config.seed)
    offsets = np.concatenate([[0], np.cumsum(dims)])
    zcat = np.zeros((dataset.n, offsets[-1]))
    m = len(dims)
    state = SolverState(factors, zcat, offsets, part.labels, config.k, np.full(m, 1.0 / m))
    for p in range(m):
        state.zcat[:, state.space(p)] = _space_projection(state, dataset, p).T / dataset.n_views
    return refresh_cluster_sums(state)


def update_embeddings(state, dataset, config):
    """Gauss-Seidel sweep over the embedding columns of every latent space.

    Column i of space p is replaced by the exact minimizer of the objective
    with all other columns fixed,

        z_i = (a_i + c * (t_{c_i} - z_i)) / (V + c * (|A_{c_i}| - 1)),
        c = lam * alpha_p^2,

    and the cluster sums are updated right after each column.
    """
    n_views = float(dataset.n_views)
    for p in range(state.m):
        sl = state.space(p)
        at = np.ascontiguousarray(_space_projection(state, dataset, p).T)
        coef = config.lam * state.alpha[p] ** 2
        _kernels.embedding_sweep(
            state.zcat[:, sl], at, state.labels, state.counts,
            state.tsum[:, sl], state.vsum[:, p], n_views, coef,
        )
    return state


def update_factors(state, dataset):
    """Orthogonal Procrustes update of every basis: ``H = S V^T`` from the
    thin SVD of ``X_v Z_p^T``. Returns the achieved traces, indexed [p][v]."""
    traces = []
    for p, z in enumerate(state.embeddings):
        row = []
        for v, x in enumerate(dataset.views):
            h, tr = procrustes_factor(matmul(x, z.T))
            state.factors[p][v] = np.asfortranarray(h)
            row.append(tr)
        traces.append(row)
    return traces


def update_partition(state, config=None):
    """One sequential reassignment sweep over all samples.

    Each sample is taken out of its cluster and put into the cluster with
    the smallest weighted sum of squared distances to its members,
    ``sum_p alpha_p^2 (|A_c| ||z||^2 - 2 z.t_c + v_c)``, lowest index on
    ties. Samples that are alone in their cluster stay put. Returns the
    number of samples that changed cluster.
    """
    return _kernels.partition_sweep(
        state.zcat, state.offsets, state.alpha ** 2,
        state.labels, state.counts, state.tsum, state.vsum,
    )


def within_cluster_pair_sums(state):
    """``r_p^2 = sum_c sum_{i, j in c} ||z_p^i - z_p^j||^2`` for every space.

    Uses ``sum_{i,j in c} d_ij = 2 |c| sum_{i in c} ||z_i - mean_c||^2``,
    which is linear in n and avoids the cancellation of the raw-moment form.
    """
    k = state.k
    counts = np.bincount(state.labels, minlength=k)
    sums = np.zeros((k, state.zcat.shape[1]))
    np.add.at(sums, state.labels, state.zcat)
    means = sums / np.maximum(counts, 1)[:, None]
    resid = state.zcat - means[state.labels]
    r2 = np.empty(state.m)
    for p in range(state.m):
        block = resid[:, state.space(p)]
        per_sample = np.einsum("ij,ij->i", block, block)
        scatter = np.bincount(state.labels, weights=per_sample, minlength=k)
        r2[p] = 2.0 * float(counts @ scatter)
    return r2


def closed_form_weights(r2):
    """Simplex minimizer of ``sum_p alpha_p^2 r2_p``.

    Returns ``(alpha, degenerate)``; alpha is proportional to ``1 / r2``.
    Spaces with ``r2 < 1e-12`` take all the weight, split evenly, and
    ``degenerate`` is set.
    """
    r2 = np.asarray(r2, dtype=np.float64)
    tiny = r2 < DEGENERATE_R2
    if tiny.any():
        return tiny / tiny.sum(), True
    inv = 1.0 / r2
    return inv / inv.sum(), False


def update_weights(state):
    state.alpha, state.degenerate_weights = closed_form_weights(
        within_cluster_pair_sums(state)
    )
    return state.alpha


def reconstruction_error(state, dataset, block=2048):
    """``sum_p sum_v ||X_v - H[p][v] Z[p]||_F^2``, accumulated over column
    blocks to keep the residual temporaries cache-sized."""
    total = 0.0
    for p, z in enumerate(state.embeddings):
        for h, x in zip(state.factors[p], dataset.views):
            for start in range(0, dataset.n, block):
                cols = slice(start, start + block)
                resid = x[:, cols] - matmul(h, z[:, cols])
                total += float(np.einsum("ij,ij->", resid, resid))
    return total


def clustering_term(state):
    """``Tr(Y^T (sum_p alpha_p^2 D_p) Y)``, without the lam / 2 factor."""
    return float(state.alpha ** 2 @ within_cluster_pair_sums(state))


def objective(state, dataset, config):
    return reconstruction_error(state, dataset) + 0.5 * config.lam * clustering_term(state)


def _slack(value):
    return 1e-8 * (1.0 + abs(value))


def fit(dataset, config, variant="full"):
    """Run the alternating optimization to convergence.

    Stops when the relative change of the objective between consecutive
    iterations drops below ``config.rel_tol`` or after ``config.max_iters``
    iterations. Cluster sums are rebuilt from scratch every
    ``config.refresh_every`` iterations to bound floating-point drift.
    """
    config = config.for_variant(variant)
    if dataset.n < config.k:
        raise SolverError(f"n={dataset.n} is smaller than k={config.k}")
    t0 = time.perf_counter()
    state = init_state(dataset, config)
    t1 = time.perf_counter()
    prev = objective(state, dataset, config)
    initial = prev
    trace = []
    steps = []
    converged = False

    def checkpoint(name, before):
        after = objective(state, dataset, config)
        steps.append((name, after))
        if after > before + _slack(before):
            raise MonotonicityError(name, before, after)
        return after

    it = 0
    for it in range(1, config.max_iters + 1):
        if config.refresh_every and it > 1 and (it - 1) % config.refresh_every == 0:
            refresh_cluster_sums(state)
        cur = prev
        update_embeddings(state, dataset, config)
        if config.check_steps:
            cur = checkpoint("embeddings", cur)
        update_factors(state, dataset)
        if config.check_steps:
            cur = checkpoint("factors", cur)
        update_partition(state, config)
        if config.check_steps:
            cur = checkpoint("partition", cur)
        if variant != "equal_alpha":
            update_weights(state)
            if config.check_steps:
                cur = checkpoint("weights", cur)

        obj = objective(state, dataset, config)
        trace.append(obj)
        if obj > prev + _slack(prev):
            raise MonotonicityError("iteration", prev, obj)
        change = abs(prev - obj) / max(abs(prev), np.finfo(float).tiny)
        logger.debug("iter %d objective %.10g rel change %.3e", it, obj, change)
        prev = obj
        if change < config.rel_tol:
            converged = True
            break

    refresh_cluster_sums(state)
    t2 = time.perf_counter()
    return FitResult(
        partition=state.partition,
        weights=state.alpha.copy(),
        factors=[[h.copy() for h in row] for row in state.factors],
        embeddings=[z.copy() for z in state.embeddings],
        cluster_vec_sums=[t.copy() for t in state.cluster_vec_sums],
        cluster_sq_sums=[v.copy() for v in state.cluster_sq_sums],
        objective_trace=np.asarray(trace),
        iterations_run=it,
        converged=converged,
        latent_dims=state.dims,
        variant=variant,
        initial_objective=initial,
        degenerate_weights=state.degenerate_weights,
        step_trace=steps,
        timings={"init": t1 - t0, "iterations": t2 - t1},
    )

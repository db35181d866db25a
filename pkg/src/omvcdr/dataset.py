"""Multi-view datasets: in-memory container, manifest I/O, synthetic data.

A view is stored feature-major, shape (d_v, n): one column per sample.

On disk a dataset is a TOML manifest next to one headerless CSV per view::

    n = 2000
    views = ["view0.csv", "view1.csv"]
    labels = "labels.csv"        # optional, one 0-based integer per line

Paths are resolved relative to the manifest's directory.
"""

import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .exceptions import (
    ColumnMismatchError,
    DatasetError,
    LabelError,
    ManifestError,
    MissingFileError,
    ParseError,
)

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

ZSCORE_EPS = 1e-12


@dataclass(frozen=True, eq=False)
class MultiViewDataset:
    views: tuple
    labels: np.ndarray | None = None
    name: str = field(default="dataset")

    def __post_init__(self):
        views = tuple(np.asfortranarray(np.asarray(x, dtype=np.float64))
                      for x in self.views)
        if not views:
            raise DatasetError("a dataset needs at least one view")
        n = views[0].shape[1] if views[0].ndim == 2 else 0
        for v, x in enumerate(views):
            if x.ndim != 2 or x.shape[0] < 1:
                raise DatasetError(f"view {v} must be a non-empty 2-D array")
            if x.shape[1] != n:
                raise ColumnMismatchError(v, n, x.shape[1])
            if not np.isfinite(x).all():
                raise DatasetError(f"view {v} contains non-finite entries")
            x.setflags(write=False)
        if n < 1:
            raise DatasetError("a dataset needs at least one sample")
        object.__setattr__(self, "views", views)
        if self.labels is not None:
            labels = _check_labels(np.asarray(self.labels), n)
            labels.setflags(write=False)
            object.__setattr__(self, "labels", labels)

    @property
    def n(self):
        return self.views[0].shape[1]

    @property
    def n_views(self):
        return len(self.views)

    @property
    def view_dims(self):
        return tuple(x.shape[0] for x in self.views)

    @property
    def n_classes(self):
        return None if self.labels is None else int(self.labels.max()) + 1

    def fingerprint(self):
        """SHA-256 over the raw view and label bytes."""
        h = hashlib.sha256()
        for x in self.views:
            h.update(np.asarray(x.shape, dtype=np.int64).tobytes())
            h.update(np.ascontiguousarray(x).tobytes())
        if self.labels is not None:
            h.update(self.labels.astype(np.int64).tobytes())
        return h.hexdigest()

    def __eq__(self, other):
        if not isinstance(other, MultiViewDataset):
            return NotImplemented
        if self.n_views != other.n_views:
            return False
        if (self.labels is None) != (other.labels is None):
            return False
        if self.labels is not None and not np.array_equal(self.labels, other.labels):
            return False
        return all(np.array_equal(a, b) for a, b in zip(self.views, other.views))

    __hash__ = None


def _check_labels(labels, n):
    if labels.ndim != 1 or labels.shape[0] != n:
        raise LabelError(f"expected {n} labels, got shape {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        if not np.all(np.mod(labels, 1) == 0):
            raise LabelError("labels must be integers")
    labels = labels.astype(np.int64)
    bad = np.flatnonzero(labels < 0)
    if bad.size:
        raise LabelError(f"label out of range at row {bad[0]}: {labels[bad[0]]}")
    k = int(labels.max()) + 1
    missing = np.setdiff1d(np.arange(k), labels)
    if missing.size:
        raise LabelError(f"class {missing[0]} has no samples (labels span 0..{k - 1})")
    return labels


def _read_csv(path, source):
    if not path.is_file():
        raise MissingFileError(f"{source}: file not found: {path}")
    try:
        data = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except ValueError:
        # slow path: find the offending cell for the error message
        with open(path, encoding="utf-8") as fh:
            for row, line in enumerate(fh):
                for col, cell in enumerate(line.rstrip("\r\n").split(",")):
                    try:
                        float(cell)
                    except ValueError:
                        raise ParseError(
                            source, row, f"non-numeric cell {cell!r} in column {col}"
                        ) from None
        raise ParseError(source, -1, "ragged rows")
    bad = np.argwhere(~np.isfinite(data))
    if bad.size:
        raise ParseError(source, int(bad[0, 0]), "non-finite value")
    return data


def load_dataset(manifest_path):
    """Read a dataset from a TOML manifest.

    Raises a :class:`DatasetError` subclass naming the offending view or
    row: :class:`MissingFileError`, :class:`ColumnMismatchError`,
    :class:`ParseError` or :class:`LabelError`.
    """
    manifest_path = Path(manifest_path)
    if not manifest_path.is_file():
        raise MissingFileError(f"manifest not found: {manifest_path}")
    try:
        with open(manifest_path, "rb") as fh:
            meta = tomllib.load(fh)
    except (tomllib.TOMLDecodeError, UnicodeDecodeError) as exc:
        raise ManifestError(f"{manifest_path}: {exc}") from None

    views_spec = meta.get("views")
    if not isinstance(views_spec, list) or not views_spec:
        raise ManifestError(f"{manifest_path}: 'views' must be a non-empty list")
    base = manifest_path.parent

    views = []
    for v, rel in enumerate(views_spec):
        x = _read_csv(base / rel, f"view {v} ({rel})")
        views.append(x)

    n = meta.get("n", views[0].shape[1])
    if not isinstance(n, int) or n < 1:
        raise ManifestError(f"{manifest_path}: 'n' must be a positive integer")
    for v, x in enumerate(views):
        if x.shape[1] != n:
            raise ColumnMismatchError(v, n, x.shape[1])

    labels = None
    if "labels" in meta:
        raw = _read_csv(base / meta["labels"], f"labels ({meta['labels']})")
        if raw.shape[1] != 1:
            raise LabelError("labels file must hold one integer per line")
        labels = raw[:, 0]
        if labels.shape[0] != n:
            raise LabelError(f"expected {n} labels, found {labels.shape[0]}")
        frac = np.flatnonzero(np.mod(labels, 1) != 0)
        if frac.size:
            raise LabelError(f"non-integer label at row {frac[0]}")
        labels = labels.astype(np.int64)

    name = str(meta.get("name", manifest_path.stem))
    return MultiViewDataset(tuple(views), labels, name=name)


def save_dataset(dataset, directory, stem="view"):
    """Write ``dataset`` as manifest + CSVs under ``directory``.

    Floats are written with 17 significant digits so a reload is bit-exact.
    Returns the manifest path.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    names = []
    for v, x in enumerate(dataset.views):
        fname = f"{stem}{v}.csv"
        np.savetxt(directory / fname, x, delimiter=",", fmt="%.17g", newline="\n")
        names.append(fname)
    lines = [
        f"name = {json.dumps(dataset.name)}",
        f"n = {dataset.n}",
        "views = [" + ", ".join(json.dumps(s) for s in names) + "]",
    ]
    if dataset.labels is not None:
        np.savetxt(directory / "labels.csv", dataset.labels, fmt="%d", newline="\n")
        lines.append('labels = "labels.csv"')
    manifest = directory / "manifest.toml"
    manifest.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return manifest


def zscore_normalize(dataset):
    """Standardize every feature row of every view to mean 0, population
    std 1. Rows with std below 1e-12 are only mean-centered."""
    views = []
    for x in dataset.views:
        centered = x - x.mean(axis=1, keepdims=True)
        std = np.sqrt(np.mean(centered ** 2, axis=1, keepdims=True))
        safe = np.where(std < ZSCORE_EPS, 1.0, std)
        views.append(centered / safe)
    return MultiViewDataset(tuple(views), dataset.labels, name=dataset.name)


def concat_views(dataset):
    """Stack the views vertically into a (sum d_v, n) matrix."""
    return np.asfortranarray(np.vstack(dataset.views))


@dataclass(frozen=True)
class SyntheticSpec:
    n: int = 500
    k: int = 5
    view_dims: tuple = (20, 30, 40)
    separation: float = 100.0
    noise_sigma: float = 0.01
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "view_dims", tuple(int(d) for d in self.view_dims))
        if self.k < 2:
            raise DatasetError(f"k must be at least 2, got {self.k}")
        if self.n < self.k:
            raise DatasetError(f"n={self.n} is smaller than k={self.k}")
        if not self.view_dims or min(self.view_dims) < 1:
            raise DatasetError("view_dims must be a non-empty list of positive sizes")
        if self.separation < 0:
            raise DatasetError("separation must be non-negative")
        if not self.noise_sigma > 0:
            raise DatasetError("noise_sigma must be positive")


def generate_synthetic(spec):
    """Gaussian blobs seen through several random linear maps.

    The k centroids live in a k-dimensional latent space at pairwise
    distance exactly ``spec.separation`` (a randomly rotated scaled simplex).
    Sample i belongs to cluster ``i % k``. View v is ``W_v @ latent`` plus
    isotropic noise, with ``W_v`` having orthonormal columns when
    ``d_v >= k`` and orthonormal rows otherwise.
    """
    rng = np.random.default_rng(spec.seed)
    k = spec.k
    rot, _ = np.linalg.qr(rng.standard_normal((k, k)))
    centroids = rot @ (np.eye(k) * (spec.separation / np.sqrt(2.0)))
    labels = np.arange(spec.n) % k
    latent = centroids[:, labels]

    views = []
    for d in spec.view_dims:
        q, _ = np.linalg.qr(rng.standard_normal((max(d, k), min(d, k))))
        w = q if d >= k else q.T
        noise = spec.noise_sigma * rng.standard_normal((d, spec.n))
        views.append(w @ latent + noise)
    name = f"synthetic-n{spec.n}-k{k}-s{spec.seed}"
    return MultiViewDataset(tuple(views), labels, name=name)

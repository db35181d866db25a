import numpy as np
import pytest
from sklearn.base import clone

from omvcdr import OMVCDR
from omvcdr.dataset import SyntheticSpec, generate_synthetic
from omvcdr.estimator import check_views
from omvcdr.metrics import accuracy

pytestmark = pytest.mark.filterwarnings("ignore:latent dims")


@pytest.fixture(scope="module")
def blobs():
    ds = generate_synthetic(SyntheticSpec(n=150, k=3, view_dims=(8, 12), seed=1))
    return [x.T for x in ds.views], ds.labels


def test_get_set_params_and_clone():
    est = OMVCDR(n_clusters=4, lam=0.5, variant="omvc")
    params = est.get_params()
    assert params["n_clusters"] == 4 and params["lam"] == 0.5
    twin = clone(est).set_params(lam=2.0)
    assert twin.lam == 2.0 and est.lam == 0.5


def test_fit_predict(blobs):
    Xs, y = blobs
    labels = OMVCDR(n_clusters=3).fit_predict(Xs)
    assert labels.shape == (150,)
    assert accuracy(y, labels) >= 0.99


def test_fitted_attributes(blobs):
    Xs, _ = blobs
    est = OMVCDR(n_clusters=3, max_iter=5, tol=0.0).fit(Xs)
    assert est.n_iter_ == 5 and not est.converged_
    assert est.latent_dims_ == (3, 6, 8)
    assert abs(est.weights_.sum() - 1) < 1e-12
    assert [z.shape for z in est.embedding()] == [(150, 3), (150, 6), (150, 8)]


def test_normalize_flag(blobs):
    Xs, y = blobs
    est = OMVCDR(n_clusters=3, normalize=True).fit(Xs)
    assert accuracy(y, est.labels_) >= 0.99


def test_single_array_is_one_view(blobs):
    Xs, _ = blobs
    est = OMVCDR(n_clusters=3, n_spaces=1).fit(Xs[0])
    assert est.n_views_ == 1


def test_check_views_rejects_mismatch():
    with pytest.raises(ValueError):
        check_views([np.ones((4, 2)), np.ones((5, 2))])
    with pytest.raises(ValueError):
        check_views([np.array([[np.nan, 1.0]])])


def test_bad_variant(blobs):
    with pytest.raises(ValueError):
        OMVCDR(n_clusters=3, variant="nope").fit(blobs[0])

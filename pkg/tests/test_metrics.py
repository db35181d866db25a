import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from omvcdr.metrics import (
    accuracy,
    contingency,
    evaluate,
    fscore,
    hungarian,
    nmi,
    pair_counts,
    purity,
)
from omvcdr.oracle import exhaustive_accuracy


def pairwise_f_by_enumeration(y, c):
    tp = fp = fn = 0
    for i, j in itertools.combinations(range(len(y)), 2):
        same_t, same_p = y[i] == y[j], c[i] == c[j]
        tp += same_t and same_p
        fp += same_p and not same_t
        fn += same_t and not same_p
    p = tp / (tp + fp) if tp + fp else 0.0
    r = tp / (tp + fn) if tp + fn else 0.0
    return (tp, fp, fn), (2 * p * r / (p + r) if p + r else 0.0)


class TestHungarian:
    def test_anti_identity(self):
        match = hungarian([[0, 1], [1, 0]])
        np.testing.assert_array_equal(match, [0, 1])

    def test_permutation_matrix_cost(self):
        perm = np.array([2, 0, 3, 1])
        cost = 1 - np.eye(4)[perm]
        match = hungarian(cost)
        assert cost[np.arange(4), match].sum() == 0

    def test_brute_force_6x6(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            cost = rng.integers(0, 50, (6, 6))
            match = hungarian(cost)
            best = min(cost[np.arange(6), list(p)].sum() for p in itertools.permutations(range(6)))
            assert cost[np.arange(6), match].sum() == best

    def test_rectangular_padded(self):
        match = hungarian([[5, 0, 3]])
        assert len(match) == 3 and match[0] == 1

    def test_non_finite(self):
        with pytest.raises(ValueError):
            hungarian([[0, np.inf], [1, 0]])


class TestAccuracy:
    def test_identical(self):
        assert accuracy([0, 1, 2, 2], [0, 1, 2, 2]) == 1.0

    def test_relabeled(self):
        assert accuracy([0, 0, 1, 2], [7, 7, 3, 5]) == 1.0

    def test_example(self):
        assert accuracy([0, 0, 1, 1], [0, 1, 1, 1]) == 0.75

    def test_more_clusters_than_classes(self):
        assert accuracy([0, 0, 1, 1], [0, 1, 2, 3]) == 0.5

    def test_matches_exhaustive(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            n = rng.integers(5, 40)
            y, c = rng.integers(0, rng.integers(1, 7), n), rng.integers(0, rng.integers(1, 7), n)
            assert accuracy(y, c) == exhaustive_accuracy(y, c)


class TestNmi:
    def test_identical(self):
        assert nmi([0, 0, 1, 2], [0, 0, 1, 2]) == pytest.approx(1.0, abs=1e-15)

    def test_independent(self):
        assert nmi([0, 0, 1, 1], [0, 1, 0, 1]) == 0.0

    def test_hand_computed(self):
        # joint table [[2, 0], [1, 1]] / 4
        pj = {(0, 0): 0.5, (1, 0): 0.25, (1, 1): 0.25}
        py, pc = {0: 0.5, 1: 0.5}, {0: 0.75, 1: 0.25}
        mi = sum(p * math.log2(p / (py[a] * pc[b])) for (a, b), p in pj.items())
        hy = -sum(p * math.log2(p) for p in py.values())
        hc = -sum(p * math.log2(p) for p in pc.values())
        assert nmi([0, 0, 1, 1], [0, 0, 0, 1]) == pytest.approx(mi / max(hy, hc), rel=1e-14)

    def test_both_single_cluster(self):
        assert nmi([3, 3, 3], [1, 1, 1]) == 1.0

    def test_one_single_cluster(self):
        assert nmi([0, 1, 0, 1], [0, 0, 0, 0]) == 0.0


class TestPurity:
    def test_identical(self):
        assert purity([0, 1, 1], [0, 1, 1]) == 1.0

    def test_singletons(self):
        assert purity([0, 0, 1, 1], [0, 1, 2, 3]) == 1.0

    def test_example(self):
        assert purity([0, 0, 1, 1], [0, 1, 1, 1]) == 0.75


class TestFscore:
    def test_identical(self):
        assert fscore([0, 0, 1, 1], [1, 1, 0, 0]) == 1.0

    def test_no_predicted_pairs(self):
        assert fscore([0, 0, 1, 1], [0, 1, 2, 3]) == 0.0

    def test_example(self):
        y, c = [0, 0, 1, 1], [0, 0, 0, 1]
        assert pair_counts(y, c) == (1, 2, 1)
        assert pairwise_f_by_enumeration(y, c) == ((1, 2, 1), pytest.approx(0.4))
        assert fscore(y, c) == pytest.approx(0.4, rel=1e-15)

    def test_matches_enumeration(self):
        rng = np.random.default_rng(2)
        for _ in range(30):
            n = int(rng.integers(2, 300))
            y, c = rng.integers(0, 5, n), rng.integers(0, 7, n)
            counts, f = pairwise_f_by_enumeration(y, c)
            assert pair_counts(y, c) == counts
            assert fscore(y, c) == f


def test_contingency_marginals():
    t = contingency([0, 0, 1, 2, 2, 2], [1, 0, 0, 1, 1, 1])
    assert t.sum() == 6
    np.testing.assert_array_equal(t.sum(axis=1), [2, 1, 3])
    np.testing.assert_array_equal(t.sum(axis=0), [2, 4])


def test_length_mismatch():
    with pytest.raises(ValueError):
        accuracy([0, 1], [0, 1, 1])


labelings = st.integers(2, 60).flatmap(
    lambda n: st.tuples(st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.lists(st.integers(0, 5), min_size=n, max_size=n),
                        st.permutations(range(6)), st.permutations(range(6))))


@settings(max_examples=150, deadline=None)
@given(labelings)
def test_relabeling_invariance_and_range(data):
    y, c, perm_y, perm_c = data
    y, c = np.array(y), np.array(c)
    base = evaluate(y, c)
    moved = evaluate(np.array(perm_y)[y], np.array(perm_c)[c])
    for key in base:
        assert 0.0 <= base[key] <= 1.0
        assert moved[key] == pytest.approx(base[key], abs=1e-12)
    same = evaluate(y, y)
    assert same["acc"] == same["purity"] == 1.0
    assert same["nmi"] == pytest.approx(1.0)
    if len(set(y.tolist())) < len(y):  # all-singleton labelings have no pairs
        assert same["fscore"] == 1.0

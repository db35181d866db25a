"""External clustering quality measures: ACC, NMI, purity and pairwise F."""

import numpy as np
from scipy.optimize import linear_sum_assignment


def _check_pair(truth, predicted):
    truth = np.asarray(truth)
    predicted = np.asarray(predicted)
    if truth.ndim != 1 or truth.shape != predicted.shape:
        raise ValueError(
            f"label vectors must be 1-D and equally long, got {truth.shape} "
            f"and {predicted.shape}"
        )
    if truth.size == 0:
        raise ValueError("label vectors are empty")
    return truth, predicted


def contingency(truth, predicted):
    """Counts table of shape (n_true_classes, n_predicted_clusters).

    Labels are compacted to ``0..K-1`` first so arbitrary integer ids work.
    """
    truth, predicted = _check_pair(truth, predicted)
    _, t = np.unique(truth, return_inverse=True)
    _, c = np.unique(predicted, return_inverse=True)
    table = np.zeros((t.max() + 1, c.max() + 1), dtype=np.int64)
    np.add.at(table, (t, c), 1)
    return table


def hungarian(cost):
    """Minimum-cost perfect matching on a cost matrix.

    Rectangular inputs are padded with zeros to a square. Returns ``col``
    such that row ``i`` is matched to column ``col[i]``.
    """
    cost = np.asarray(cost, dtype=np.float64)
    if cost.ndim != 2:
        raise ValueError("cost must be a 2-D matrix")
    if not np.isfinite(cost).all():
        raise ValueError("cost matrix contains non-finite entries")
    size = max(cost.shape)
    square = np.zeros((size, size))
    square[: cost.shape[0], : cost.shape[1]] = cost
    rows, cols = linear_sum_assignment(square)
    out = np.empty(size, dtype=np.int64)
    out[rows] = cols
    return out


def accuracy(truth, predicted):
    """Fraction of samples correctly labelled under the best one-to-one
    mapping of predicted clusters onto true classes."""
    table = contingency(truth, predicted)
    match = hungarian(-table)
    size = len(match)
    padded = np.zeros((size, size), dtype=np.int64)
    padded[: table.shape[0], : table.shape[1]] = table
    return float(padded[np.arange(size), match].sum() / table.sum())


def _entropy(counts, n):
    p = counts[counts > 0] / n
    return float(-(p * np.log2(p)).sum())


def mutual_information(truth, predicted):
    """Mutual information in bits."""
    table = contingency(truth, predicted)
    n = table.sum()
    pij = table / n
    outer = np.outer(table.sum(axis=1), table.sum(axis=0)) / n**2
    nz = pij > 0
    return float((pij[nz] * np.log2(pij[nz] / outer[nz])).sum())


def nmi(truth, predicted):
    """Mutual information normalized by the larger of the two entropies.

    Two single-cluster labelings score 1.
    """
    table = contingency(truth, predicted)
    n = table.sum()
    h = max(_entropy(table.sum(axis=1), n), _entropy(table.sum(axis=0), n))
    if h == 0.0:
        return 1.0
    mi = mutual_information(truth, predicted)
    return float(np.clip(mi / h, 0.0, 1.0))


def purity(truth, predicted):
    table = contingency(truth, predicted)
    return float(table.max(axis=0).sum() / table.sum())


def pair_counts(truth, predicted):
    """``(tp, fp, fn)`` over unordered sample pairs, from the contingency
    table marginals."""
    table = contingency(truth, predicted)

    def pairs(x):
        return int((x * (x - 1) // 2).sum())

    tp = pairs(table)
    together_pred = pairs(table.sum(axis=0))
    together_true = pairs(table.sum(axis=1))
    return tp, together_pred - tp, together_true - tp


def fscore(truth, predicted):
    """Pair-counting F-measure; 0/0 ratios count as 0."""
    tp, fp, fn = pair_counts(truth, predicted)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def evaluate(truth, predicted):
    """All four scores as a dict keyed ``acc``, ``nmi``, ``purity``, ``fscore``."""
    return {
        "acc": accuracy(truth, predicted),
        "nmi": nmi(truth, predicted),
        "purity": purity(truth, predicted),
        "fscore": fscore(truth, predicted),
    }

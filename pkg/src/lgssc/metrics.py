"""Clustering evaluation on a 0-100 scale: accuracy, NMI and adjusted Rand.

All three metrics are computed from one contingency table. Accuracy uses an
exact optimal assignment between the two label sets (never greedy). NMI is
normalized by sqrt(H(pred) * H(truth)); other normalizations exist, so the
choice is recorded by consumers that serialize results.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, log

import numpy as np
from scipy.optimize import linear_sum_assignment

from .datatypes import check_same_length


@dataclass(frozen=True)
class ContingencyTable:
    """Joint label counts with marginals."""

    counts: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    total: int

    @classmethod
    def from_labels(cls, pred, truth):
        pred = np.asarray(pred)
        truth = np.asarray(truth)
        check_same_length(pred, truth)
        if len(pred) == 0:
            raise ValueError("label vectors must be nonempty")
        _, pi = np.unique(pred, return_inverse=True)
        _, ti = np.unique(truth, return_inverse=True)
        k1 = pi.max() + 1
        k2 = ti.max() + 1
        counts = np.zeros((k1, k2), dtype=np.int64)
        np.add.at(counts, (pi, ti), 1)
        return cls(counts, counts.sum(axis=1), counts.sum(axis=0), int(counts.sum()))


def accuracy(pred, truth):
    """Best-bijection matched fraction, in percent.

    The maximum over label bijections is found by an exact rectangular
    assignment on the contingency table.
    """
    table = ContingencyTable.from_labels(pred, truth)
    r, c = linear_sum_assignment(-table.counts)
    return 100.0 * table.counts[r, c].sum() / table.total


def _entropy(marginals, total):
    probs = marginals[marginals > 0] / total
    return float(-np.sum(probs * np.log(probs)))


def nmi(pred, truth):
    """Mutual information over sqrt(H(pred) * H(truth)), in percent.

    Conventions: 0*log(0) = 0; if either partition has zero entropy the
    score is 100 when the partitions are identical and 0 otherwise.
    """
    table = ContingencyTable.from_labels(pred, truth)
    n = table.total
    h_pred = _entropy(table.row_marginals, n)
    h_truth = _entropy(table.col_marginals, n)
    if h_pred == 0.0 or h_truth == 0.0:
        same = _same_partition(table)
        return 100.0 if same else 0.0
    mi = 0.0
    for i in range(table.counts.shape[0]):
        for j in range(table.counts.shape[1]):
            nij = table.counts[i, j]
            if nij == 0:
                continue
            mi += (nij / n) * log(n * nij / (table.row_marginals[i] * table.col_marginals[j]))
    return 100.0 * mi / np.sqrt(h_pred * h_truth)


def _same_partition(table: ContingencyTable):
    """True when the two labelings induce the same partition of the samples.

    Holds exactly when the table is square with one nonzero per row; every
    observed column label then has exactly one source row as well.
    """
    counts = table.counts
    return (
        counts.shape[0] == counts.shape[1]
        and int(np.count_nonzero(counts)) == counts.shape[0]
        and np.array_equal(counts.max(axis=1), table.row_marginals)
    )


def ari(pred, truth):
    """Adjusted-for-chance Rand index, in percent, computed exactly.

    Uses integer pair counts and rational arithmetic:
    (sum_ij C(n_ij,2) - E) / (0.5*(sum_i C(a_i,2) + sum_j C(b_j,2)) - E)
    with E = sum_i C(a_i,2) * sum_j C(b_j,2) / C(N,2). When the denominator
    vanishes (both partitions trivial the same way), returns 100 for equal
    partitions and 0 otherwise.
    """
    table = ContingencyTable.from_labels(pred, truth)
    n = table.total
    if n < 2:
        return 100.0 if _same_partition(table) else 0.0
    sum_ij = sum(comb(int(v), 2) for v in table.counts.ravel())
    sum_a = sum(comb(int(v), 2) for v in table.row_marginals)
    sum_b = sum(comb(int(v), 2) for v in table.col_marginals)
    expected = Fraction(sum_a * sum_b, comb(n, 2))
    numerator = Fraction(sum_ij) - expected
    denominator = Fraction(sum_a + sum_b, 2) - expected
    if denominator == 0:
        return 100.0 if _same_partition(table) else 0.0
    return float(100 * numerator / denominator)

"""
The entropy-based pruning objective.

``tdac`` scores a pair of classifiers by a weighted sum of their diversity
(normalized variation of information between the two prediction vectors)
and their accuracy (the mean of each one's normalized mutual information
with the true labels). ``tdas`` scores a set as half the sum of ``tdac``
over all ordered pairs in it.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .entropy import as_label_vector, entropy_from_counts, norm_mi, norm_vi
from .errors import InvalidInputError, OracleTooLargeError

__all__ = [
    "DEFAULT_LAMBDA",
    "ORACLE_CAP",
    "EnsemblePredictions",
    "ObjectiveParams",
    "TDACCache",
    "brute_force_optimum",
    "check_subset",
    "tdac",
    "tdas",
    "tdas_decomposed",
    "tdas_pairwise",
]

DEFAULT_LAMBDA = 0.5
ORACLE_CAP = 10**6
_TIE_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class EnsemblePredictions:
    """Predictions of ``n`` classifiers on ``d`` instances plus the true labels.

    ``predictions`` is an ``(n, d)`` integer array, one row per classifier.
    ``n_classes`` defaults to one plus the largest id in rows or labels.
    """

    predictions: np.ndarray
    labels: np.ndarray
    n_classes: int = None

    def __post_init__(self):
        preds = np.asarray(self.predictions)
        if preds.ndim == 1:
            preds = preds[None, :]
        if preds.ndim != 2 or preds.shape[0] < 1 or preds.shape[1] < 1:
            raise InvalidInputError(f"predictions must be a nonempty (n, d) matrix, got shape {preds.shape}")
        if not np.issubdtype(preds.dtype, np.integer):
            if np.all(np.mod(preds, 1) == 0):
                preds = preds.astype(np.int64)
            else:
                raise InvalidInputError("predictions must hold integer class ids")
        labels = as_label_vector(self.labels, "labels")
        if labels.size != preds.shape[1]:
            raise InvalidInputError(
                f"labels have length {labels.size} but predictions have {preds.shape[1]} columns"
            )
        if preds.min() < 0:
            raise InvalidInputError("predictions contain negative class ids")
        largest = int(max(preds.max(), labels.max()))
        nc = largest + 1 if self.n_classes is None else int(self.n_classes)
        if largest >= nc:
            raise InvalidInputError(f"class id {largest} out of range for n_classes={nc}")
        preds = np.ascontiguousarray(preds, dtype=np.int64)
        preds.setflags(write=False)
        labels = np.array(labels, dtype=np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "predictions", preds)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "n_classes", nc)

    @property
    def n(self):
        return self.predictions.shape[0]

    @property
    def d(self):
        return self.predictions.shape[1]

    def take(self, indices):
        """Sub-ensemble made of the given rows, in the given order."""
        idx = np.asarray(indices, dtype=np.int64)
        return EnsemblePredictions(self.predictions[idx], self.labels, self.n_classes)

    def instances(self, columns):
        """Same classifiers restricted to a subset of instances."""
        cols = np.asarray(columns)
        return EnsemblePredictions(self.predictions[:, cols], self.labels[cols], self.n_classes)

    def with_labels(self, labels):
        return EnsemblePredictions(self.predictions, labels, self.n_classes)


@dataclass(frozen=True)
class ObjectiveParams:
    """Trade-off weight ``lam`` (lambda) and target sub-ensemble size ``k``."""

    k: int
    lam: float = DEFAULT_LAMBDA

    def __post_init__(self):
        if not 0.0 <= self.lam <= 1.0:
            raise InvalidInputError(f"lambda must lie in [0, 1], got {self.lam}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidInputError(f"k must be a positive integer, got {self.k}")


def check_subset(ens, subset):
    idx = [int(i) for i in subset]
    if len(set(idx)) != len(idx):
        raise InvalidInputError(f"subset has repeated indices: {idx}")
    for i in idx:
        if not 0 <= i < ens.n:
            raise InvalidInputError(f"classifier index {i} out of range for n={ens.n}")
    return idx


@dataclass(eq=False)
class TDACCache:
    """Lazily memoized pairwise objective terms for one ``(ensemble, lambda)``.

    Row entropies and each row's normalized MI with the labels are computed
    for all rows on first use; pairwise VI values are computed on demand and
    kept. ``computed`` counts the distinct pairs evaluated so far.
    """

    ens: EnsemblePredictions
    lam: float = DEFAULT_LAMBDA
    computed: int = 0
    _row_h: np.ndarray = field(default=None, repr=False)
    _mi: np.ndarray = field(default=None, repr=False)
    _vi: dict = field(default_factory=dict, repr=False)

    def _prepare(self):
        ens = self.ens
        nc = ens.n_classes
        label_h = entropy_from_counts(np.bincount(ens.labels, minlength=nc))
        row_h = np.empty(ens.n)
        mi = np.empty(ens.n)
        for i, row in enumerate(ens.predictions):
            row_h[i] = entropy_from_counts(np.bincount(row, minlength=nc))
            if row_h[i] == 0.0 or label_h == 0.0:
                mi[i] = 0.0
                continue
            h_joint = entropy_from_counts(np.bincount(row * nc + ens.labels, minlength=nc * nc))
            info = max(row_h[i] + label_h - h_joint, 0.0)
            mi[i] = min(info / math.sqrt(row_h[i] * label_h), 1.0)
        self._row_h = row_h
        self._mi = mi

    @property
    def mi(self):
        """Normalized MI of every row with the labels, shape ``(n,)``."""
        if self._mi is None:
            self._prepare()
        return self._mi

    def vi(self, i, j):
        if i == j:
            return 0.0
        key = (i, j) if i < j else (j, i)
        v = self._vi.get(key)
        if v is None:
            if self._row_h is None:
                self._prepare()
            nc = self.ens.n_classes
            x = self.ens.predictions[key[0]]
            y = self.ens.predictions[key[1]]
            h_joint = entropy_from_counts(np.bincount(x * nc + y, minlength=nc * nc))
            if h_joint == 0.0:
                v = 0.0
            else:
                info = max(self._row_h[key[0]] + self._row_h[key[1]] - h_joint, 0.0)
                v = min(max(1.0 - info / h_joint, 0.0), 1.0)
            self._vi[key] = v
            self.computed += 1
        return v

    def tdac(self, i, j):
        if i == j:
            return 0.0
        mi = self.mi
        return self.lam * self.vi(i, j) + (1.0 - self.lam) * (mi[i] + mi[j]) / 2.0

    def tdas(self, subset):
        """Set objective, summed over sorted pairs for order-independent results."""
        idx = sorted(subset)
        total = 0.0
        for a, i in enumerate(idx):
            for j in idx[a + 1:]:
                total += self.tdac(i, j)
        return total


def tdac(ens, i, j, lam=DEFAULT_LAMBDA):
    """Pairwise diversity/accuracy trade-off of classifiers ``i`` and ``j``.

    Zero when ``i == j`` (index equality; two distinct classifiers with
    identical predictions still earn the accuracy term).
    """
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"lambda must lie in [0, 1], got {lam}")
    check_subset(ens, {i, j})
    if i == j:
        return 0.0
    hi, hj = ens.predictions[i], ens.predictions[j]
    acc = (norm_mi(hi, ens.labels) + norm_mi(hj, ens.labels)) / 2.0
    return lam * norm_vi(hi, hj) + (1.0 - lam) * acc


def tdas_pairwise(ens, subset, lam=DEFAULT_LAMBDA):
    """Half the double sum of ``tdac`` over all ordered pairs in ``subset``."""
    idx = check_subset(ens, subset)
    cache = TDACCache(ens, lam)
    return 0.5 * sum(cache.tdac(i, j) for i in idx for j in idx)


def tdas_decomposed(ens, subset, lam=DEFAULT_LAMBDA):
    """Set objective split into a diversity term and an accuracy term.

    ``lam/2 * sum_ij VI(h_i, h_j) + (s-1)/2 * (1-lam) * sum_i MI(h_i, c)``
    where ``s`` is the subset size. Computed straight from the entropy
    kernels, independently of :class:`TDACCache`.
    """
    idx = check_subset(ens, subset)
    if not 0.0 <= lam <= 1.0:
        raise InvalidInputError(f"lambda must lie in [0, 1], got {lam}")
    rows = ens.predictions
    s = len(idx)
    div = sum(norm_vi(rows[i], rows[j]) for i in idx for j in idx)
    acc = sum(norm_mi(rows[i], ens.labels) for i in idx)
    return 0.5 * lam * div + 0.5 * (s - 1) * (1.0 - lam) * acc


def tdas(ens, subset, lam=DEFAULT_LAMBDA, cache=None):
    """Set objective using a (possibly shared) :class:`TDACCache`."""
    idx = check_subset(ens, subset)
    if cache is None:
        cache = TDACCache(ens, lam)
    return cache.tdas(idx)


def brute_force_optimum(ens, params, cap=ORACLE_CAP):
    """Exhaustively find the best ``k``-subset.

    Ties go to the lexicographically smallest index tuple. Raises
    :class:`OracleTooLargeError` when ``C(n, k)`` exceeds ``cap``.

    Returns
    -------
    (tuple of int, float)
    """
    n, k = ens.n, params.k
    if k > n:
        raise InvalidInputError(f"k={k} exceeds ensemble size n={n}")
    count = math.comb(n, k)
    if count > cap:
        raise OracleTooLargeError(f"instance too large for oracle: C({n}, {k}) = {count} > cap {cap}")
    cache = TDACCache(ens, params.lam)
    m = np.array([[cache.tdac(i, j) for j in range(n)] for i in range(n)])
    pairs = list(itertools.combinations(range(k), 2))
    combos = itertools.combinations(range(n), k)
    best, best_val = None, -np.inf
    while True:
        chunk = np.array(list(itertools.islice(combos, 1 << 15)), dtype=np.int64)
        if chunk.size == 0:
            break
        vals = np.zeros(len(chunk))
        for a, b in pairs:
            vals += m[chunk[:, a], chunk[:, b]]
        top = vals.max()
        if best is None or top > best_val + _TIE_TOL * max(1.0, abs(best_val)):
            # combinations arrive in lexicographic order: first near-max wins
            first = int(np.flatnonzero(vals >= top - _TIE_TOL * max(1.0, abs(top)))[0])
            best, best_val = tuple(int(i) for i in chunk[first]), top
    # report the value on the same summation path as every other caller
    return best, cache.tdas(best)

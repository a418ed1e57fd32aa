"""
Data plane: prediction-matrix CSV files, synthetic ensembles, a small
bagging trainer, plurality voting and accuracy.

CSV conventions: comma-separated UTF-8, blank lines and lines starting with
``#`` are ignored, no quoting. A predictions file has one line per
classifier holding ``d`` integer class ids; a labels file has a single
line of ``d`` ids. A dataset file has one instance per line: real feature
values followed by an integer label, with an optional header line.
"""

import os
import tempfile
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ParseError
from .objective import EnsemblePredictions

__all__ = [
    "Dataset",
    "DecisionStump",
    "OneNearestNeighbor",
    "SplitSpec",
    "accuracy",
    "bagging_train",
    "gaussian_blobs",
    "load_dataset",
    "load_predictions",
    "majority_vote",
    "split_indices",
    "synthetic_ensemble",
    "write_predictions",
]


@dataclass(frozen=True, eq=False)
class Dataset:
    features: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        y = np.asarray(self.labels)
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or y.ndim != 1 or X.shape[0] != y.shape[0]:
            raise InvalidInputError(f"features {X.shape} and labels {y.shape} disagree")
        if y.size == 0 or y.min() < 0 or not np.all(np.mod(y, 1) == 0):
            raise InvalidInputError("labels must be nonnegative integer class ids")
        y = y.astype(np.int64)
        if np.unique(y).size < 2:
            raise InvalidInputError("dataset needs at least two classes")
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "labels", y)

    def __len__(self):
        return self.labels.size

    @property
    def n_classes(self):
        return int(self.labels.max()) + 1


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test fractions (summing to 1) and the shuffle seed."""

    train_fraction: float = 0.6
    validation_fraction: float = 0.2
    test_fraction: float = 0.2
    seed: object = None

    def __post_init__(self):
        fr = (self.train_fraction, self.validation_fraction, self.test_fraction)
        if min(fr) <= 0 or abs(sum(fr) - 1.0) > 1e-9:
            raise InvalidInputError(f"split fractions must be positive and sum to 1, got {fr}")


def split_indices(d, spec):
    """Shuffle ``range(d)`` and cut it into train, validation and test index arrays."""
    perm = np.random.default_rng(spec.seed).permutation(d)
    n_val = int(round(d * spec.validation_fraction))
    n_test = int(round(d * spec.test_fraction))
    n_train = d - n_val - n_test
    if min(n_train, n_val, n_test) < 1:
        raise InvalidInputError(f"{d} instances are too few for split {spec}")
    return perm[:n_train], perm[n_train:n_train + n_val], perm[n_train + n_val:]


# ---------------------------------------------------------------- CSV

def _data_lines(path):
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if line and not line.startswith("#"):
                yield lineno, line


def _int_row(path, lineno, line):
    out = []
    for col, cell in enumerate(line.split(","), start=1):
        cell = cell.strip()
        try:
            v = int(cell)
        except ValueError:
            raise ParseError(f"not an integer: {cell!r}", path, lineno, col) from None
        if v < 0:
            raise ParseError(f"negative class id {v}", path, lineno, col)
        out.append(v)
    return out


def load_predictions(predictions_path, labels_path):
    """Read a prediction matrix and its label vector.

    ``n_classes`` is inferred as one plus the largest id in either file;
    ids absent from the data are simply empty classes.
    """
    rows, width = [], None
    for lineno, line in _data_lines(predictions_path):
        row = _int_row(predictions_path, lineno, line)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise ParseError(f"ragged row: {len(row)} fields, expected {width}",
                             predictions_path, lineno)
        rows.append(row)
    if not rows:
        raise ParseError("no prediction rows", predictions_path)

    label_lines = list(_data_lines(labels_path))
    if len(label_lines) != 1:
        raise ParseError(f"expected exactly one label line, found {len(label_lines)}", labels_path)
    lineno, line = label_lines[0]
    labels = _int_row(labels_path, lineno, line)
    if len(labels) != width:
        raise ParseError(f"{len(labels)} labels but prediction rows have {width} fields",
                         labels_path, lineno)
    return EnsemblePredictions(np.array(rows, dtype=np.int64), np.array(labels, dtype=np.int64))


def atomic_write(path, text):
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(os.path.abspath(path)), prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_predictions(ens, predictions_path, labels_path=None):
    """Write ``ens`` in the format read by :func:`load_predictions`."""
    body = "".join(",".join(map(str, row)) + "\n" for row in ens.predictions.tolist())
    atomic_write(predictions_path, body)
    if labels_path is not None:
        atomic_write(labels_path, ",".join(map(str, ens.labels.tolist())) + "\n")


def load_dataset(path):
    """Read a dataset CSV (features then an integer label per line)."""
    X, y, width = [], [], None
    for k, (lineno, line) in enumerate(_data_lines(path)):
        cells = [c.strip() for c in line.split(",")]
        try:
            vals = [float(c) for c in cells[:-1]]
        except ValueError:
            if k == 0:
                continue  # header
            raise ParseError("non-numeric feature value", path, lineno) from None
        try:
            label = int(cells[-1])
        except ValueError:
            if k == 0:
                continue
            raise ParseError(f"label is not an integer: {cells[-1]!r}", path, lineno, len(cells)) from None
        if width is None:
            width = len(vals)
        elif len(vals) != width:
            raise ParseError(f"ragged row: {len(vals)} features, expected {width}", path, lineno)
        X.append(vals)
        y.append(label)
    if not y:
        raise ParseError("no data rows", path)
    return Dataset(np.array(X), np.array(y))


# ---------------------------------------------------------------- voting

def majority_vote(ens, subset):
    """Per-instance plurality label over the rows in ``subset``.

    Ties go to the smallest class id.
    """
    idx = list(subset)
    if not idx:
        raise InvalidInputError("cannot vote with an empty subset")
    rows = ens.predictions[idx]
    counts = np.zeros((ens.n_classes, ens.d), dtype=np.int64)
    cols = np.arange(ens.d)
    for row in rows:
        counts[row, cols] += 1
    return counts.argmax(axis=0)


def accuracy(pred, truth):
    pred = np.asarray(pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape:
        raise InvalidInputError(f"length mismatch: {pred.shape} vs {truth.shape}")
    return float(np.mean(pred == truth))


# ---------------------------------------------------------------- learners

class DecisionStump:
    """Depth-1 threshold tree: best single-feature split by misclassification count.

    If the training labels hold a single class the stump degenerates to a
    constant predictor and ``degenerate`` is set.
    """

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.int64)
        N = y.size
        nc = int(y.max()) + 1
        totals = np.bincount(y, minlength=nc)
        self.degenerate = np.count_nonzero(totals) < 2
        majority = int(np.argmax(totals))
        # (error, feature, threshold, left, right); constant predictor as fallback
        best = (N - totals[majority], 0, np.inf, majority, majority)
        if not self.degenerate:
            onehot = np.eye(nc, dtype=np.int64)
            for j in range(X.shape[1]):
                order = np.argsort(X[:, j], kind="stable")
                xs = X[order, j]
                left = np.cumsum(onehot[y[order]], axis=0)[:-1]
                right = totals - left
                sizes = np.arange(1, N)
                err = (sizes - left.max(axis=1)) + (N - sizes - right.max(axis=1))
                valid = xs[:-1] < xs[1:]
                if not valid.any():
                    continue
                err = np.where(valid, err, N + 1)
                p = int(np.argmin(err))
                if err[p] < best[0]:
                    best = (err[p], j, (xs[p] + xs[p + 1]) / 2.0,
                            int(np.argmax(left[p])), int(np.argmax(right[p])))
        _, self.feature, self.threshold, self.left, self.right = best
        return self

    def predict(self, X):
        X = np.asarray(X, dtype=np.float64)
        return np.where(X[:, self.feature] <= self.threshold, self.left, self.right)


class OneNearestNeighbor:
    """1-NN under Euclidean distance; ties go to the earliest training point."""

    def fit(self, X, y):
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self.degenerate = False
        return self

    def predict(self, X, chunk=256):
        X = np.asarray(X, dtype=np.float64)
        out = np.empty(X.shape[0], dtype=np.int64)
        for s in range(0, X.shape[0], chunk):
            diff = X[s:s + chunk, None, :] - self.X[None, :, :]
            out[s:s + chunk] = self.y[np.argmin((diff * diff).sum(axis=-1), axis=1)]
        return out


BASE_LEARNERS = {"stump": DecisionStump, "one_nn": OneNearestNeighbor}


def bagging_train(data, split, n_estimators, base="stump", seed=None):
    """Train a bagged ensemble and return its predictions on validation and test.

    Each estimator is fit on a bootstrap sample (with replacement, same size
    as the training split).

    Returns
    -------
    (EnsemblePredictions, EnsemblePredictions)
        Predictions on the validation split and on the test split.
    """
    if n_estimators < 1:
        raise InvalidInputError("n_estimators must be >= 1")
    try:
        learner_cls = BASE_LEARNERS[base]
    except KeyError:
        raise InvalidInputError(f"unknown base learner {base!r}; choose from {sorted(BASE_LEARNERS)}") from None
    train, val, test = split_indices(len(data), split)
    X, y = data.features, data.labels
    nc = data.n_classes
    rng = np.random.default_rng(seed)
    val_rows, test_rows, degenerate = [], [], 0
    for _ in range(n_estimators):
        boot = train[rng.integers(0, train.size, size=train.size)]
        model = learner_cls().fit(X[boot], y[boot])
        degenerate += model.degenerate
        val_rows.append(model.predict(X[val]))
        test_rows.append(model.predict(X[test]))
    if degenerate:
        warnings.warn(f"{degenerate} of {n_estimators} bootstrap samples held a single class; "
                      "those estimators predict a constant", RuntimeWarning, stacklevel=2)
    return (EnsemblePredictions(np.array(val_rows), y[val], nc),
            EnsemblePredictions(np.array(test_rows), y[test], nc))


# ---------------------------------------------------------------- generators

def synthetic_ensemble(n, d, n_classes=2, base_accuracy=0.7, correlation=0.0, seed=None):
    """Random ensemble with controllable accuracy and error correlation.

    Labels are uniform over ``n_classes``. For every instance a shared
    outcome is drawn once (correct with probability ``base_accuracy``,
    otherwise a uniformly chosen wrong class). Each classifier reuses the
    shared outcome with probability ``correlation`` and otherwise draws its
    own outcome the same way, so every row has expected accuracy
    ``base_accuracy`` and ``correlation=1`` makes all rows identical.

    ``base_accuracy`` may also be a length-``n`` sequence of per-row values.
    """
    acc = np.broadcast_to(np.asarray(base_accuracy, dtype=np.float64), (n,))
    if n < 1 or d < 1:
        raise InvalidInputError("n and d must be positive")
    if n_classes < 2:
        raise InvalidInputError("n_classes must be >= 2")
    if np.any(acc < 0) or np.any(acc > 1) or not 0 <= correlation <= 1:
        raise InvalidInputError("base_accuracy and correlation must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    labels = rng.integers(n_classes, size=d)
    shared_u = rng.random(d)
    shared_wrong = (labels + rng.integers(1, n_classes, size=d)) % n_classes
    rows = np.empty((n, d), dtype=np.int64)
    for i in range(n):
        use_shared = rng.random(d) < correlation
        own_correct = rng.random(d) < acc[i]
        own_wrong = (labels + rng.integers(1, n_classes, size=d)) % n_classes
        correct = np.where(use_shared, shared_u < acc[i], own_correct)
        wrong = np.where(use_shared, shared_wrong, own_wrong)
        rows[i] = np.where(correct, labels, wrong)
    return EnsemblePredictions(rows, labels, n_classes)


def gaussian_blobs(d, n_features=10, separation=1.0, seed=None):
    """Two isotropic unit-variance Gaussians whose means differ by ``separation`` per feature."""
    rng = np.random.default_rng(seed)
    y = rng.integers(2, size=d)
    X = rng.standard_normal((d, n_features)) + (y[:, None] - 0.5) * separation
    return Dataset(X, y)

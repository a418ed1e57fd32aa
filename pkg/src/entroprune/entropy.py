"""
Discrete entropy kernels over integer label vectors.

All quantities are computed from empirical frequencies of class ids; no
smoothing is applied and zero-count bins contribute nothing. The default
log base is 2 (bits). The normalized quantities ``norm_mi`` and ``norm_vi``
are ratios of entropies and therefore do not depend on the base.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "ContingencyTable",
    "as_label_vector",
    "contingency",
    "entropy",
    "entropy_from_counts",
    "joint_entropy",
    "mutual_information",
    "norm_mi",
    "norm_vi",
]


def as_label_vector(x, name="x"):
    """Validate ``x`` as a 1-D vector of nonnegative integer class ids."""
    arr = np.asarray(x)
    if arr.ndim != 1:
        raise InvalidInputError(f"{name} must be one-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise InvalidInputError(f"{name} is empty")
    if not np.issubdtype(arr.dtype, np.integer):
        if np.issubdtype(arr.dtype, np.floating) and np.all(np.mod(arr, 1) == 0):
            arr = arr.astype(np.int64)
        else:
            raise InvalidInputError(f"{name} must hold integer class ids")
    if arr.min() < 0:
        raise InvalidInputError(f"{name} contains negative class ids")
    return arr.astype(np.int64, copy=False)


def _pair(x, y):
    x = as_label_vector(x, "x")
    y = as_label_vector(y, "y")
    if x.shape != y.shape:
        raise InvalidInputError(f"length mismatch: {x.size} vs {y.size}")
    return x, y


@dataclass(frozen=True)
class ContingencyTable:
    """Co-occurrence counts of two label vectors."""

    joint_counts: np.ndarray
    marginals_x: np.ndarray
    marginals_y: np.ndarray
    total: int


def contingency(x, y, n_classes=None):
    """Build the joint count table of ``x`` against ``y``.

    The table is square with side ``n_classes`` (inferred as one plus the
    largest id present when omitted).
    """
    x, y = _pair(x, y)
    nc = int(max(x.max(), y.max())) + 1 if n_classes is None else int(n_classes)
    if max(x.max(), y.max()) >= nc:
        raise InvalidInputError(f"class id out of range for n_classes={nc}")
    joint = np.bincount(x * nc + y, minlength=nc * nc).reshape(nc, nc)
    return ContingencyTable(joint, joint.sum(axis=1), joint.sum(axis=0), int(x.size))


def entropy_from_counts(counts, base=2.0):
    """Entropy of the empirical distribution given by a count array."""
    counts = np.asarray(counts, dtype=np.float64).ravel()
    total = counts.sum()
    # sorted so the result depends only on the multiset of counts
    p = np.sort(counts[counts > 0]) / total
    h = -np.sum(p * np.log(p))
    if base is not None:
        h /= np.log(base)
    # -0.0 and tiny negatives from a single-bin distribution
    return max(float(h), 0.0)


def entropy(x, base=2.0):
    """Shannon entropy of a label vector.

    Parameters
    ----------
    x : array-like of int
        Class ids, nonempty.
    base : float, optional
        Logarithm base; 2 gives bits. ``None`` uses the natural log.

    Returns
    -------
    float
        ``-sum p(a) log p(a)`` over the empirical frequencies of ``x``.
    """
    x = as_label_vector(x)
    return entropy_from_counts(np.bincount(x), base)


def joint_entropy(x, y, base=2.0):
    """Entropy of the empirical joint distribution of ``(x, y)``."""
    x, y = _pair(x, y)
    ny = int(y.max()) + 1
    return entropy_from_counts(np.bincount(x * ny + y), base)


def mutual_information(x, y, base=2.0):
    """``H(x) + H(y) - H(x, y)``, clamped at zero."""
    x, y = _pair(x, y)
    i = entropy(x, base) + entropy(y, base) - joint_entropy(x, y, base)
    return max(i, 0.0)


def norm_mi(x, y, base=2.0):
    """Normalized mutual information ``I / sqrt(H(x) H(y))``.

    Returns 0 when either vector is constant.
    """
    x, y = _pair(x, y)
    hx = entropy(x, base)
    hy = entropy(y, base)
    if hx == 0.0 or hy == 0.0:
        return 0.0
    i = max(hx + hy - joint_entropy(x, y, base), 0.0)
    return min(i / np.sqrt(hx * hy), 1.0)


def norm_vi(x, y, base=2.0):
    """Normalized variation of information ``1 - I / H(x, y)``.

    Returns 0 when both vectors are constant (zero joint entropy).
    """
    x, y = _pair(x, y)
    hxy = joint_entropy(x, y, base)
    if hxy == 0.0:
        return 0.0
    i = max(entropy(x, base) + entropy(y, base) - hxy, 0.0)
    return min(max(1.0 - i / hxy, 0.0), 1.0)

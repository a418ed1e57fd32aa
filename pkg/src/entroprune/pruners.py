"""
Pruning algorithms.

Every pruner follows one calling convention so the distributed framework
can run it on arbitrary groups of classifiers::

    prune(ens, params, seed=None) -> Selection

``ens`` is an :class:`~entroprune.objective.EnsemblePredictions` whose
labels are the pruning (validation) labels, ``params`` carries ``k`` and
``lam``, and ``seed`` feeds any randomness. A pruner must be deterministic
given these three arguments and must not mutate shared state.
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, InvalidInputError
from .objective import TDACCache

__all__ = [
    "PRUNERS",
    "Selection",
    "cohen_kappa",
    "comep",
    "get_pruner",
    "greedy_eval_count",
    "kappa_pruner",
    "random_pruner",
    "reduce_error_pruner",
    "register_pruner",
]


@dataclass(frozen=True)
class Selection:
    """A pruned sub-ensemble.

    Attributes
    ----------
    indices : tuple of int
        Selected classifier indices in the order they were picked.
    tdas : float
        Set objective of ``indices`` at the ``lam`` the pruner ran with.
    tdac_eval_count : int
        Pairwise terms entering the greedy gain sums (``comep`` only):
        at step ``i`` each of the ``n - i + 1`` candidates is scored by a
        sum of ``i - 1`` terms.
    tdac_computed : int
        Distinct pairwise terms actually computed.
    candidate_evals : int
        Candidate scorings performed by the pruner, whatever its score.
    clamped : bool
        ``k`` exceeded the number of classifiers and was reduced to ``n``.
    """

    indices: tuple
    tdas: float = 0.0
    tdac_eval_count: int = 0
    tdac_computed: int = 0
    candidate_evals: int = 0
    clamped: bool = False

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise InvalidInputError(f"selection has repeated indices: {idx}")
        object.__setattr__(self, "indices", idx)

    def remap(self, mapping):
        """Translate local indices through ``mapping`` (local -> global)."""
        return replace(self, indices=tuple(int(mapping[i]) for i in self.indices))

    @property
    def index_set(self):
        return frozenset(self.indices)


PRUNERS = {}


def register_pruner(name):
    def deco(fn):
        PRUNERS[name] = fn
        fn.plugin_name = name
        return fn
    return deco


def get_pruner(name):
    """Look up a registered pruner; callables pass through unchanged."""
    if callable(name):
        return name
    try:
        return PRUNERS[name]
    except KeyError:
        raise ConfigurationError(
            f"unknown pruner {name!r}; registered: {', '.join(sorted(PRUNERS))}"
        ) from None


def greedy_eval_count(n, k):
    """Closed-form count of pairwise terms scanned by the greedy selector."""
    k = min(k, n)
    return sum((i - 1) * (n - i + 1) for i in range(2, k + 1))


def _effective_k(ens, params):
    if params.k < 1:
        raise InvalidInputError(f"k must be >= 1, got {params.k}")
    if params.k > ens.n:
        return ens.n, True
    return params.k, False


def _first_max(scores, candidates):
    # candidates ascend, so strict '>' keeps the smallest index on ties
    best, best_val = candidates[0], scores[candidates[0]]
    for c in candidates[1:]:
        if scores[c] > best_val:
            best, best_val = c, scores[c]
    return best


@register_pruner("comep")
def comep(ens, params, seed=None, first="best-mi"):
    """Greedy maximization of the set objective.

    Starts from one classifier and repeatedly adds the candidate whose
    summed ``tdac`` to the current selection is largest (smallest index on
    ties). Each candidate's sum is kept in an accumulator that gains one
    term per round.

    Parameters
    ----------
    first : {"best-mi", "random"}
        How to pick the starting classifier: the one with highest
        normalized MI to the labels, or a uniform draw from ``seed``.
    """
    k, clamped = _effective_k(ens, params)
    cache = TDACCache(ens, params.lam)
    if first == "best-mi":
        start = int(np.argmax(cache.mi))
    elif first == "random":
        start = int(np.random.default_rng(seed).integers(ens.n))
    else:
        raise ConfigurationError(f"unknown first-pick rule {first!r}")

    selected = [start]
    remaining = [i for i in range(ens.n) if i != start]
    gains = np.zeros(ens.n)
    term_count = 0
    for step in range(2, k + 1):
        last = selected[-1]
        for c in remaining:
            gains[c] += cache.tdac(c, last)
        term_count += (step - 1) * len(remaining)
        best = _first_max(gains, remaining)
        selected.append(best)
        remaining.remove(best)

    return Selection(
        indices=selected,
        tdas=cache.tdas(selected),
        tdac_eval_count=term_count,
        tdac_computed=cache.computed,
        candidate_evals=sum(ens.n - i + 1 for i in range(2, k + 1)),
        clamped=clamped,
    )


def _vote_counts(rows, n_classes):
    counts = np.zeros((n_classes, rows.shape[-1]), dtype=np.int64)
    cols = np.arange(rows.shape[-1])
    for row in rows:
        counts[row, cols] += 1
    return counts


@register_pruner("reduce-error")
def reduce_error_pruner(ens, params, seed=None, eval_labels=None):
    """Greedy forward selection on plurality-vote accuracy.

    Each round adds the classifier that maximizes the voted accuracy of the
    growing subset against ``eval_labels`` (the ensemble's own labels by
    default). Vote ties go to the smallest class id, candidate ties to the
    smallest index.
    """
    k, clamped = _effective_k(ens, params)
    labels = ens.labels if eval_labels is None else np.asarray(eval_labels)
    if labels.shape != (ens.d,):
        raise InvalidInputError(f"eval_labels must have length {ens.d}")
    rows = ens.predictions
    nc = ens.n_classes
    cols = np.arange(ens.d)
    counts = np.zeros((nc, ens.d), dtype=np.int64)
    selected = []
    remaining = list(range(ens.n))
    evals = 0
    for _ in range(k):
        cand = np.array(remaining)
        trial = np.broadcast_to(counts, (len(cand), nc, ens.d)).copy()
        trial[np.arange(len(cand))[:, None], rows[cand], cols[None, :]] += 1
        voted = trial.argmax(axis=1)
        acc = (voted == labels[None, :]).mean(axis=1)
        evals += len(cand)
        best = int(cand[int(np.argmax(acc))])
        counts[rows[best], cols] += 1
        selected.append(best)
        remaining.remove(best)
    return Selection(
        indices=selected,
        tdas=TDACCache(ens, params.lam).tdas(selected),
        candidate_evals=evals,
        clamped=clamped,
    )


def cohen_kappa(x, y, n_classes=None):
    """Chance-corrected agreement between two label vectors.

    Two constant vectors with the same label agree perfectly (kappa 1).
    """
    x = np.asarray(x)
    y = np.asarray(y)
    nc = int(max(x.max(), y.max())) + 1 if n_classes is None else n_classes
    p_o = float(np.mean(x == y))
    p_e = float(np.dot(np.bincount(x, minlength=nc), np.bincount(y, minlength=nc))) / x.size**2
    if p_e >= 1.0:
        return 1.0 if p_o >= 1.0 else 0.0
    return (p_o - p_e) / (1.0 - p_e)


@register_pruner("kappa")
def kappa_pruner(ens, params, seed=None):
    """Diversity-first greedy selection on pairwise Cohen's kappa.

    Seeds with the pair of lowest kappa (lexicographically smallest pair
    on ties), then adds the candidate whose summed kappa to the current
    selection is smallest.
    """
    k, clamped = _effective_k(ens, params)
    n = ens.n
    kap = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            kap[i, j] = kap[j, i] = cohen_kappa(ens.predictions[i], ens.predictions[j], ens.n_classes)
    evals = n * (n - 1) // 2
    if n == 1:
        selected = [0]
    else:
        iu, ju = np.triu_indices(n, 1)
        p = int(np.argmin(kap[iu, ju]))
        selected = [int(iu[p]), int(ju[p])][:k]
    remaining = [i for i in range(n) if i not in selected]
    score = kap[:, selected].sum(axis=1)
    while len(selected) < k:
        best = _first_max(-score, remaining)
        evals += len(remaining)
        selected.append(best)
        remaining.remove(best)
        score += kap[:, best]
    return Selection(
        indices=selected,
        tdas=TDACCache(ens, params.lam).tdas(selected),
        candidate_evals=evals,
        clamped=clamped,
    )


@register_pruner("random")
def random_pruner(ens, params, seed=None):
    """Uniform ``k``-subset from ``numpy.random.default_rng(seed)``."""
    k, clamped = _effective_k(ens, params)
    picked = np.random.default_rng(seed).choice(ens.n, size=k, replace=False)
    return Selection(
        indices=picked.tolist(),
        tdas=TDACCache(ens, params.lam).tdas(picked.tolist()),
        clamped=clamped,
    )

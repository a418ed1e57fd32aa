"""
Two-round divide-and-conquer pruning.

The ensemble is shuffled and cut into ``m`` balanced groups, each group is
pruned independently (one simulated machine per group), the union of the
group selections is pruned again, and the best of the ``m + 1`` candidate
selections is returned. :func:`epfd` accepts any registered pruner and a
choice of selection criterion; :func:`domep` is the special case that uses
the greedy entropy pruner and the set objective.

Machines are simulated inside one process. Each phase is timed with a
monotonic clock, and ``wall_times["critical_path"]`` is the time an
``m``-machine run would take: partition + slowest group + union + best.
"""

import time
from concurrent.futures import Executor, Future, ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .ensemble_io import accuracy, majority_vote
from .errors import ConfigurationError, InvalidInputError
from .objective import TDACCache
from .pruners import Selection, comep, get_pruner, greedy_eval_count

__all__ = [
    "CRITERIA",
    "DistributedResult",
    "Partition",
    "benchmark_speedup",
    "domep",
    "epfd",
    "partition",
    "partition_sizes",
]

CRITERIA = ("tdas", "accuracy")


@dataclass(frozen=True)
class Partition:
    groups: tuple
    seed: object = None

    @property
    def sizes(self):
        return [len(g) for g in self.groups]


def partition_sizes(n, m):
    """Balanced size profile: ``n mod m`` groups of ``ceil(n/m)``, the rest ``floor(n/m)``."""
    _check_machines(n, m)
    big, small = -(-n // m), n // m
    return [big] * (n % m) + [small] * (m - n % m)


def _check_machines(n, m):
    if int(m) != m or not 1 <= m <= n:
        raise InvalidInputError(f"machine count must satisfy 1 <= m <= n={n}, got {m}")


def partition(n, m, seed=None):
    """Shuffle ``range(n)`` and cut it into ``m`` groups of balanced size.

    Each group is returned sorted, so pruners that break ties by index keep
    preferring the smaller global index.
    """
    _check_machines(n, m)
    sizes = partition_sizes(n, m)
    perm = np.random.default_rng(seed).permutation(n)
    # one lexsort orders every group internally: by group label, then index
    label = np.repeat(np.arange(m), sizes)
    ordered = perm[np.lexsort((perm, label))].tolist()
    groups, start = [], 0
    for size in sizes:
        groups.append(tuple(ordered[start:start + size]))
        start += size
    return Partition(tuple(groups), seed)


@dataclass
class DistributedResult:
    """Outcome of one two-round run.

    ``winner`` is ``"union"`` or ``"group-<i>"``; ``scores`` holds the
    criterion value of every candidate under the same keys.
    """

    final: Selection
    per_group: list
    union_selection: Selection
    winner: str
    scores: dict
    partition: Partition
    criterion: str
    wall_times: dict = field(default_factory=dict)

    @property
    def candidates(self):
        out = {"union": self.union_selection}
        out.update((f"group-{g}", sel) for g, sel in self.per_group)
        return out

    def group_eval_counts(self):
        return [sel.tdac_eval_count for _, sel in self.per_group]


class _Inline(Executor):
    """Runs each task at submit time; the default for ``workers=1``."""

    def submit(self, fn, *args, **kwargs):
        fut = Future()
        try:
            fut.set_result(fn(*args, **kwargs))
        except BaseException as exc:  # noqa: BLE001 - handed to the caller via the future
            fut.set_exception(exc)
        return fut


def _run_group(alg, ens, params, seed):
    t0 = time.perf_counter()
    sel = get_pruner(alg)(ens, params, seed)
    return sel, time.perf_counter() - t0


def _seeds(seed, m):
    children = np.random.SeedSequence(seed).spawn(m + 2)
    return [int(c.generate_state(1)[0]) for c in children]


def epfd(ens, m, alg="comep", params=None, criterion="tdas", seed=None,
         workers=1, executor=None, eval_ens=None):
    """Run any pruner in the two-round distributed scheme.

    Parameters
    ----------
    ens : EnsemblePredictions
        Predictions on the pruning set.
    m : int
        Number of simulated machines (groups), ``1 <= m <= n``.
    alg : str or callable
        Registered pruner name or a callable ``(ens, params, seed)``.
    params : ObjectiveParams
        ``k`` is passed unchanged to every round.
    criterion : {"tdas", "accuracy"}
        How the best candidate is chosen. ``"accuracy"`` scores voted
        accuracy on ``eval_ens`` (defaults to ``ens``).
    seed : int, optional
        Drives the partition and every pruner invocation.
    workers : int
        Width of the thread pool used for the group phase when no
        ``executor`` is given; 1 runs groups one after another.
    executor : concurrent.futures.Executor, optional
        Caller-owned pool (e.g. a ``ProcessPoolExecutor``) for the group
        phase; ``alg`` must then be a registered name or picklable.

    Returns
    -------
    DistributedResult
    """
    t_start = time.perf_counter()
    if params is None:
        raise InvalidInputError("params (k, lambda) are required")
    if criterion not in CRITERIA:
        raise ConfigurationError(f"unknown criterion {criterion!r}; choose from {CRITERIA}")
    get_pruner(alg)  # fail fast on unknown names
    eval_ens = ens if eval_ens is None else eval_ens
    if criterion == "accuracy" and eval_ens.n != ens.n:
        raise InvalidInputError("eval_ens must hold the same classifiers as ens")

    seeds = _seeds(seed, m)
    t0 = time.perf_counter()
    part = partition(ens.n, m, seeds[0])
    t_partition = time.perf_counter() - t0

    own_pool = None
    if executor is None:
        executor = _Inline() if workers <= 1 else ThreadPoolExecutor(max_workers=workers)
        own_pool = executor
    try:
        futures = [
            executor.submit(_run_group, alg, ens.take(group), params, seeds[1 + g])
            for g, group in enumerate(part.groups)
        ]
        # gathered in group order, never arrival order
        outcomes = [f.result() for f in futures]
    finally:
        if own_pool is not None:
            own_pool.shutdown()
    per_group = [(g, sel.remap(part.groups[g])) for g, (sel, _) in enumerate(outcomes)]
    group_times = [dt for _, dt in outcomes]

    t0 = time.perf_counter()
    union_idx = sorted({i for _, sel in per_group for i in sel.indices})
    union_sel, _ = _run_group(alg, ens.take(union_idx), params, seeds[-1])
    union_sel = union_sel.remap(union_idx)
    t_union = time.perf_counter() - t0

    t0 = time.perf_counter()
    candidates = [("union", union_sel)] + [(f"group-{g}", sel) for g, sel in per_group]
    if criterion == "tdas":
        # every candidate lies inside the union; sorted union keeps global pair order
        cache = TDACCache(ens.take(union_idx), params.lam)
        local = {g: i for i, g in enumerate(union_idx)}
        scores = {name: cache.tdas([local[i] for i in sel.indices]) for name, sel in candidates}
    else:
        scores = {
            name: accuracy(majority_vote(eval_ens, sel.indices), eval_ens.labels)
            for name, sel in candidates
        }
    winner = candidates[0][0]
    for name, _ in candidates[1:]:
        if scores[name] > scores[winner]:
            winner = name
    final = dict(candidates)[winner]
    t_best = time.perf_counter() - t0

    wall = {
        "partition": t_partition,
        "groups": group_times,
        "union": t_union,
        "best": t_best,
        "critical_path": t_partition + max(group_times) + t_union + t_best,
        "total": time.perf_counter() - t_start,
    }
    return DistributedResult(final, per_group, union_sel, winner, scores, part, criterion, wall)


def domep(ens, params, m, seed=None, workers=1, executor=None):
    """Distributed greedy entropy pruning: :func:`epfd` with ``comep`` and the set objective."""
    return epfd(ens, m, "comep", params, "tdas", seed, workers, executor)


def benchmark_speedup(ens, params, m_list, repetitions=3, seed=0, workers=1):
    """Compare centralized and distributed greedy pruning.

    For each ``m`` the centralized and the distributed run are timed
    alternately ``repetitions`` times. ``time_s`` is the mean simulated
    ``m``-machine wall time (critical path); ``elapsed_s`` is the mean
    in-process wall time. Eval counts are machine independent:
    ``eval_ratio`` divides the centralized count by the largest group's.

    Returns
    -------
    list of dict
        One row per ``m``.
    """
    if repetitions < 1:
        raise InvalidInputError("repetitions must be >= 1")
    rows = []
    for m in m_list:
        central_times, crit, elapsed = [], [], []
        for r in range(repetitions):
            t0 = time.perf_counter()
            central = comep(ens, params)
            central_times.append(time.perf_counter() - t0)
            res = domep(ens, params, m, seed=seed + r, workers=workers)
            crit.append(res.wall_times["critical_path"])
            elapsed.append(res.wall_times["total"])
        group_evals = res.group_eval_counts()
        union_size = len({i for _, s in res.per_group for i in s.indices})
        t_central = float(np.mean(central_times))
        t_dist = float(np.mean(crit))
        speedup = t_central / t_dist
        rows.append({
            "m": int(m),
            "comep_time_s": t_central,
            "time_s": t_dist,
            "elapsed_s": float(np.mean(elapsed)),
            "speedup": speedup,
            "efficiency": speedup / m,
            "comep_eval_count": central.tdac_eval_count,
            "comep_eval_predicted": greedy_eval_count(ens.n, params.k),
            "eval_count": max(group_evals),
            "group_eval_counts": group_evals,
            "group_eval_predicted": [greedy_eval_count(s, params.k) for s in res.partition.sizes],
            "union_eval_count": res.union_selection.tdac_eval_count,
            "union_eval_predicted": greedy_eval_count(union_size, params.k),
            "eval_ratio": central.tdac_eval_count / max(group_evals) if max(group_evals) else 1.0,
        })
    return rows

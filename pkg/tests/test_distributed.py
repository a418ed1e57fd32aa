import math
from concurrent.futures import Executor, Future

import numpy as np
import pytest

from entroprune import (
    ConfigurationError,
    InvalidInputError,
    ObjectiveParams,
    Selection,
    TDACCache,
    benchmark_speedup,
    brute_force_optimum,
    comep,
    domep,
    epfd,
    greedy_eval_count,
    partition,
    partition_sizes,
    random_pruner,
    synthetic_ensemble,
)
from entroprune.ensemble_io import accuracy, majority_vote
from conftest import random_ensemble


def test_partition_examples():
    assert sorted(partition(10, 3, seed=0).sizes, reverse=True) == [4, 3, 3]
    assert partition(12, 4, seed=0).sizes == [3, 3, 3, 3]
    a = partition(7, 2, seed=42)
    assert sorted(a.sizes) == [3, 4]
    assert a == partition(7, 2, seed=42)
    assert sorted(i for g in a.groups for i in g) == list(range(7))


def test_partition_profile_exhaustive():
    for n in range(1, 201):
        for m in range(1, n + 1):
            sizes = partition_sizes(n, m)
            big, small = math.ceil(n / m), n // m
            assert len(sizes) == m
            assert sum(sizes) == n
            assert sizes.count(big) == (n % m if big != small else m)
            if big != small:
                assert sizes.count(small) == m * big - n


def test_partition_errors():
    for m in (0, 6):
        with pytest.raises(InvalidInputError):
            partition(5, m)


def test_partition_seeds_differ():
    assert partition(20, 3, seed=1).groups != partition(20, 3, seed=2).groups


def test_domep_single_machine_equals_comep(rng):
    for _ in range(10):
        ens = random_ensemble(rng, 12, 60)
        params = ObjectiveParams(k=4)
        res = domep(ens, params, 1, seed=int(rng.integers(1000)))
        central = comep(ens, params)
        assert res.final.index_set == central.index_set
        assert res.final.tdas == pytest.approx(central.tdas, abs=1e-12)


def test_domep_full_set(rng):
    ens = random_ensemble(rng, 7, 40)
    for m in (1, 2, 3, 7):
        assert domep(ens, ObjectiveParams(k=7), m, seed=m).final.index_set == set(range(7))


def test_domep_result_structure(rng):
    ens = random_ensemble(rng, 15, 50)
    res = domep(ens, ObjectiveParams(k=4), 3, seed=9)
    cands = res.candidates
    assert set(cands) == {"union", "group-0", "group-1", "group-2"}
    assert res.final is cands[res.winner]
    assert res.scores[res.winner] == max(res.scores.values())
    for name, sel in cands.items():
        assert res.scores[name] == pytest.approx(TDACCache(ens, 0.5).tdas(sel.indices), abs=1e-12)
    for g, sel in res.per_group:
        assert sel.index_set <= set(res.partition.groups[g])
    union = set().union(*(s.index_set for _, s in res.per_group))
    assert res.union_selection.index_set <= union
    wt = res.wall_times
    assert wt["critical_path"] == pytest.approx(
        wt["partition"] + max(wt["groups"]) + wt["union"] + wt["best"])


def test_best_tie_prefers_union(rng):
    # identity plugin at m=1: union and group-0 are the same set
    ens = random_ensemble(rng, 6, 30)
    res = epfd(ens, 1, _identity, ObjectiveParams(k=3), seed=0)
    assert res.winner == "union"


def test_epfd_equals_domep(rng):
    for s in range(100):
        ens = random_ensemble(rng, int(rng.integers(6, 16)), 40)
        m = int(rng.integers(1, 4))
        params = ObjectiveParams(k=int(rng.integers(1, 5)), lam=float(rng.uniform()))
        a = domep(ens, params, m, seed=s)
        b = epfd(ens, m, "comep", params, "tdas", seed=s)
        assert a.final.index_set == b.final.index_set
        assert a.winner == b.winner


def _identity(ens, params, seed=None):
    return Selection(indices=tuple(range(ens.n)))


def test_identity_plugin_returns_everything(rng):
    ens = random_ensemble(rng, 11, 40)
    res = epfd(ens, 3, _identity, ObjectiveParams(k=2), "tdas", seed=5)
    assert res.final.index_set == set(range(11))
    assert res.winner == "union"


def test_random_plugin_candidates_enumerated(rng):
    ens = random_ensemble(rng, 12, 40)
    params = ObjectiveParams(k=3)
    res = epfd(ens, 2, "random", params, "tdas", seed=21)
    again = epfd(ens, 2, "random", params, "tdas", seed=21)
    assert res.final == again.final and res.partition == again.partition
    # rebuild the three candidates by hand from the recorded partition and seeds
    seeds = np.random.SeedSequence(21).spawn(4)
    seeds = [int(c.generate_state(1)[0]) for c in seeds]
    groups = res.partition.groups
    cands = []
    for g in range(2):
        local = random_pruner(ens.take(groups[g]), params, seeds[1 + g]).indices
        cands.append((f"group-{g}", tuple(groups[g][i] for i in local)))
    union = sorted({i for _, idx in cands for i in idx})
    local = random_pruner(ens.take(union), params, seeds[3]).indices
    cands.insert(0, ("union", tuple(union[i] for i in local)))
    cache = TDACCache(ens, 0.5)
    best_name, best_val = cands[0][0], cache.tdas(cands[0][1])
    for name, idx in cands[1:]:
        if cache.tdas(idx) > best_val:
            best_name, best_val = name, cache.tdas(idx)
    assert res.winner == best_name
    assert res.final.indices == dict(cands)[best_name]


class _ReversedExecutor(Executor):
    """Holds tasks until ``expected`` arrive, then runs them last-first."""

    def __init__(self, expected):
        self.expected = expected
        self.pending = []

    def submit(self, fn, *args, **kwargs):
        fut = Future()
        self.pending.append((fut, fn, args, kwargs))
        if len(self.pending) == self.expected:
            for f, g, a, kw in reversed(self.pending):
                f.set_result(g(*a, **kw))
        return fut


def test_group_order_independence(rng):
    ens = random_ensemble(rng, 20, 60)
    params = ObjectiveParams(k=4)
    base = domep(ens, params, 4, seed=3)
    other = epfd(ens, 4, "comep", params, "tdas", seed=3, executor=_ReversedExecutor(4))
    assert other.final == base.final
    assert [s for _, s in other.per_group] == [s for _, s in base.per_group]


def test_thread_pool_matches_inline(rng):
    ens = random_ensemble(rng, 20, 60)
    params = ObjectiveParams(k=4)
    a = domep(ens, params, 3, seed=8, workers=1)
    b = domep(ens, params, 3, seed=8, workers=3)
    assert a.final == b.final and a.scores == b.scores


def test_determinism(rng):
    ens = random_ensemble(rng, 25, 50, 3)
    for alg in ("comep", "reduce-error", "kappa", "random"):
        a = epfd(ens, 3, alg, ObjectiveParams(k=5), "accuracy", seed=2)
        b = epfd(ens, 3, alg, ObjectiveParams(k=5), "accuracy", seed=2)
        assert (a.final, a.per_group, a.union_selection, a.winner, a.scores, a.partition) == \
               (b.final, b.per_group, b.union_selection, b.winner, b.scores, b.partition)


def test_accuracy_criterion_uses_eval_set(rng):
    ens = random_ensemble(rng, 12, 40)
    held = random_ensemble(rng, 12, 30)
    res = epfd(ens, 2, "comep", ObjectiveParams(k=3), "accuracy", seed=1, eval_ens=held)
    for name, sel in res.candidates.items():
        assert res.scores[name] == accuracy(majority_vote(held, sel.indices), held.labels)
    with pytest.raises(InvalidInputError):
        epfd(ens, 2, "comep", ObjectiveParams(k=3), "accuracy", eval_ens=random_ensemble(rng, 5, 30))


def test_epfd_configuration_errors(rng):
    ens = random_ensemble(rng, 6, 20)
    with pytest.raises(ConfigurationError):
        epfd(ens, 2, "nope", ObjectiveParams(k=2))
    with pytest.raises(ConfigurationError):
        epfd(ens, 2, "comep", ObjectiveParams(k=2), criterion="speed")
    with pytest.raises(InvalidInputError):
        epfd(ens, 7, "comep", ObjectiveParams(k=2))


def test_domep_quarter_approximation(rng):
    for _ in range(60):
        n = int(rng.integers(4, 13))
        k = int(rng.integers(2, min(4, n) + 1))
        ens = random_ensemble(rng, n, 50)
        params = ObjectiveParams(k=k)
        _, opt = brute_force_optimum(ens, params)
        for m in (2, 3):
            res = domep(ens, params, m, seed=int(rng.integers(1000)))
            assert res.scores[res.winner] >= 0.25 * opt - 1e-12


def test_benchmark_counts():
    ens = synthetic_ensemble(60, 300, correlation=0.3, seed=0)
    rows = benchmark_speedup(ens, ObjectiveParams(k=6), [1, 2, 3], repetitions=1)
    by_m = {r["m"]: r for r in rows}
    assert by_m[1]["eval_ratio"] == 1.0
    assert by_m[2]["comep_eval_count"] == 845
    assert by_m[2]["group_eval_counts"] == [395, 395]
    assert by_m[2]["eval_count"] < by_m[2]["comep_eval_count"]
    for r in rows:
        assert r["comep_eval_count"] == r["comep_eval_predicted"]
        assert r["group_eval_counts"] == r["group_eval_predicted"]
        assert r["union_eval_count"] == r["union_eval_predicted"]
        assert r["efficiency"] == pytest.approx(r["speedup"] / r["m"])
    assert greedy_eval_count(60, 6) == 845
    with pytest.raises(InvalidInputError):
        benchmark_speedup(ens, ObjectiveParams(k=6), [2], repetitions=0)

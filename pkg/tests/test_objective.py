import itertools

import numpy as np
import pytest

from entroprune import (
    EnsemblePredictions,
    InvalidInputError,
    ObjectiveParams,
    OracleTooLargeError,
    TDACCache,
    brute_force_optimum,
    norm_mi,
    norm_vi,
    tdac,
    tdas,
    tdas_decomposed,
    tdas_pairwise,
)
from conftest import random_ensemble


def test_tdac_diagonal_is_zero(rng):
    ens = random_ensemble(rng, 4, 30)
    for lam in (0.0, 0.5, 1.0):
        for i in range(4):
            assert tdac(ens, i, i, lam) == 0.0


def test_tdac_lambda_one_is_vi():
    ens = EnsemblePredictions([[0, 0, 1, 1], [0, 1, 0, 1]], [0, 0, 1, 1])
    assert tdac(ens, 0, 1, 1.0) == pytest.approx(1.0)


def test_tdac_worked_example():
    # 0.5 * 0.79248 + 0.5 * (1 + 0.34560) / 2
    ens = EnsemblePredictions([[0, 0, 1, 1], [0, 0, 1, 0]], [0, 0, 1, 1])
    assert tdac(ens, 0, 1, 0.5) == pytest.approx(0.73264, abs=1e-5)
    assert tdac(ens, 1, 0, 0.5) == tdac(ens, 0, 1, 0.5)


def test_identical_rows_keep_accuracy_reward():
    # distinct indices with equal predictions still earn the MI term
    ens = EnsemblePredictions([[0, 0, 1, 1], [0, 0, 1, 1]], [0, 0, 1, 1])
    assert tdac(ens, 0, 1, 0.5) == pytest.approx(0.5)


def test_tdac_index_out_of_range(rng):
    ens = random_ensemble(rng, 3, 10)
    with pytest.raises(InvalidInputError):
        tdac(ens, 0, 3)


def test_cache_matches_functional_tdac(rng):
    ens = random_ensemble(rng, 6, 80, 3)
    cache = TDACCache(ens, 0.3)
    for i, j in itertools.product(range(6), repeat=2):
        assert cache.tdac(i, j) == pytest.approx(tdac(ens, i, j, 0.3), abs=1e-12)


def test_tdas_small_cases(rng):
    ens = random_ensemble(rng, 5, 50)
    assert tdas(ens, [2]) == 0.0
    assert tdas_decomposed(ens, [2]) == 0.0
    assert tdas(ens, [1, 3]) == pytest.approx(tdac(ens, 1, 3))
    expected = tdac(ens, 0, 2) + tdac(ens, 0, 4) + tdac(ens, 2, 4)
    assert tdas(ens, [4, 0, 2]) == pytest.approx(expected, abs=1e-12)


def test_tdas_lambda_zero_is_scaled_mi_sum(rng):
    ens = random_ensemble(rng, 7, 60)
    subset = [0, 3, 5, 6]
    mi = sum(norm_mi(ens.predictions[i], ens.labels) for i in subset)
    assert tdas(ens, subset, 0.0) == pytest.approx((len(subset) - 1) / 2 * mi, abs=1e-12)


def test_decomposition_on_8x100(rng):
    ens = random_ensemble(rng, 8, 100)
    subset = rng.choice(8, size=5, replace=False)
    assert tdas_decomposed(ens, subset, 0.5) == pytest.approx(tdas_pairwise(ens, subset, 0.5), abs=1e-9)


def test_decomposition_is_independent_of_cache(rng):
    # the decomposed route never touches TDACCache
    ens = random_ensemble(rng, 5, 40)
    sub = [0, 1, 4]
    vi = sum(norm_vi(ens.predictions[a], ens.predictions[b]) for a, b in itertools.combinations(sub, 2))
    mi = sum(norm_mi(ens.predictions[a], ens.labels) for a in sub)
    assert tdas_decomposed(ens, sub, 0.4) == pytest.approx(0.4 * vi + 0.6 * mi, abs=1e-12)


def test_repeated_subset_rejected(rng):
    ens = random_ensemble(rng, 5, 40)
    with pytest.raises(InvalidInputError):
        tdas(ens, [1, 1])
    with pytest.raises(InvalidInputError):
        tdas(ens, [0, 7])


def test_params_validation():
    with pytest.raises(InvalidInputError):
        ObjectiveParams(k=0)
    with pytest.raises(InvalidInputError):
        ObjectiveParams(k=2, lam=1.5)
    assert ObjectiveParams(k=3).lam == 0.5


def test_ensemble_validation():
    with pytest.raises(InvalidInputError):
        EnsemblePredictions([[0, 1], [1, 0]], [0, 1, 1])
    with pytest.raises(InvalidInputError):
        EnsemblePredictions([[0, -1]], [0, 1])
    with pytest.raises(InvalidInputError):
        EnsemblePredictions([[0, 2]], [0, 1], n_classes=2)
    ens = EnsemblePredictions([[0, 1]], [0, 1])
    with pytest.raises(ValueError):
        ens.predictions[0, 0] = 1


def test_tdac_is_a_metric_on_distinct_triples(rng):
    for _ in range(30):
        ens = random_ensemble(rng, 6, int(rng.integers(5, 60)), int(rng.integers(2, 4)))
        lam = float(rng.uniform())
        c = TDACCache(ens, lam)
        for i, j, l in itertools.permutations(range(6), 3):
            assert c.tdac(i, j) + c.tdac(j, l) >= c.tdac(i, l) - 1e-9


def test_superset_growth(rng):
    for _ in range(50):
        ens = random_ensemble(rng, 8, 40)
        lam = float(rng.uniform())
        s = list(rng.choice(8, size=4, replace=False))
        x = next(i for i in range(8) if i not in s)
        assert tdas(ens, s + [x], lam) >= tdas(ens, s, lam)


def test_lambda_zero_monotone_in_member_mi(rng):
    labels = rng.integers(0, 2, size=200)
    for _ in range(20):
        preds = rng.integers(0, 2, size=(4, 200))
        preds[1] = np.where(rng.random(200) < 0.6, labels, 1 - labels)
        better = preds.copy()
        flip = np.flatnonzero(better[1] != labels)[:10]
        better[1, flip] = labels[flip]
        a = EnsemblePredictions(preds, labels)
        b = EnsemblePredictions(better, labels)
        assert norm_mi(better[1], labels) > norm_mi(preds[1], labels)
        assert tdas(b, [0, 1, 2], 0.0) > tdas(a, [0, 1, 2], 0.0)


def _enumerate(ens, k, lam):
    # independent re-enumeration straight from the functional tdac
    best, arg = -1.0, None
    for combo in itertools.combinations(range(ens.n), k):
        v = sum(tdac(ens, a, b, lam) for a, b in itertools.combinations(combo, 2))
        if v > best + 1e-12:
            best, arg = v, combo
    return arg, best


def test_brute_force_matches_reenumeration(rng):
    for _ in range(10):
        ens = random_ensemble(rng, 6, 40)
        subset, value = brute_force_optimum(ens, ObjectiveParams(k=3, lam=0.5))
        ref_subset, ref_value = _enumerate(ens, 3, 0.5)
        assert value == pytest.approx(ref_value, abs=1e-12)
        assert subset == ref_subset


def test_brute_force_trivial_cases(rng):
    ens = random_ensemble(rng, 5, 30)
    assert brute_force_optimum(ens, ObjectiveParams(k=5))[0] == (0, 1, 2, 3, 4)
    assert brute_force_optimum(ens, ObjectiveParams(k=1)) == ((0,), 0.0)


def test_brute_force_cap(rng):
    ens = random_ensemble(rng, 30, 10)
    with pytest.raises(OracleTooLargeError, match="instance too large for oracle"):
        brute_force_optimum(ens, ObjectiveParams(k=10))

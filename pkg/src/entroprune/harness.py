"""
Experiment drivers behind the command-line interface.

Each function takes already-loaded prediction matrices and returns plain
dicts or lists of dicts, ready to be serialized as a report.
"""

import itertools
import math

import numpy as np

from .distributed import domep, epfd
from .ensemble_io import accuracy, majority_vote, synthetic_ensemble
from .errors import ConfigurationError, InvalidInputError, OracleTooLargeError
from .objective import ORACLE_CAP, ObjectiveParams, TDACCache, brute_force_optimum
from .pruners import PRUNERS, comep, get_pruner

__all__ = [
    "DEFAULT_K_GRID",
    "DEFAULT_LAMBDA_GRID",
    "oracle_compare",
    "oracle_sweep",
    "parse_algo",
    "run_prune",
    "sweep_lambda",
    "validate_objective",
]

DEFAULT_LAMBDA_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)
DEFAULT_K_GRID = (3, 5, 7, 9)


def parse_algo(algo):
    """Split an ``--algo`` value into ``(pruner name, forced_distributed)``.

    ``"domep"`` and ``"epfd:<name>"`` force the two-round scheme even with
    one machine; a plain registered name runs centralized when ``m == 1``.
    """
    if algo == "domep":
        return "comep", True
    if algo.startswith("epfd:"):
        name = algo.split(":", 1)[1]
        get_pruner(name)
        return name, True
    if algo not in PRUNERS:
        raise ConfigurationError(
            f"unknown algo {algo!r}; use one of {sorted(PRUNERS)}, 'domep' or 'epfd:<name>'"
        )
    return algo, False


def _voted(ens, indices):
    if ens is None:
        return None
    return accuracy(majority_vote(ens, indices), ens.labels)


def run_prune(val, test, params, algo="comep", machines=1, criterion="tdas",
              seed=None, workers=None):
    """Prune on ``val`` and score the selection on both matrices."""
    name, forced = parse_algo(algo)
    if algo == "domep":
        criterion = "tdas"
    out = {}
    if machines == 1 and not forced:
        sel = get_pruner(name)(val, params, seed)
        out["wall_times"] = None
        out["distributed"] = None
    else:
        res = epfd(val, machines, name, params, criterion, seed,
                   workers=machines if workers is None else workers)
        sel = res.final
        out["wall_times"] = res.wall_times
        out["distributed"] = {
            "winner": res.winner,
            "criterion": res.criterion,
            "scores": res.scores,
            "groups": [
                {"group": g, "members": list(res.partition.groups[g]),
                 "selected": list(s.indices), "tdac_eval_count": s.tdac_eval_count,
                 "candidate_evals": s.candidate_evals}
                for g, s in res.per_group
            ],
            "union": {"selected": list(res.union_selection.indices),
                      "tdac_eval_count": res.union_selection.tdac_eval_count,
                      "candidate_evals": res.union_selection.candidate_evals},
        }
    out.update(
        selected=list(sel.indices),
        tdas=TDACCache(val, params.lam).tdas(sel.indices),
        validation_accuracy=_voted(val, sel.indices),
        test_accuracy=_voted(test, sel.indices),
        tdac_eval_count=sel.tdac_eval_count,
        candidate_evals=sel.candidate_evals,
        clamped=sel.clamped,
    )
    return out


def sweep_lambda(val, test, lambda_grid=DEFAULT_LAMBDA_GRID, k_grid=DEFAULT_K_GRID,
                 machines=1, seed=None):
    """Greedy pruning over a ``(lambda, k)`` grid; one row per grid point."""
    if not lambda_grid or not k_grid:
        raise InvalidInputError("lambda and k grids must be nonempty")
    rows = []
    for lam in lambda_grid:
        for k in k_grid:
            params = ObjectiveParams(k=k, lam=lam)
            sel = comep(val, params) if machines == 1 else domep(val, params, machines, seed).final
            rows.append({
                "lambda": lam,
                "k": k,
                "selected": list(sel.indices),
                "tdas": sel.tdas,
                "validation_accuracy": _voted(val, sel.indices),
                "test_accuracy": _voted(test, sel.indices),
                "clamped": k > val.n,
            })
    return rows


def _pearson(x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2 or np.ptp(x) == 0 or np.ptp(y) == 0:
        return float("nan")
    return float(np.corrcoef(x, y)[0, 1])


def validate_objective(val, eval_ens=None, combo_size=3, lam=0.5, cap=ORACLE_CAP):
    """Score every ``combo_size``-subset by objective and by voted accuracy.

    The objective is measured on ``val``; accuracy on ``eval_ens`` (``val``
    itself when omitted). ``pearson`` and ``slope`` are NaN when either
    column is constant.
    """
    eval_ens = val if eval_ens is None else eval_ens
    if not 1 <= combo_size <= val.n:
        raise InvalidInputError(f"combo size must lie in [1, {val.n}]")
    count = math.comb(val.n, combo_size)
    if count > cap:
        raise OracleTooLargeError(f"instance too large for oracle: C({val.n}, {combo_size}) = {count} > cap {cap}")
    cache = TDACCache(val, lam)
    rows = []
    for combo in itertools.combinations(range(val.n), combo_size):
        rows.append({
            "subset": list(combo),
            "tdas": cache.tdas(combo),
            "accuracy": _voted(eval_ens, combo),
        })
    t = [r["tdas"] for r in rows]
    a = [r["accuracy"] for r in rows]
    r = _pearson(t, a)
    slope = float(np.polyfit(t, a, 1)[0]) if not math.isnan(r) else float("nan")
    return {"rows": rows, "pearson": r, "slope": slope}


def oracle_compare(ens, params, machines=(2, 3), seed=None, cap=ORACLE_CAP):
    """Greedy and distributed objective values against the exhaustive optimum."""
    best_set, best = brute_force_optimum(ens, params, cap)
    greedy = comep(ens, params)
    out = {
        "optimum": best,
        "optimum_subset": list(best_set),
        "comep_tdas": greedy.tdas,
        "comep_ratio": _ratio(greedy.tdas, best),
        "domep": [],
    }
    for m in machines:
        if m > ens.n:
            continue
        res = domep(ens, params, m, seed)
        value = res.scores[res.winner]
        out["domep"].append({"m": m, "tdas": value, "ratio": _ratio(value, best)})
    return out


def _ratio(value, optimum):
    # an optimum of 0 is matched by anything
    return 1.0 if optimum == 0 else value / optimum


def oracle_sweep(instances=200, max_n=12, max_k=5, lam=0.5, machines=(2, 3),
                 d=200, seed=0):
    """Random small instances checked against the exhaustive optimum.

    Returns per-instance rows plus the minimum greedy and distributed ratios.
    """
    rng = np.random.default_rng(seed)
    rows = []
    for t in range(instances):
        n = int(rng.integers(max(max(machines), 4), max_n + 1))
        k = int(rng.integers(2, min(max_k, n) + 1))
        ens = synthetic_ensemble(
            n, d, n_classes=int(rng.integers(2, 4)),
            base_accuracy=rng.uniform(0.4, 0.95, size=n),
            correlation=float(rng.uniform(0, 0.8)),
            seed=int(rng.integers(2**31)),
        )
        cmp = oracle_compare(ens, ObjectiveParams(k=k, lam=lam), machines, seed=t)
        rows.append({"instance": t, "n": n, "k": k, **cmp})
    return {
        "rows": rows,
        "min_comep_ratio": min(r["comep_ratio"] for r in rows),
        "min_domep_ratio": min(d["ratio"] for r in rows for d in r["domep"]),
    }

"""
Any pruner in the distributed framework
=======================================

``epfd`` runs the same two-round scheme around any function with the
signature ``prune(ens, params, seed) -> Selection``. Four pruners ship
registered by name; new ones are added with ``register_pruner``.
"""

import numpy as np

from entroprune import PRUNERS, ObjectiveParams, Selection, epfd, register_pruner, synthetic_ensemble
from entroprune.ensemble_io import accuracy, majority_vote
from entroprune.pruners import reduce_error_pruner

rng = np.random.default_rng(0)
full = synthetic_ensemble(60, 4000, base_accuracy=rng.uniform(0.55, 0.85, 60), correlation=0.3, seed=0)
val, test = full.instances(np.arange(2000)), full.instances(np.arange(2000, 4000))
params = ObjectiveParams(k=8)

# %% Every registered pruner, distributed over three machines, with the
# final candidate picked by voted accuracy on the validation half.
print("registered:", sorted(PRUNERS))
for name in sorted(PRUNERS):
    res = epfd(val, 3, name, params, criterion="accuracy", seed=1)
    acc = accuracy(majority_vote(test, res.final.indices), test.labels)
    print(f"{name:13s} winner {res.winner:8s} test accuracy {acc:.3f}")

# %% Reduce-error centralized vs distributed: nearly the same accuracy,
# less work per machine.
central = reduce_error_pruner(val, params)
res = epfd(val, 3, "reduce-error", params, criterion="accuracy", seed=1)
path = max(s.candidate_evals for _, s in res.per_group) + res.union_selection.candidate_evals
print(f"centralized: {central.candidate_evals} candidate scorings, "
      f"test accuracy {accuracy(majority_vote(test, central.indices), test.labels):.3f}")
print(f"distributed: {path} on the busiest machine, "
      f"test accuracy {accuracy(majority_vote(test, res.final.indices), test.labels):.3f}")


# %% A custom plugin: keep the k individually most accurate classifiers.
@register_pruner("top-accuracy")
def top_accuracy(ens, params, seed=None):
    acc = (ens.predictions == ens.labels).mean(axis=1)
    return Selection(indices=tuple(np.argsort(-acc, kind="stable")[:params.k].tolist()))


res = epfd(val, 3, "top-accuracy", params, criterion="accuracy", seed=1)
print(f"top-accuracy  winner {res.winner:8s} test accuracy "
      f"{accuracy(majority_vote(test, res.final.indices), test.labels):.3f}")

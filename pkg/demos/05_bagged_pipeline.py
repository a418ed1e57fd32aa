"""
From raw features to a pruned ensemble
======================================

Bag decision stumps on a two-class Gaussian problem (60/20/20 split), check
that the objective tracks held-out accuracy, and see how ``lam`` changes
the pruned ensemble.
"""

import warnings

from entroprune import ObjectiveParams, SplitSpec, bagging_train, comep, gaussian_blobs
from entroprune.ensemble_io import accuracy, majority_vote
from entroprune.harness import sweep_lambda, validate_objective

data = gaussian_blobs(10_000, n_features=10, separation=1.35, seed=0)
with warnings.catch_warnings():
    warnings.simplefilter("ignore", RuntimeWarning)
    val, test = bagging_train(data, SplitSpec(seed=0), 8, "stump", seed=0)

# %% Objective vs accuracy over all 3-member sub-ensembles: the objective is
# measured on validation, the accuracy on test.
check = validate_objective(val, test, combo_size=3)
print(f"{len(check['rows'])} subsets, Pearson {check['pearson']:.3f}, slope {check['slope']:.3f}")

# %% The pruned ensemble against the full one.
sel = comep(val, ObjectiveParams(k=3))
print(f"full ensemble test accuracy   {accuracy(majority_vote(test, range(val.n)), test.labels):.4f}")
print(f"pruned {sorted(sel.indices)} test accuracy {accuracy(majority_vote(test, sel.indices), test.labels):.4f}")

# %% Accuracy over a (lam, k) grid, ready to plot.
for row in sweep_lambda(val, test, lambda_grid=(0.1, 0.5, 0.9), k_grid=(3, 5)):
    print(f"lam={row['lambda']}  k={row['k']}  test accuracy {row['test_accuracy']:.4f}")

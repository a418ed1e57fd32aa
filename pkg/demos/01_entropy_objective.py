"""
Entropy scores and the pruning objective
========================================

Every classifier is represented only by its vector of predicted labels.
Two scores drive pruning:

* normalized mutual information with the true labels rewards accuracy;
* normalized variation of information between two classifiers rewards
  disagreement, i.e. diversity.

The pairwise objective ``tdac`` mixes the two with a weight ``lam`` and the
set objective ``tdas`` sums it over all pairs in a sub-ensemble.
"""

import numpy as np

from entroprune import EnsemblePredictions, norm_mi, norm_vi, tdac, tdas, tdas_decomposed

# %% Four instances, hand-sized so every number can be checked by hand.
truth = np.array([0, 0, 1, 1])
h0 = np.array([0, 0, 1, 1])   # perfect
h1 = np.array([0, 0, 1, 0])   # one mistake
h2 = np.array([0, 1, 0, 1])   # independent of the truth

for name, h in (("h0", h0), ("h1", h1), ("h2", h2)):
    print(f"{name}: MI with truth = {norm_mi(h, truth):.5f}")
print(f"VI(h0, h1) = {norm_vi(h0, h1):.5f}   VI(h0, h2) = {norm_vi(h0, h2):.5f}")

# %% The pairwise objective for (h0, h1) at lam = 0.5.
# Half the diversity term plus half the mean accuracy term:
# 0.5 * 0.79248 + 0.5 * (1 + 0.34560) / 2 = 0.73264
ens = EnsemblePredictions(np.stack([h0, h1, h2]), truth)
print(f"tdac(h0, h1) = {tdac(ens, 0, 1, lam=0.5):.5f}")

# %% lam trades accuracy for diversity.
for lam in (0.0, 0.5, 1.0):
    print(f"lam={lam}: tdas(h0,h1) = {tdas(ens, [0, 1], lam):.3f}   tdas(h0,h2) = {tdas(ens, [0, 2], lam):.3f}")

# %% The set objective has a second, closed form: a diversity double sum plus
# a scaled sum of member accuracies. Both routes agree to rounding error.
rng = np.random.default_rng(0)
big = EnsemblePredictions(rng.integers(0, 3, (12, 300)), rng.integers(0, 3, 300))
subset = [0, 3, 4, 9, 11]
print(f"pairwise {tdas(big, subset):.12f}  decomposed {tdas_decomposed(big, subset):.12f}")

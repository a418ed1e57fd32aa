"""Entropy-objective ensemble pruning, centralized and two-round distributed."""

from .distributed import (
    DistributedResult,
    Partition,
    benchmark_speedup,
    domep,
    epfd,
    partition,
    partition_sizes,
)
from .ensemble_io import (
    Dataset,
    SplitSpec,
    accuracy,
    bagging_train,
    gaussian_blobs,
    load_dataset,
    load_predictions,
    majority_vote,
    synthetic_ensemble,
    write_predictions,
)
from .entropy import entropy, joint_entropy, mutual_information, norm_mi, norm_vi
from .errors import (
    ConfigurationError,
    EntroPruneError,
    InvalidInputError,
    OracleTooLargeError,
    ParseError,
)
from .objective import (
    EnsemblePredictions,
    ObjectiveParams,
    TDACCache,
    brute_force_optimum,
    tdac,
    tdas,
    tdas_decomposed,
    tdas_pairwise,
)
from .pruners import (
    PRUNERS,
    Selection,
    comep,
    get_pruner,
    greedy_eval_count,
    kappa_pruner,
    random_pruner,
    reduce_error_pruner,
    register_pruner,
)

__version__ = "0.1.0"

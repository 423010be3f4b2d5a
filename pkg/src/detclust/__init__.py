"""Semi-supervised clustering driven by kernel Gram determinants.

Partitions are scored by the product over clusters of inverse Gram
determinants raised to a temperature; inference couples a collapsed
Gibbs sampler over partitions with exchange-sampling moves on the
kernel hyperparameters.  Point labels act as hard must-link /
cannot-link constraints.
"""

from ._backend import active_backend, use_backend
from .data import DataSet, load_csv
from .errors import NotPositiveDefinite, NumericalDegeneracy
from .kernels import KernelFamily, KernelParams, gram_matrix, kernel_eval
from .linalg import (
    PDMatrixCache,
    block_det,
    cholesky_logdet,
    inverse_add_point,
    inverse_remove_point,
)
from .metrics import (
    ContingencyTable,
    PosteriorSummary,
    adjusted_rand_index,
    kmeans,
    normalized_mutual_information,
    summarize,
)
from .partitions import (
    LOG_ZERO,
    ClusterState,
    LabelConstraints,
    Partition,
    canonicalize,
    constraints_from_labels,
    enumerate_partitions,
    log_likelihood,
    satisfies_constraints,
)
from .sampler import (
    GridPrior,
    HyperPrior,
    InitMode,
    PosteriorTrace,
    SamplerConfig,
    TraceSample,
    exact_posterior,
    exchange_update,
    gibbs_conditional,
    gibbs_sweep,
    init_state,
    run_inference,
)
from .synthetic import Scenario, SyntheticSpec, generate_synthetic

__version__ = "0.1.0"

__all__ = [
    "DataSet",
    "KernelFamily",
    "KernelParams",
    "Partition",
    "LabelConstraints",
    "ClusterState",
    "PDMatrixCache",
    "SamplerConfig",
    "HyperPrior",
    "GridPrior",
    "InitMode",
    "PosteriorTrace",
    "TraceSample",
    "ContingencyTable",
    "PosteriorSummary",
    "Scenario",
    "SyntheticSpec",
    "NotPositiveDefinite",
    "NumericalDegeneracy",
    "LOG_ZERO",
    "active_backend",
    "use_backend",
    "adjusted_rand_index",
    "block_det",
    "canonicalize",
    "cholesky_logdet",
    "constraints_from_labels",
    "enumerate_partitions",
    "exact_posterior",
    "exchange_update",
    "generate_synthetic",
    "gibbs_conditional",
    "gibbs_sweep",
    "gram_matrix",
    "init_state",
    "inverse_add_point",
    "inverse_remove_point",
    "kernel_eval",
    "kmeans",
    "load_csv",
    "log_likelihood",
    "normalized_mutual_information",
    "run_inference",
    "satisfies_constraints",
    "summarize",
]

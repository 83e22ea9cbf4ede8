"""Node-failure identifiability in Boolean network tomography."""
__version__ = "0.1.0"

from ._kernels import BACKEND
from .graph import (
    UNBOUNDED,
    ConnectivityReport,
    Network,
    disjoint_paths,
    min_degree,
    path_through_avoiding,
    st_separator,
    vertex_connectivity,
)
from .identifiability import (
    IdentifiabilityReport,
    ProbingScheme,
    enumerate_paths,
    evaluate_syndrome,
    is_k_identifiable,
    max_identifiability,
    menger_stitch,
    mu_by_enumeration,
    separable,
    separator_placement,
    upper_bound_witness,
)
from .random_models import (
    Configuration,
    ExperimentConfig,
    gen_gnp,
    gen_random_regular,
    gnp_failure_bound,
    monte_carlo_separability,
    pathfinder,
    pathfinder_experiment,
    regular_success_probability,
)
from .topologies import (
    LosEmbedding,
    MonitorPlacement,
    build_augmented_hypergrid,
    build_hypergrid,
    build_los_network,
    canonical_placement,
    constructive_path,
    is_w_saturated,
    monotone_path,
)

"""wsntopo: scale-free sensor-network topology construction and analysis."""

from .analysis import (
    DegreeHistogram,
    RobustnessCurve,
    TheoreticalModel,
    degree_histogram,
    degree_stats,
    fit_power_law_exponent,
    fit_power_law_tail,
    giant_components,
    ks_distance_to_theory,
    random_failure_sweep,
    theoretical_bin_pmf,
    theoretical_pk,
)
from .baselines import (
    ba_graph,
    dtg_topology,
    knn_topology,
    leach_cluster,
    leach_composite,
)
from .config import ExperimentConfig
from .errors import (
    AnalysisError,
    ConfigError,
    ElectionError,
    FitError,
    GrowthExhausted,
    NodeLookupError,
    SeedTopologyError,
    StateError,
    WsnTopoError,
)
from .geometry import (
    Deployment,
    DeploymentConfig,
    deploy,
    neighbor_count_pmf,
    potential_neighbors,
    udg_graph,
)
from .graph import Graph
from .laee import (
    EvolutionReport,
    EvolutionState,
    LaeeParams,
    attach,
    attachment_weights,
    evolve,
    init_seed_topology,
    select_growth_pair,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "ConfigError",
    "DegreeHistogram",
    "Deployment",
    "DeploymentConfig",
    "ElectionError",
    "EvolutionReport",
    "EvolutionState",
    "ExperimentConfig",
    "FitError",
    "Graph",
    "GrowthExhausted",
    "LaeeParams",
    "NodeLookupError",
    "RobustnessCurve",
    "SeedTopologyError",
    "StateError",
    "TheoreticalModel",
    "WsnTopoError",
    "attach",
    "attachment_weights",
    "ba_graph",
    "degree_histogram",
    "degree_stats",
    "deploy",
    "dtg_topology",
    "evolve",
    "fit_power_law_exponent",
    "fit_power_law_tail",
    "giant_components",
    "init_seed_topology",
    "knn_topology",
    "ks_distance_to_theory",
    "leach_cluster",
    "leach_composite",
    "neighbor_count_pmf",
    "potential_neighbors",
    "random_failure_sweep",
    "select_growth_pair",
    "theoretical_bin_pmf",
    "theoretical_pk",
    "udg_graph",
]

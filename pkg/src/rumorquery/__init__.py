"""Source detection on SI diffusion snapshots with noisy id/dir querying."""

from .bounds import (
    BoundInputs,
    BudgetBound,
    GapEnvelope,
    adaptivity_gap_envelope,
    distance_pmf,
    distance_pmf_single_hop,
    entropy_dir,
    entropy_id,
    f_a,
    f_la,
    f_ln,
    f_n,
    g_combinatorial,
    necessary_budget_ad,
    necessary_budget_na,
    sufficient_budget_ad,
    sufficient_budget_na,
)
from .centrality import CentralityScores, bfs_heuristic_scores, rumor_centrality_tree, subtree_sizes
from .diffusion import DiffusionSnapshot, hop_distance, simulate_si
from .estimators import (
    EstimateResult,
    EstimatorConfig,
    PredecessorGraph,
    mvad,
    mvna,
    r_star_ad_necessary,
    r_star_ad_sufficient,
    r_star_na_necessary,
    r_star_na_sufficient,
    select_candidate_set,
)
from .harness import ExperimentConfig, ResultRow, TopologySpec, run_experiment, write_csv
from .querying import QueryTranscript, TruthfulnessParams, ask, majority_designation, majority_identity
from .topology import (
    FiniteGraph,
    RegularTree,
    expand_neighbors,
    gen_erdos_renyi,
    gen_preferential_attachment,
    load_edge_list,
)

__version__ = "0.1.0"

from .stats import (
    combined_rank,
    kendall_tau,
    pair_rank_difference,
    rank_with_ties,
    spearman_rho,
)
from .tables import (
    BiasReport,
    RankEntry,
    RankTable,
    SeedPair,
    StabilityReport,
    operation_bias,
    seed_stability,
)

__all__ = [
    "combined_rank",
    "kendall_tau",
    "pair_rank_difference",
    "rank_with_ties",
    "spearman_rho",
    "BiasReport",
    "RankEntry",
    "RankTable",
    "SeedPair",
    "StabilityReport",
    "operation_bias",
    "seed_stability",
]

from .random_search import (
    Accuracy,
    SearchResult,
    SearchSummary,
    TrialStats,
    random_search,
    repeated_trials,
    sample_subset,
    sampled_union,
    trial_seeds,
)

__all__ = [
    "Accuracy",
    "SearchResult",
    "SearchSummary",
    "TrialStats",
    "random_search",
    "repeated_trials",
    "sample_subset",
    "sampled_union",
    "trial_seeds",
]

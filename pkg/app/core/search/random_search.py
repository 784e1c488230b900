import logging
from dataclasses import dataclass
from typing import Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import NASGraphError, PoolTooSmall

logger = logging.getLogger(__name__)


class Accuracy(NamedTuple):
    val: float
    test: float


@dataclass(frozen=True)
class SearchResult:
    best_arch_id: str
    best_score: float
    sampled: Tuple[str, ...]
    chosen_val_acc: Optional[float] = None
    chosen_test_acc: Optional[float] = None
    gt_val_acc: Optional[float] = None
    gt_test_acc: Optional[float] = None


@dataclass(frozen=True)
class TrialStats:
    mean: float
    std: float
    trials: int

    @classmethod
    def of(cls, values: Sequence[float]) -> "TrialStats":
        data = np.asarray(values, dtype=np.float64)
        # population std
        return cls(float(data.mean()), float(data.std()), int(data.size))


@dataclass(frozen=True)
class SearchSummary:
    results: Tuple[SearchResult, ...]
    chosen_val: Optional[TrialStats]
    chosen_test: Optional[TrialStats]
    gt_val: Optional[TrialStats]
    gt_test: Optional[TrialStats]

    @property
    def trials(self) -> int:
        return len(self.results)


def _rng(seed: int, stream: Optional[int]) -> np.random.Generator:
    if stream is None:
        return np.random.default_rng(seed)
    return np.random.default_rng([seed, stream])


def sample_subset(
    pool: Sequence[str], n: int, seed: int, stream: Optional[int] = None
) -> List[str]:
    """``n`` distinct pool members in sampling order.

    ``stream`` separates otherwise identical seeds, so different measures can
    draw independent subsets; leave it unset to share one subset per seed.
    """
    if n < 1:
        raise NASGraphError(f"Sample size must be at least 1, got {n}.")
    if len(pool) < n:
        raise PoolTooSmall(f"Cannot sample {n} architectures from a pool of {len(pool)}.")
    picks = _rng(seed, stream).choice(len(pool), size=n, replace=False)
    return [pool[int(i)] for i in picks]


def trial_seeds(base_seed: int, trials: int) -> range:
    if trials < 1:
        raise NASGraphError(f"Trials must be at least 1, got {trials}.")
    return range(base_seed, base_seed + trials)


def sampled_union(
    pool: Sequence[str], n: int, trials: int, base_seed: int, stream: Optional[int] = None
) -> List[str]:
    """Every architecture any trial will look at, in first-seen order."""
    seen = {}
    for seed in trial_seeds(base_seed, trials):
        for arch in sample_subset(pool, n, seed, stream):
            seen.setdefault(arch, None)
    return list(seen)


def _subset_max(sampled: Iterable[str], accuracies: Mapping[str, Accuracy]) -> Accuracy:
    rows = [accuracies[arch] for arch in sampled]
    return Accuracy(max(row.val for row in rows), max(row.test for row in rows))


def random_search(
    pool: Sequence[str],
    metric: Mapping[str, float],
    n: int,
    seed: int,
    accuracies: Optional[Mapping[str, Accuracy]] = None,
    stream: Optional[int] = None,
) -> SearchResult:
    sampled = sample_subset(pool, n, seed, stream)
    best_arch, best_score = sampled[0], metric[sampled[0]]
    for arch in sampled[1:]:
        score = metric[arch]
        # strict: the first sampled wins ties
        if score > best_score:
            best_arch, best_score = arch, score

    if accuracies is None:
        return SearchResult(best_arch, float(best_score), tuple(sampled))
    chosen = accuracies[best_arch]
    gt = _subset_max(sampled, accuracies)
    return SearchResult(
        best_arch_id=best_arch,
        best_score=float(best_score),
        sampled=tuple(sampled),
        chosen_val_acc=chosen.val,
        chosen_test_acc=chosen.test,
        gt_val_acc=gt.val,
        gt_test_acc=gt.test,
    )


def repeated_trials(
    pool: Sequence[str],
    metric: Mapping[str, float],
    n: int,
    trials: int,
    base_seed: int,
    accuracies: Optional[Mapping[str, Accuracy]] = None,
    stream: Optional[int] = None,
) -> SearchSummary:
    """Run ``trials`` searches with seeds ``base_seed .. base_seed + trials - 1``."""
    results = tuple(
        random_search(pool, metric, n, seed, accuracies, stream)
        for seed in trial_seeds(base_seed, trials)
    )
    if accuracies is None:
        return SearchSummary(results, None, None, None, None)
    summary = SearchSummary(
        results=results,
        chosen_val=TrialStats.of([r.chosen_val_acc for r in results]),
        chosen_test=TrialStats.of([r.chosen_test_acc for r in results]),
        gt_val=TrialStats.of([r.gt_val_acc for r in results]),
        gt_test=TrialStats.of([r.gt_test_acc for r in results]),
    )
    logger.info(
        "Search N=%d over %d trials: chosen test %.2f +- %.2f, best in subset %.2f +- %.2f",
        n,
        trials,
        summary.chosen_test.mean,
        summary.chosen_test.std,
        summary.gt_test.mean,
        summary.gt_test.std,
    )
    return summary

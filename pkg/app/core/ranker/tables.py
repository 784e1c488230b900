import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Dict, List, Mapping, NamedTuple, Sequence, Tuple

import numpy as np

from app.core.archspec import OPERATION_ORDER, CellSpec, OperationKind, count_operations
from app.core.errors import (
    DegenerateInput,
    EmptyInput,
    LengthMismatch,
    MismatchedUniverse,
    NASGraphError,
)
from .stats import pair_rank_difference, rank_with_ties, spearman_rho

logger = logging.getLogger(__name__)


class RankEntry(NamedTuple):
    arch_id: str
    score: float
    rank: float


@dataclass(frozen=True)
class RankTable:
    """Scored architectures, rank 1 = best, ties averaged. Entries keep input order."""

    entries: Tuple[RankEntry, ...]

    @classmethod
    def from_scores(cls, arch_ids: Sequence[str], scores: Sequence[float]) -> "RankTable":
        if len(arch_ids) != len(scores):
            raise LengthMismatch(
                f"{len(arch_ids)} architectures but {len(scores)} scores."
            )
        if len(set(arch_ids)) != len(arch_ids):
            raise NASGraphError("Architecture ids in a rank table must be unique.")
        ranks = rank_with_ties(scores)
        return cls(
            tuple(
                RankEntry(arch, float(score), rank)
                for arch, score, rank in zip(arch_ids, scores, ranks)
            )
        )

    def __len__(self) -> int:
        return len(self.entries)

    def arch_ids(self) -> List[str]:
        return [entry.arch_id for entry in self.entries]

    def scores(self) -> List[float]:
        return [entry.score for entry in self.entries]

    def ranks(self) -> List[float]:
        return [entry.rank for entry in self.entries]

    def top(self, fraction: float) -> List[str]:
        """The best ``ceil(fraction * n)`` ids; equal ranks keep input order."""
        if not 0.0 < fraction <= 1.0:
            raise NASGraphError(f"Top fraction must be in (0, 1], got {fraction}.")
        # round() keeps 0.1 * 30 from becoming 4
        count = math.ceil(round(fraction * len(self.entries), 9))
        ordered = sorted(range(len(self.entries)), key=lambda i: self.entries[i].rank)
        return [self.entries[i].arch_id for i in ordered[:count]]


@dataclass(frozen=True)
class BiasReport:
    operations: Tuple[OperationKind, ...]
    metric_freq: Tuple[float, ...]
    gt_freq: Tuple[float, ...]
    bias: float
    top_count: int

    def rows(self) -> List[Tuple[str, float, float]]:
        return [
            (op.value, metric, gt)
            for op, metric, gt in zip(self.operations, self.metric_freq, self.gt_freq)
        ]


def _frequencies(cells: List[CellSpec]) -> np.ndarray:
    counts = count_operations(cells)
    vector = np.array([counts[op] for op in OPERATION_ORDER], dtype=np.float64)
    total = vector.sum()
    if total == 0:
        raise DegenerateInput("Selected cells contain no operations.")
    return vector / total


def operation_bias(
    metric_scores: RankTable,
    gt_scores: RankTable,
    cells: Mapping[str, CellSpec],
    top_fraction: float,
) -> BiasReport:
    """L1 distance between operation histograms of the two top selections."""
    universe = set(metric_scores.arch_ids())
    if universe != set(gt_scores.arch_ids()):
        raise MismatchedUniverse("Metric and ground-truth rankings cover different architectures.")
    if not universe:
        raise EmptyInput("No architectures to compare.")
    missing = universe - set(cells)
    if missing:
        raise MismatchedUniverse(f"{len(missing)} ranked architectures have no cell.")

    metric_top = metric_scores.top(top_fraction)
    gt_top = gt_scores.top(top_fraction)
    metric_freq = _frequencies([cells[arch] for arch in metric_top])
    gt_freq = _frequencies([cells[arch] for arch in gt_top])
    bias = float(np.abs(metric_freq - gt_freq).sum())
    logger.info("Operation bias over top %d of %d: %.4f", len(metric_top), len(universe), bias)
    return BiasReport(
        operations=OPERATION_ORDER,
        metric_freq=tuple(metric_freq.tolist()),
        gt_freq=tuple(gt_freq.tolist()),
        bias=bias,
        top_count=len(metric_top),
    )


class SeedPair(NamedTuple):
    seed_a: int
    seed_b: int
    rank_difference: float
    rho: float


@dataclass(frozen=True)
class StabilityReport:
    pairs: Tuple[SeedPair, ...]
    rank_difference_mean: float
    rank_difference_std: float
    rho_mean: float
    rho_std: float


def seed_stability(seeds: Sequence[int], scores_by_seed: Sequence[Sequence[float]]) -> StabilityReport:
    """Compare the rankings that different initialisation seeds produce.

    ``scores_by_seed[k]`` holds one score per architecture under ``seeds[k]``;
    every pair of seeds yields a pair rank difference and a Spearman rho.
    """
    if len(seeds) != len(scores_by_seed):
        raise LengthMismatch(f"{len(seeds)} seeds but {len(scores_by_seed)} score rows.")
    if len(seeds) < 2:
        raise DegenerateInput("Seed stability needs at least two seeds.")
    ranks = [rank_with_ties(row) for row in scores_by_seed]
    pairs = tuple(
        SeedPair(
            seeds[a],
            seeds[b],
            pair_rank_difference(ranks[a], ranks[b]),
            spearman_rho(scores_by_seed[a], scores_by_seed[b]),
        )
        for a, b in combinations(range(len(seeds)), 2)
    )
    differences = np.array([pair.rank_difference for pair in pairs])
    rhos = np.array([pair.rho for pair in pairs])
    return StabilityReport(
        pairs=pairs,
        rank_difference_mean=float(differences.mean()),
        rank_difference_std=float(differences.std()),
        rho_mean=float(rhos.mean()),
        rho_std=float(rhos.std()),
    )

import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from tqdm import tqdm

from app.core.archspec import CellSpec, SurrogateConfig, expand
from app.core.graphify import per_seed_scores
from app.core.measures import MeasureKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScoredBatch:
    """Per-seed measure values, one row per architecture in input order."""

    per_seed: Tuple[Tuple[float, ...], ...]
    seconds: float

    def means(self) -> List[float]:
        return [math.fsum(row) / len(row) for row in self.per_seed]

    def for_seed(self, k: int) -> List[float]:
        return [row[k] for row in self.per_seed]


def unique_seeds(seeds: Sequence[int]) -> Tuple[int, ...]:
    """Drop repeated seeds, keeping first occurrences in order."""
    kept = tuple(dict.fromkeys(int(s) for s in seeds))
    if len(kept) < len(seeds):
        logger.warning("Collapsed %d duplicate seeds", len(seeds) - len(kept))
    return kept


def _score_one(
    cell: CellSpec, surrogate: SurrogateConfig, measure: MeasureKind, seeds: Sequence[int]
) -> Tuple[float, ...]:
    return tuple(per_seed_scores(expand(cell, surrogate), measure, seeds))


def score_cells(
    cells: Sequence[CellSpec],
    surrogate: SurrogateConfig,
    measure: MeasureKind,
    seeds: Sequence[int],
    jobs: int = 1,
    progress: bool = True,
) -> ScoredBatch:
    """Score every cell on ``jobs`` worker threads.

    Rows come back in input order whatever order the workers finish in.
    """
    if not seeds:
        raise ValueError("At least one seed is required.")
    start_time = time.time()
    rows: List[Tuple[float, ...]] = [()] * len(cells)
    with ThreadPoolExecutor(max_workers=max(1, jobs)) as executor:
        future_to_index = {
            executor.submit(_score_one, cell, surrogate, measure, seeds): i
            for i, cell in enumerate(cells)
        }
        finished = as_completed(future_to_index)
        if progress:
            finished = tqdm(
                finished, total=len(cells), desc=f"scoring {measure.value}", disable=None
            )
        for future in finished:
            rows[future_to_index[future]] = future.result()

    seconds = time.time() - start_time
    logger.info(
        "Scored %d architectures x %d seeds with %s in %.2f seconds (%d jobs)",
        len(cells),
        len(seeds),
        measure.value,
        seconds,
        jobs,
    )
    return ScoredBatch(tuple(rows), seconds)

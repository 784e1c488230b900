import logging
from typing import List, Sequence

import numpy as np
from scipy import stats

from app.core.errors import DegenerateInput, EmptyInput, LengthMismatch, NonFiniteScore

logger = logging.getLogger(__name__)


def _as_vector(values: Sequence[float], name: str = "scores") -> np.ndarray:
    vector = np.asarray(values, dtype=np.float64).ravel()
    if vector.size == 0:
        raise EmptyInput(f"No {name} given.")
    if not np.all(np.isfinite(vector)):
        raise NonFiniteScore(f"{name} contain NaN or infinite values.")
    return vector


def _paired(x: Sequence[float], y: Sequence[float]):
    if len(x) != len(y):
        raise LengthMismatch(f"Paired vectors have lengths {len(x)} and {len(y)}.")
    a, b = _as_vector(x, "x"), _as_vector(y, "y")
    if a.size < 2:
        raise DegenerateInput("Rank correlation needs at least two items.")
    for name, vector in (("x", a), ("y", b)):
        if np.all(vector == vector[0]):
            raise DegenerateInput(f"{name} is constant; its rank correlation is undefined.")
    return a, b


def rank_with_ties(scores: Sequence[float]) -> List[float]:
    """Rank 1 is the highest score; tied scores share their mean rank."""
    vector = _as_vector(scores)
    return stats.rankdata(-vector, method="average").tolist()


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    a, b = _paired(x, y)
    rho = stats.spearmanr(a, b)[0]
    return float(np.clip(rho, -1.0, 1.0))


def kendall_tau(x: Sequence[float], y: Sequence[float]) -> float:
    """Tau-b, corrected for ties in either vector."""
    a, b = _paired(x, y)
    tau = stats.kendalltau(a, b, variant="b")[0]
    return float(np.clip(tau, -1.0, 1.0))


def combined_rank(ranks_a: Sequence[float], ranks_b: Sequence[float]) -> List[float]:
    """Re-rank the summed rank vectors; the smallest sum gets rank 1."""
    if len(ranks_a) != len(ranks_b):
        raise LengthMismatch(f"Rank vectors have lengths {len(ranks_a)} and {len(ranks_b)}.")
    total = _as_vector(ranks_a, "ranks") + _as_vector(ranks_b, "ranks")
    return rank_with_ties(-total)


def pair_rank_difference(rank_i: Sequence[float], rank_j: Sequence[float]) -> float:
    if len(rank_i) != len(rank_j):
        raise LengthMismatch(f"Rank vectors have lengths {len(rank_i)} and {len(rank_j)}.")
    if not len(rank_i):
        return 0.0
    diff = np.abs(_as_vector(rank_i, "ranks") - _as_vector(rank_j, "ranks"))
    return float(diff.sum())

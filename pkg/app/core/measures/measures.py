import logging
from enum import Enum
from typing import TYPE_CHECKING, Tuple, Union

import numpy as np

from app.core.errors import DegenerateGraph, EmptyEdgeSet, EmptyGraph, NASGraphError

if TYPE_CHECKING:
    from app.core.graphify import ArchGraph

logger = logging.getLogger(__name__)


class MeasureKind(Enum):
    AVG_DEG = "avg_deg"
    DENSITY = "density"
    RESILIENCE = "resilience"
    WEDGE = "wedge"

    @classmethod
    def parse(cls, name: str) -> "MeasureKind":
        try:
            return cls(name.strip().lower())
        except ValueError:
            choices = ", ".join(kind.value for kind in cls)
            raise NASGraphError(f"Unknown measure '{name}'. Expected one of: {choices}.")


def _undirected_pairs(graph: "ArchGraph") -> Tuple[np.ndarray, np.ndarray]:
    """Distinct unordered node pairs; a bidirectional pair counts once."""
    if not graph.edge_count:
        empty = np.zeros(0, dtype=np.int64)
        return empty, empty
    pairs = np.stack([np.minimum(graph.src, graph.dst), np.maximum(graph.src, graph.dst)], axis=1)
    pairs = np.unique(pairs, axis=0)
    return pairs[:, 0], pairs[:, 1]


def undirected_degrees(graph: "ArchGraph") -> np.ndarray:
    lo, hi = _undirected_pairs(graph)
    n = graph.node_count
    return np.bincount(lo, minlength=n) + np.bincount(hi, minlength=n)


def average_degree(graph: "ArchGraph") -> float:
    """Mean undirected degree, 2 * m_u / n."""
    if graph.node_count == 0:
        raise EmptyGraph("Average degree of a graph with no nodes is undefined.")
    lo, _ = _undirected_pairs(graph)
    return 2.0 * lo.size / graph.node_count


def density(graph: "ArchGraph") -> float:
    """Directed edge count over n(n-1)."""
    n = graph.node_count
    if n < 2:
        raise DegenerateGraph(f"Density needs at least 2 nodes, got {n}.")
    return graph.edge_count / (n * (n - 1))


def resilience(graph: "ArchGraph") -> float:
    """Sum over edges (i, j) of in-degree(j), divided by the edge count."""
    m = graph.edge_count
    if m == 0:
        raise EmptyEdgeSet("Resilience of a graph without edges is undefined.")
    in_degree = np.bincount(graph.dst, minlength=graph.node_count)
    return float(in_degree[graph.dst].sum()) / m


def wedge_count(graph: "ArchGraph") -> int:
    """Two-edge paths through each node, edge direction ignored."""
    k = undirected_degrees(graph)
    return int((k * (k - 1) // 2).sum())


_MEASURES = {
    MeasureKind.AVG_DEG: average_degree,
    MeasureKind.DENSITY: density,
    MeasureKind.RESILIENCE: resilience,
    MeasureKind.WEDGE: wedge_count,
}


def compute_measure(graph: "ArchGraph", kind: MeasureKind) -> Union[float, int]:
    return _MEASURES[kind](graph)

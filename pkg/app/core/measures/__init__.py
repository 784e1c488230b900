from .measures import (
    MeasureKind,
    average_degree,
    compute_measure,
    density,
    resilience,
    undirected_degrees,
    wedge_count,
)

__all__ = [
    "MeasureKind",
    "average_degree",
    "compute_measure",
    "density",
    "resilience",
    "undirected_degrees",
    "wedge_count",
]

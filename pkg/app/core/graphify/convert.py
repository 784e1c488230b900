import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from app.config.settings import DEFAULT_SEEDS
from app.core.archspec import ArchitectureSpec
from app.core.measures import MeasureKind, compute_measure
from .block import GraphBlock, decompose
from .graph import ArchGraph
from .probe import ProbeCounter, edge_scores

logger = logging.getLogger(__name__)


def assemble(blocks: Sequence[GraphBlock], counter: Optional[ProbeCounter] = None) -> ArchGraph:
    """Probe every block on its own and stitch the subgraphs together."""
    nodes = []
    first_node: Dict[int, int] = {}
    for block in blocks:
        first_node[block.block_id] = len(nodes)
        nodes.extend((block.block_id, channel) for channel in range(block.out_channels))

    src: List[int] = []
    dst: List[int] = []
    score: List[float] = []
    for block in blocks:
        scores = edge_scores(block, counter)
        for (source_block, source_channel), out_channel, omega in scores.edges():
            src.append(first_node[source_block] + source_channel)
            dst.append(first_node[block.block_id] + out_channel)
            score.append(omega)

    return ArchGraph(tuple(nodes), np.array(src), np.array(dst), np.array(score))


def convert(
    arch: ArchitectureSpec, seed: int, counter: Optional[ProbeCounter] = None
) -> ArchGraph:
    graph = assemble(decompose(arch, seed), counter)
    logger.debug(
        "Converted architecture (seed=%d): %d nodes, %d edges",
        seed,
        graph.node_count,
        graph.edge_count,
    )
    return graph


def score_architecture(
    arch: ArchitectureSpec,
    measure: MeasureKind,
    seeds: Sequence[int] = DEFAULT_SEEDS,
) -> float:
    """Mean of the graph measure over one conversion per distinct seed."""
    values = per_seed_scores(arch, measure, tuple(dict.fromkeys(seeds)))
    # fsum is exactly rounded, so the mean does not depend on seed order
    return math.fsum(values) / len(values)


def per_seed_scores(
    arch: ArchitectureSpec, measure: MeasureKind, seeds: Sequence[int]
) -> List[float]:
    if not seeds:
        raise ValueError("At least one seed is required.")
    return [float(compute_measure(convert(arch, seed), measure)) for seed in seeds]

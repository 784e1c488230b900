from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Tuple

import numpy as np

from app.core.errors import NASGraphError

Node = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class ArchGraph:
    """Weighted DAG with one node per (block, channel).

    Edges are stored as parallel arrays sorted by ``(src, dst)``; every stored
    score is strictly positive. Measures only look at the topology.
    """

    nodes: Tuple[Node, ...]
    src: np.ndarray
    dst: np.ndarray
    score: np.ndarray

    def __post_init__(self):
        src = np.asarray(self.src, dtype=np.int64)
        dst = np.asarray(self.dst, dtype=np.int64)
        score = np.asarray(self.score, dtype=np.float64)
        if not (src.shape == dst.shape == score.shape) or src.ndim != 1:
            raise NASGraphError("Edge arrays must be 1-d and of equal length.")
        n = len(self.nodes)
        if src.size and (src.min() < 0 or dst.min() < 0 or max(src.max(), dst.max()) >= n):
            raise NASGraphError("Edge endpoint outside the node range.")
        if np.any(src == dst):
            raise NASGraphError("Self-loops are not allowed.")
        if np.any(score <= 0.0):
            raise NASGraphError("Stored edges must have a positive score.")
        order = np.lexsort((dst, src))
        src, dst, score = src[order], dst[order], score[order]
        if src.size > 1 and np.any((src[1:] == src[:-1]) & (dst[1:] == dst[:-1])):
            raise NASGraphError("Duplicate directed edge.")
        for name, value in (("src", src), ("dst", dst), ("score", score)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "nodes", tuple(tuple(node) for node in self.nodes))

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[Tuple[int, int]],
        scores: Sequence[float] = None,
    ) -> "ArchGraph":
        """Graph on nodes ``0..node_count-1``; node i is labelled (i, 0)."""
        pairs = list(edges)
        src = np.array([e[0] for e in pairs], dtype=np.int64)
        dst = np.array([e[1] for e in pairs], dtype=np.int64)
        weight = np.ones(len(pairs)) if scores is None else np.asarray(scores, dtype=np.float64)
        return cls(tuple((i, 0) for i in range(node_count)), src, dst, weight)

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def edge_count(self) -> int:
        return int(self.src.size)

    def edges(self) -> Iterator[Tuple[int, int, float]]:
        for s, d, w in zip(self.src, self.dst, self.score):
            yield int(s), int(d), float(w)

    def adjacency(self) -> np.ndarray:
        """Dense directed 0/1 adjacency matrix."""
        matrix = np.zeros((self.node_count, self.node_count), dtype=np.int64)
        matrix[self.src, self.dst] = 1
        return matrix

    def reversed(self) -> "ArchGraph":
        return ArchGraph(self.nodes, self.dst, self.src, self.score)

    def respects_block_order(self) -> bool:
        """True when every edge leaves an earlier block for a later one."""
        blocks = np.array([node[0] for node in self.nodes], dtype=np.int64)
        if not self.edge_count:
            return True
        return bool(np.all(blocks[self.src] < blocks[self.dst]))

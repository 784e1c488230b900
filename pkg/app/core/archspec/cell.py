import json
import logging
from dataclasses import dataclass
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from app.core.errors import (
    BadPredecessorIndex,
    DimensionMismatch,
    MalformedEncoding,
    NotUpperTriangular,
)
from .operations import OPERATION_ORDER, OperationKind, resolve_label

logger = logging.getLogger(__name__)

NB201_NODE_COUNT = 4
# Edge slots of an NB201 cell in grammar order: group g lists every
# predecessor of node g + 1.
NB201_EDGE_SLOTS: Tuple[Tuple[int, int], ...] = tuple(
    (src, dst) for dst in range(1, NB201_NODE_COUNT) for src in range(dst)
)


class CellEdge(NamedTuple):
    src: int
    dst: int
    op: OperationKind


@dataclass(frozen=True)
class CellSpec:
    """A cell DAG over ``node_count`` tensor nodes.

    Node 0 is the cell input and the last node is the cell output. Edges are
    kept sorted by ``(dst, src)`` so that iterating them is a topological walk.
    With ``concat_output`` the output node concatenates its inputs along the
    channel axis (NAS-Bench-101 cells) instead of summing them.
    """

    node_count: int
    edges: Tuple[CellEdge, ...]
    concat_output: bool = False

    def __post_init__(self):
        if self.node_count < 1:
            raise MalformedEncoding("A cell needs at least one node.")
        seen = set()
        for edge in self.edges:
            if not 0 <= edge.src < edge.dst < self.node_count:
                raise BadPredecessorIndex(
                    f"Edge {edge.src}->{edge.dst} is not a forward edge "
                    f"in a {self.node_count}-node cell."
                )
            if (edge.src, edge.dst) in seen:
                raise MalformedEncoding(
                    f"Duplicate edge {edge.src}->{edge.dst} in cell."
                )
            seen.add((edge.src, edge.dst))
        object.__setattr__(
            self, "edges", tuple(sorted(self.edges, key=lambda e: (e.dst, e.src)))
        )

    @property
    def output_node(self) -> int:
        return self.node_count - 1

    def edge(self, src: int, dst: int) -> Optional[OperationKind]:
        for e in self.edges:
            if e.src == src and e.dst == dst:
                return e.op
        return None

    def operations(self) -> List[OperationKind]:
        return [e.op for e in self.edges]

    @property
    def is_nb201(self) -> bool:
        if self.concat_output:
            return False
        return self.node_count == NB201_NODE_COUNT and [
            (e.src, e.dst) for e in self.edges
        ] == list(NB201_EDGE_SLOTS)


def parse_nb201_arch(encoding: str) -> CellSpec:
    """Parse the public NAS-Bench-201 string form.

    ``|op~k|`` tokens are grouped by destination node and groups are joined
    with ``+``; ``k`` is the zero-based predecessor index.
    """
    if not isinstance(encoding, str):
        raise MalformedEncoding(f"Architecture must be text, got {type(encoding)}")
    groups = encoding.strip().split("+")
    if len(groups) != NB201_NODE_COUNT - 1:
        raise MalformedEncoding(
            f"Expected {NB201_NODE_COUNT - 1} '+'-separated groups, "
            f"got {len(groups)}: {encoding!r}"
        )

    edges = []
    for group_index, group in enumerate(groups):
        dst = group_index + 1
        if len(group) < 2 or not group.startswith("|") or not group.endswith("|"):
            raise MalformedEncoding(f"Group {group!r} must be wrapped in '|'.")
        tokens = group[1:-1].split("|")
        if len(tokens) != dst:
            raise MalformedEncoding(
                f"Group {group_index} must hold {dst} tokens, got {len(tokens)}."
            )
        predecessors = set()
        for token in tokens:
            name, sep, index = token.partition("~")
            if not sep or not name or not index.isdigit():
                raise MalformedEncoding(f"Token {token!r} is not of the form op~k.")
            op = OperationKind.from_name(name)
            src = int(index)
            if src >= dst:
                raise BadPredecessorIndex(
                    f"Token {token!r} points at node {src}, must be < {dst}."
                )
            if src in predecessors:
                raise MalformedEncoding(
                    f"Predecessor {src} repeated in group {group_index}."
                )
            predecessors.add(src)
            edges.append(CellEdge(src, dst, op))

    return CellSpec(NB201_NODE_COUNT, tuple(edges))


def render_nb201(cell: CellSpec) -> str:
    """Render an NB201 cell back to the ``|op~k|+...`` grammar."""
    if not cell.is_nb201:
        raise MalformedEncoding("Only 4-node, 6-edge cells render to NB201 form.")
    groups = []
    for dst in range(1, cell.node_count):
        tokens = [f"{cell.edge(src, dst).value}~{src}" for src in range(dst)]
        groups.append("|" + "|".join(tokens) + "|")
    return "+".join(groups)


def parse_adjacency_cell(
    adjacency: Sequence[Sequence[int]], labels: Sequence
) -> CellSpec:
    """Build a cell from an upper-triangular 0/1 matrix and node labels.

    Each 1-entry ``(i, j)`` becomes an edge carrying the label of node ``j``.
    ``input``/``output`` markers carry no operation, so edges into them are
    skips. The output node concatenates its inputs, as in NAS-Bench-101.
    """
    try:
        matrix = np.asarray(adjacency, dtype=np.int64)
    except (TypeError, ValueError) as e:
        raise DimensionMismatch(f"Adjacency is not a rectangular matrix: {e}") from e
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionMismatch(f"Adjacency must be square, got shape {matrix.shape}.")
    node_count = matrix.shape[0]
    if len(labels) != node_count:
        raise DimensionMismatch(
            f"{node_count}x{node_count} adjacency needs {node_count} labels, "
            f"got {len(labels)}."
        )
    if not np.isin(matrix, (0, 1)).all():
        raise MalformedEncoding("Adjacency entries must be 0 or 1.")
    if np.tril(matrix).any():
        raise NotUpperTriangular("Adjacency has entries on or below the diagonal.")

    ops = [resolve_label(label) for label in labels]
    edges = [
        CellEdge(int(i), int(j), ops[j] or OperationKind.SKIP_CONNECT)
        for i, j in zip(*np.nonzero(matrix))
    ]
    return CellSpec(node_count, tuple(edges), concat_output=True)


def parse_arch_text(text: str) -> CellSpec:
    """Parse either encoding: JSON adjacency objects or the NB201 string."""
    stripped = text.strip()
    if not stripped.startswith("{"):
        return parse_nb201_arch(stripped)
    try:
        payload = json.loads(stripped)
    except json.JSONDecodeError as e:
        raise MalformedEncoding(f"Invalid adjacency JSON: {e}") from e
    if not isinstance(payload, dict) or "matrix" not in payload or "ops" not in payload:
        raise MalformedEncoding('Adjacency JSON needs "matrix" and "ops" keys.')
    return parse_adjacency_cell(payload["matrix"], payload["ops"])


def sample_random_cell(seed: int) -> CellSpec:
    """Draw one operation per NB201 edge slot, uniformly and independently."""
    rng = np.random.default_rng(seed)
    choices = rng.integers(0, len(OPERATION_ORDER), size=len(NB201_EDGE_SLOTS))
    edges = [
        CellEdge(src, dst, OPERATION_ORDER[choice])
        for (src, dst), choice in zip(NB201_EDGE_SLOTS, choices)
    ]
    return CellSpec(NB201_NODE_COUNT, tuple(edges))


def count_operations(cells: Iterable[CellSpec]) -> dict:
    counts = {op: 0 for op in OPERATION_ORDER}
    for cell in cells:
        for op in cell.operations():
            counts[op] += 1
    return counts

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, NamedTuple, Optional, Tuple

from app.core.errors import InvalidSurrogate, MalformedEncoding
from .cell import CellSpec
from .operations import OperationKind

logger = logging.getLogger(__name__)

# The network input is modelled as block 0, the virtual input block.
VIRTUAL_INPUT_ID = 0
# Node 0 of every cell is the cell input.
CELL_INPUT_NODE = 0
INPUT_CHANNELS = 3


class BlockKind(Enum):
    VIRTUAL_INPUT = "virtual_input"
    STEM = "stem"
    CELL_OP = "cell_op"
    REDUCTION = "reduction"
    HEAD = "head"


class CombineMode(Enum):
    SUM = "sum"
    CONCAT = "concat"


class BlockInput(NamedTuple):
    block_id: int
    mode: CombineMode = CombineMode.SUM
    channel_offset: int = 0


@dataclass(frozen=True)
class SurrogateConfig:
    """Reduced-size instantiation: h channels, c cells per module, m modules."""

    channels: int = 16
    cells_per_module: int = 1
    modules: int = 3
    probe_resolution: int = 32

    def __post_init__(self):
        for name in ("channels", "cells_per_module", "modules", "probe_resolution"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise InvalidSurrogate(f"{name} must be a positive integer, got {value!r}")
        # each reduction halves the resolution
        if self.probe_resolution < 2 ** (self.modules - 1):
            raise InvalidSurrogate(
                f"probe_resolution {self.probe_resolution} is too small for "
                f"{self.modules} modules (needs >= {2 ** (self.modules - 1)})."
            )


@dataclass(frozen=True)
class BlockDescriptor:
    block_id: int
    kind: BlockKind
    in_channels: int
    out_channels: int
    resolution: int
    inputs: Tuple[BlockInput, ...] = ()
    op: Optional[OperationKind] = None
    label: str = ""


@dataclass(frozen=True)
class ArchitectureSpec:
    cell: CellSpec
    surrogate: SurrogateConfig
    block_plan: Tuple[BlockDescriptor, ...] = field(default=())

    def __post_init__(self):
        known = {VIRTUAL_INPUT_ID}
        previous = VIRTUAL_INPUT_ID
        for block in self.block_plan:
            if block.block_id <= previous:
                raise MalformedEncoding(
                    f"Block ids must increase along the plan, got {block.block_id} "
                    f"after {previous}."
                )
            for source in block.inputs:
                if source.block_id not in known:
                    raise MalformedEncoding(
                        f"Block {block.block_id} reads block {source.block_id}, "
                        "which is not an earlier block."
                    )
            known.add(block.block_id)
            previous = block.block_id

    def count(self, kind: BlockKind) -> int:
        return sum(1 for block in self.block_plan if block.kind == kind)


def node_widths(cell: CellSpec, width: int) -> Tuple[Dict[int, int], Dict[int, int]]:
    """Channel count of every cell node, plus each output input's share.

    Summing cells keep ``width`` everywhere. In a concatenating cell the
    output width is split over the edges into the output node, the first
    ``width % k`` of them one channel wider; a node that does not feed the
    output takes the widest of its successors.
    """
    if not cell.concat_output:
        return {node: width for node in range(cell.node_count)}, {}

    output = cell.output_node
    sources = [edge.src for edge in cell.edges if edge.dst == output]
    if len(sources) > width:
        raise InvalidSurrogate(
            f"{width} channels cannot be split over {len(sources)} concatenated inputs."
        )
    shares: Dict[int, int] = {}
    if sources:
        base, extra = divmod(width, len(sources))
        shares = {src: base + (1 if i < extra else 0) for i, src in enumerate(sources)}

    widths = {CELL_INPUT_NODE: width, output: width}
    for node in range(output - 1, 0, -1):
        if node in shares:
            widths[node] = shares[node]
            continue
        successors = [widths[edge.dst] for edge in cell.edges if edge.src == node]
        widths[node] = max(successors, default=width)
    return widths, shares


def expand(cell: CellSpec, surrogate: SurrogateConfig) -> ArchitectureSpec:
    """Lay the cell out in the macro skeleton.

    stem Conv3x3(3->h), then ``modules`` modules of ``cells_per_module`` cell
    copies at widths h, 2h, 4h, ...; a reduction block (AvgPool stride 2 then
    Conv1x1 doubling the channels) sits between modules; a global average
    pool head closes the plan. Whatever reads a concatenating cell's output
    gets one CONCAT input per edge into the output node.
    """
    plan: List[BlockDescriptor] = []

    def add(**kwargs) -> int:
        block = BlockDescriptor(block_id=len(plan) + 1, **kwargs)
        plan.append(block)
        return block.block_id

    width = surrogate.channels
    resolution = surrogate.probe_resolution
    producers: Tuple[BlockInput, ...] = (
        BlockInput(
            add(
                kind=BlockKind.STEM,
                in_channels=INPUT_CHANNELS,
                out_channels=width,
                resolution=resolution,
                inputs=(BlockInput(VIRTUAL_INPUT_ID),),
                label="stem",
            )
        ),
    )

    for module in range(surrogate.modules):
        if module > 0:
            producers = (
                BlockInput(
                    add(
                        kind=BlockKind.REDUCTION,
                        in_channels=width,
                        out_channels=2 * width,
                        resolution=resolution,
                        inputs=producers,
                        label=f"reduction{module}",
                    )
                ),
            )
            width *= 2
            resolution //= 2

        widths, shares = node_widths(cell, width)
        for copy in range(surrogate.cells_per_module):
            node_inputs: Dict[int, List[BlockInput]] = {CELL_INPUT_NODE: list(producers)}
            offset = 0
            for edge in cell.edges:
                concat = edge.src in shares and edge.dst == cell.output_node
                out_channels = shares[edge.src] if concat else widths[edge.dst]
                block_id = add(
                    kind=BlockKind.CELL_OP,
                    op=edge.op,
                    in_channels=widths[edge.src],
                    out_channels=out_channels,
                    resolution=resolution,
                    inputs=tuple(node_inputs.get(edge.src, ())),
                    label=f"m{module}c{copy}e{edge.src}-{edge.dst}",
                )
                if concat:
                    link = BlockInput(block_id, CombineMode.CONCAT, offset)
                    offset += out_channels
                else:
                    link = BlockInput(block_id)
                node_inputs.setdefault(edge.dst, []).append(link)
            producers = tuple(node_inputs.get(cell.output_node, ()))

    add(
        kind=BlockKind.HEAD,
        in_channels=width,
        out_channels=width,
        resolution=resolution,
        inputs=producers,
        label="head",
    )
    logger.debug("Expanded cell into %d blocks", len(plan))
    return ArchitectureSpec(cell=cell, surrogate=surrogate, block_plan=tuple(plan))

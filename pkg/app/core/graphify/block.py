import logging
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from app.core.archspec import (
    INPUT_CHANNELS,
    VIRTUAL_INPUT_ID,
    ArchitectureSpec,
    BlockDescriptor,
    BlockKind,
    CombineMode,
    OperationKind,
)
from app.core.errors import ShapeMismatch
from app.core.tensorlite import (
    ConvParams,
    avg_pool_batch,
    conv2d_batch,
    gaussian_init,
    global_avg_pool_batch,
    relu_batch,
)

logger = logging.getLogger(__name__)


class KernelKind(Enum):
    CONV = "conv"
    RELU = "relu"
    AVG_POOL = "avg_pool"
    GLOBAL_AVG_POOL = "global_avg_pool"
    IDENTITY = "identity"
    ZERO = "zero"


# Kernels that keep a non-negative input non-negative.
_NON_NEGATIVE_TAIL = frozenset(
    {
        KernelKind.RELU,
        KernelKind.AVG_POOL,
        KernelKind.GLOBAL_AVG_POOL,
        KernelKind.IDENTITY,
        KernelKind.ZERO,
    }
)


@dataclass(frozen=True)
class KernelStep:
    kind: KernelKind
    conv: Optional[ConvParams] = field(default=None, compare=False)
    kernel: int = 1
    stride: int = 1
    padding: int = 0

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self.kind is KernelKind.CONV:
            return conv2d_batch(x, self.conv)
        if self.kind is KernelKind.RELU:
            return relu_batch(x)
        if self.kind is KernelKind.AVG_POOL:
            return avg_pool_batch(x, self.kernel, self.stride, self.padding)
        if self.kind is KernelKind.GLOBAL_AVG_POOL:
            return global_avg_pool_batch(x)
        if self.kind is KernelKind.IDENTITY:
            return x.copy()
        return np.zeros_like(x)


class PredecessorLink(NamedTuple):
    block_id: int
    mode: CombineMode
    channel_offset: int
    channels: int


@dataclass(frozen=True)
class GraphBlock:
    """One fused forward unit, converted to a subgraph on its own."""

    block_id: int
    kind: BlockKind
    in_channels: int
    out_channels: int
    resolution: int
    fused_ops: Tuple[KernelStep, ...]
    predecessors: Tuple[PredecessorLink, ...] = ()
    op: Optional[OperationKind] = None

    def __post_init__(self):
        if not self.fused_ops or self.fused_ops[-1].kind not in _NON_NEGATIVE_TAIL:
            raise ShapeMismatch(
                f"Block {self.block_id} must end in a kernel with non-negative output."
            )
        modes = {link.mode for link in self.predecessors}
        if len(modes) > 1:
            raise ShapeMismatch(
                f"Block {self.block_id} mixes summed and concatenated inputs."
            )
        if modes == {CombineMode.SUM}:
            for link in self.predecessors:
                if link.channels != self.in_channels:
                    raise ShapeMismatch(
                        f"Block {self.block_id} sums a {link.channels}-channel input "
                        f"into {self.in_channels} channels."
                    )
        elif modes == {CombineMode.CONCAT}:
            cursor = 0
            for link in sorted(self.predecessors, key=lambda l: l.channel_offset):
                if link.channel_offset != cursor:
                    raise ShapeMismatch(
                        f"Concatenated inputs of block {self.block_id} do not "
                        f"partition its {self.in_channels} channels."
                    )
                cursor += link.channels
            if cursor != self.in_channels:
                raise ShapeMismatch(
                    f"Concatenated inputs of block {self.block_id} cover {cursor} "
                    f"of {self.in_channels} channels."
                )

    @property
    def params(self) -> Tuple[ConvParams, ...]:
        return tuple(step.conv for step in self.fused_ops if step.conv is not None)

    def forward_batch(self, x: np.ndarray) -> np.ndarray:
        for step in self.fused_ops:
            x = step.apply(x)
        return x

    def scaled(self, factor: float) -> "GraphBlock":
        """Same block with every convolution's weights and bias times ``factor``."""
        steps = tuple(
            replace(step, conv=step.conv.scaled(factor)) if step.conv is not None else step
            for step in self.fused_ops
        )
        return replace(self, fused_ops=steps)


def conv_step(
    in_channels: int, out_channels: int, kernel: int, seed: int, block_id: int
) -> KernelStep:
    # Zero bias and 1/sqrt(fan_in) std: rescaling a block leaves its edges alone.
    fan_in = in_channels * kernel * kernel
    weights = gaussian_init(
        (out_channels, in_channels, kernel, kernel),
        seed=(seed, block_id),
        std=1.0 / math.sqrt(fan_in),
    )
    params = ConvParams(weights, np.zeros(out_channels), stride=1, padding=kernel // 2)
    return KernelStep(KernelKind.CONV, conv=params, kernel=kernel, padding=kernel // 2)


def _fused_ops(block: BlockDescriptor, seed: int) -> Tuple[KernelStep, ...]:
    relu = KernelStep(KernelKind.RELU)
    if block.kind is BlockKind.STEM:
        return (conv_step(block.in_channels, block.out_channels, 3, seed, block.block_id), relu)
    if block.kind is BlockKind.REDUCTION:
        return (
            KernelStep(KernelKind.AVG_POOL, kernel=2, stride=2),
            conv_step(block.in_channels, block.out_channels, 1, seed, block.block_id),
            relu,
        )
    if block.kind is BlockKind.HEAD:
        return (KernelStep(KernelKind.GLOBAL_AVG_POOL),)
    if block.kind is BlockKind.CELL_OP:
        if block.op is OperationKind.CONV_3X3:
            return (conv_step(block.in_channels, block.out_channels, 3, seed, block.block_id), relu)
        if block.op is OperationKind.CONV_1X1:
            return (conv_step(block.in_channels, block.out_channels, 1, seed, block.block_id), relu)
        # width-changing edges of concatenating cells get a Conv1x1 projection first
        projection: Tuple[KernelStep, ...] = ()
        if block.in_channels != block.out_channels:
            projection = (
                conv_step(block.in_channels, block.out_channels, 1, seed, block.block_id),
                relu,
            )
        if block.op is OperationKind.AVG_POOL_3X3:
            return projection + (KernelStep(KernelKind.AVG_POOL, kernel=3, stride=1, padding=1),)
        if block.op is OperationKind.SKIP_CONNECT:
            return projection + (KernelStep(KernelKind.IDENTITY),)
        return projection + (KernelStep(KernelKind.ZERO),)
    raise ShapeMismatch(f"Block kind {block.kind} has no fused form.")


def virtual_input_block(resolution: int, channels: int = INPUT_CHANNELS) -> GraphBlock:
    return GraphBlock(
        block_id=VIRTUAL_INPUT_ID,
        kind=BlockKind.VIRTUAL_INPUT,
        in_channels=channels,
        out_channels=channels,
        resolution=resolution,
        fused_ops=(KernelStep(KernelKind.IDENTITY),),
    )


def decompose(arch: ArchitectureSpec, seed: int) -> List[GraphBlock]:
    """Turn the block plan into seeded graph blocks, virtual input first."""
    blocks = [virtual_input_block(arch.surrogate.probe_resolution)]
    out_channels = {VIRTUAL_INPUT_ID: INPUT_CHANNELS}
    for descriptor in arch.block_plan:
        links = tuple(
            PredecessorLink(
                source.block_id,
                source.mode,
                source.channel_offset,
                out_channels[source.block_id],
            )
            for source in descriptor.inputs
        )
        blocks.append(
            GraphBlock(
                block_id=descriptor.block_id,
                kind=descriptor.kind,
                in_channels=descriptor.in_channels,
                out_channels=descriptor.out_channels,
                resolution=descriptor.resolution,
                fused_ops=_fused_ops(descriptor, seed),
                predecessors=links,
                op=descriptor.op,
            )
        )
        out_channels[descriptor.block_id] = descriptor.out_channels
    return blocks

import logging
from dataclasses import dataclass
from threading import Lock
from typing import List, NamedTuple, Optional, Tuple

import numpy as np

from app.core.archspec import CombineMode
from app.core.errors import ChannelOutOfRange
from app.core.tensorlite import Tensor3
from .block import GraphBlock

logger = logging.getLogger(__name__)


class ProbeCounter:
    """Thread-safe tally of probe forward passes."""

    def __init__(self):
        self._count = 0
        self._lock = Lock()

    def add(self, n: int = 1) -> None:
        with self._lock:
            self._count += n

    @property
    def count(self) -> int:
        with self._lock:
            return self._count


@dataclass(frozen=True)
class ProbeMask:
    """All-ones in ``channel``, zeros everywhere else."""

    channel: int
    shape: Tuple[int, int, int]

    def array(self) -> np.ndarray:
        mask = np.zeros(self.shape)
        mask[self.channel] = 1.0
        return mask


class ProbeSource(NamedTuple):
    """Which predecessor node a probe row activates, and where it lands."""

    block_id: int
    channel: int
    input_channel: int


@dataclass(frozen=True)
class EdgeScores:
    """Edge scores of one block: row k belongs to ``sources[k]``."""

    block_id: int
    sources: Tuple[ProbeSource, ...]
    omega: np.ndarray

    def edges(self) -> List[Tuple[Tuple[int, int], int, float]]:
        """``((src_block, src_channel), dst_channel, score)`` for every score > 0."""
        rows, cols = np.nonzero(self.omega > 0.0)
        return [
            (
                (self.sources[r].block_id, self.sources[r].channel),
                int(c),
                float(self.omega[r, c]),
            )
            for r, c in zip(rows, cols)
        ]


def _input_shape(block: GraphBlock) -> Tuple[int, int, int]:
    return (block.in_channels, block.resolution, block.resolution)


def probe_sources(block: GraphBlock) -> Tuple[ProbeSource, ...]:
    """One probe per real predecessor channel.

    Summed inputs probe every channel of every branch; concatenated inputs
    probe only the channels a predecessor actually owns, never the padding.
    """
    sources = []
    for link in block.predecessors:
        offset = link.channel_offset if link.mode is CombineMode.CONCAT else 0
        for channel in range(link.channels):
            sources.append(ProbeSource(link.block_id, channel, offset + channel))
    return tuple(sources)


def probe_block(
    block: GraphBlock, c: int, counter: Optional[ProbeCounter] = None
) -> Tensor3:
    if not 0 <= c < block.in_channels:
        raise ChannelOutOfRange(
            f"Block {block.block_id} has {block.in_channels} input channels, "
            f"cannot probe channel {c}."
        )
    mask = ProbeMask(c, _input_shape(block)).array()
    if counter is not None:
        counter.add(1)
    return Tensor3(block.forward_batch(mask[None])[0])


def edge_scores(
    block: GraphBlock,
    counter: Optional[ProbeCounter] = None,
    batched: bool = True,
) -> EdgeScores:
    """Spatially summed probe outputs, one row per probe source.

    With ``batched`` every probe of the block runs in a single forward call;
    rows match independent ``probe_block`` calls exactly.
    """
    sources = probe_sources(block)
    if not sources:
        return EdgeScores(block.block_id, (), np.zeros((0, block.out_channels)))

    if batched:
        stack = np.zeros((len(sources),) + _input_shape(block))
        for row, source in enumerate(sources):
            stack[row, source.input_channel] = 1.0
        if counter is not None:
            counter.add(len(sources))
        outputs = block.forward_batch(stack)
    else:
        outputs = np.stack(
            [probe_block(block, s.input_channel, counter).data for s in sources]
        )
    omega = outputs.sum(axis=(2, 3))
    logger.debug("Block %d: %d probes", block.block_id, len(sources))
    return EdgeScores(block.block_id, sources, omega)

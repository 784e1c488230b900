from .graph import ArchGraph, Node
from .block import (
    GraphBlock,
    KernelKind,
    KernelStep,
    PredecessorLink,
    conv_step,
    decompose,
    virtual_input_block,
)
from .probe import (
    EdgeScores,
    ProbeCounter,
    ProbeMask,
    ProbeSource,
    edge_scores,
    probe_block,
    probe_sources,
)
from .convert import assemble, convert, per_seed_scores, score_architecture
from .export import parse_dot, to_dot, to_tsv

__all__ = [
    "ArchGraph",
    "Node",
    "GraphBlock",
    "KernelKind",
    "KernelStep",
    "PredecessorLink",
    "conv_step",
    "decompose",
    "virtual_input_block",
    "EdgeScores",
    "ProbeCounter",
    "ProbeMask",
    "ProbeSource",
    "edge_scores",
    "probe_block",
    "probe_sources",
    "assemble",
    "convert",
    "per_seed_scores",
    "score_architecture",
    "parse_dot",
    "to_dot",
    "to_tsv",
]

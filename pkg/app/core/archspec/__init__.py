from .operations import OperationKind, OPERATION_ORDER
from .cell import (
    CellEdge,
    CellSpec,
    NB201_EDGE_SLOTS,
    count_operations,
    parse_adjacency_cell,
    parse_arch_text,
    parse_nb201_arch,
    render_nb201,
    sample_random_cell,
)
from .expand import (
    INPUT_CHANNELS,
    VIRTUAL_INPUT_ID,
    ArchitectureSpec,
    BlockDescriptor,
    BlockInput,
    BlockKind,
    CombineMode,
    SurrogateConfig,
    expand,
    node_widths,
)

__all__ = [
    "OperationKind",
    "OPERATION_ORDER",
    "CellEdge",
    "CellSpec",
    "NB201_EDGE_SLOTS",
    "count_operations",
    "parse_adjacency_cell",
    "parse_arch_text",
    "parse_nb201_arch",
    "render_nb201",
    "sample_random_cell",
    "INPUT_CHANNELS",
    "VIRTUAL_INPUT_ID",
    "ArchitectureSpec",
    "BlockDescriptor",
    "BlockInput",
    "BlockKind",
    "CombineMode",
    "SurrogateConfig",
    "expand",
    "node_widths",
]

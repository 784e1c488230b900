import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from app.core.archspec import (
    INPUT_CHANNELS,
    VIRTUAL_INPUT_ID,
    ArchitectureSpec,
    BlockDescriptor,
    BlockInput,
    BlockKind,
    CellEdge,
    CellSpec,
    CombineMode,
    NB201_EDGE_SLOTS,
    OPERATION_ORDER,
    OperationKind,
    SurrogateConfig,
    count_operations,
    expand,
    node_widths,
    parse_adjacency_cell,
    parse_arch_text,
    parse_nb201_arch,
    render_nb201,
    sample_random_cell,
)
from app.core.errors import (
    BadPredecessorIndex,
    DimensionMismatch,
    InvalidSurrogate,
    MalformedEncoding,
    NotUpperTriangular,
    UnknownOperation,
)
from tests.helpers import ALL_NONE, MIXED, NB101_CELL


def test_parse_nb201_edges():
    cell = parse_nb201_arch(MIXED)
    assert cell.node_count == 4
    assert cell.is_nb201
    assert cell.edge(0, 1) is OperationKind.CONV_3X3
    assert cell.edge(1, 2) is OperationKind.AVG_POOL_3X3
    assert cell.edge(1, 3) is OperationKind.NONE
    assert cell.edge(2, 3) is OperationKind.CONV_3X3
    assert render_nb201(cell) == MIXED


@pytest.mark.parametrize(
    "text, error",
    [
        ("|nor_conv_3x3~0|+|none~0|none~1|", MalformedEncoding),
        ("nor_conv_3x3~0|+|none~0|none~1|+|none~0|none~1|none~2|", MalformedEncoding),
        ("|conv5x5~0|+|none~0|none~1|+|none~0|none~1|none~2|", UnknownOperation),
        ("|none~1|+|none~0|none~1|+|none~0|none~1|none~2|", BadPredecessorIndex),
        ("|none~0|+|none~0|none~0|+|none~0|none~1|none~2|", MalformedEncoding),
        ("|none0|+|none~0|none~1|+|none~0|none~1|none~2|", MalformedEncoding),
    ],
)
def test_parse_nb201_rejects(text, error):
    with pytest.raises(error):
        parse_nb201_arch(text)


def test_errors_are_value_errors():
    with pytest.raises(ValueError):
        parse_nb201_arch("garbage")


def test_adjacency_with_nb101_labels():
    matrix = [
        [0, 1, 1, 0],
        [0, 0, 0, 1],
        [0, 0, 0, 1],
        [0, 0, 0, 0],
    ]
    cell = parse_adjacency_cell(matrix, ["input", "conv3x3-bn-relu", "maxpool3x3", "output"])
    assert cell.node_count == 4
    assert cell.edge(0, 1) is OperationKind.CONV_3X3
    assert cell.edge(0, 2) is OperationKind.AVG_POOL_3X3
    assert cell.edge(1, 3) is OperationKind.SKIP_CONNECT
    assert cell.edge(2, 3) is OperationKind.SKIP_CONNECT
    assert not cell.is_nb201


def test_adjacency_errors():
    with pytest.raises(NotUpperTriangular):
        parse_adjacency_cell([[0, 0], [1, 0]], ["input", "output"])
    with pytest.raises(DimensionMismatch):
        parse_adjacency_cell([[0, 1], [0, 0]], ["input"])
    with pytest.raises(DimensionMismatch):
        parse_adjacency_cell([[0, 1, 0], [0, 0]], ["input", "output"])
    with pytest.raises(MalformedEncoding):
        parse_adjacency_cell([[0, 2], [0, 0]], ["input", "output"])
    with pytest.raises(UnknownOperation):
        parse_adjacency_cell([[0, 1], [0, 0]], ["input", "conv7x7"])


def test_parse_arch_text_accepts_both_forms():
    assert parse_arch_text(f"  {MIXED}\n") == parse_nb201_arch(MIXED)
    payload = json.dumps({"matrix": [[0, 1], [0, 0]], "ops": ["input", "output"]})
    cell = parse_arch_text(payload)
    assert cell.edges == (CellEdge(0, 1, OperationKind.SKIP_CONNECT),)
    with pytest.raises(MalformedEncoding):
        parse_arch_text('{"matrix": [[0]]}')
    with pytest.raises(MalformedEncoding):
        parse_arch_text("{not json")


def test_cell_rejects_backward_and_duplicate_edges():
    with pytest.raises(BadPredecessorIndex):
        CellSpec(3, (CellEdge(2, 1, OperationKind.NONE),))
    with pytest.raises(MalformedEncoding):
        CellSpec(3, (CellEdge(0, 1, OperationKind.NONE), CellEdge(0, 1, OperationKind.NONE)))


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_cells_render_and_parse_back(seed):
    cell = sample_random_cell(seed)
    assert cell.is_nb201
    assert parse_nb201_arch(render_nb201(cell)) == cell


def test_sample_random_cell_is_deterministic():
    assert sample_random_cell(7) == sample_random_cell(7)


def test_count_operations():
    counts = count_operations([parse_nb201_arch(ALL_NONE), parse_nb201_arch(MIXED)])
    assert counts[OperationKind.NONE] == 7
    assert counts[OperationKind.CONV_3X3] == 2
    assert sum(counts.values()) == 12


def test_operation_aliases():
    assert OperationKind.from_name("NOR_CONV_1X1") is OperationKind.CONV_1X1
    with pytest.raises(UnknownOperation):
        OperationKind.from_name("sep_conv_3x3")


@pytest.mark.parametrize(
    "kwargs",
    [
        {"channels": 0},
        {"modules": 0},
        {"cells_per_module": -1},
        {"modules": 4, "probe_resolution": 4},
        {"channels": 2.5},
    ],
)
def test_surrogate_validation(kwargs):
    with pytest.raises(InvalidSurrogate):
        SurrogateConfig(**kwargs)


def test_expand_layout(mixed_cell):
    surrogate = SurrogateConfig(channels=4, cells_per_module=2, modules=3, probe_resolution=8)
    arch = expand(mixed_cell, surrogate)
    plan = arch.block_plan

    assert plan[0].kind is BlockKind.STEM
    assert plan[0].inputs == (BlockInput(VIRTUAL_INPUT_ID),)
    assert plan[0].in_channels == INPUT_CHANNELS
    assert plan[-1].kind is BlockKind.HEAD
    assert arch.count(BlockKind.REDUCTION) == 2
    assert arch.count(BlockKind.CELL_OP) == 6 * 2 * 3
    assert [b.block_id for b in plan] == list(range(1, len(plan) + 1))

    reductions = [b for b in plan if b.kind is BlockKind.REDUCTION]
    assert [(b.in_channels, b.out_channels, b.resolution) for b in reductions] == [
        (4, 8, 8),
        (8, 16, 4),
    ]
    assert (plan[-1].in_channels, plan[-1].resolution) == (16, 2)


def test_expand_wires_cell_nodes(mixed_cell, tiny):
    arch = expand(mixed_cell, tiny)
    ops = [b for b in arch.block_plan if b.kind is BlockKind.CELL_OP][:6]
    by_edge = {b.label.split("e")[-1]: b for b in ops}
    stem_id = arch.block_plan[0].block_id

    assert by_edge["0-1"].inputs == (BlockInput(stem_id),)
    # node 2 sums the 0->2 and 1->2 blocks
    assert {i.block_id for i in by_edge["2-3"].inputs} == {
        by_edge["0-2"].block_id,
        by_edge["1-2"].block_id,
    }
    assert by_edge["1-3"].op is OperationKind.NONE

    reduction = arch.block_plan[7]
    assert reduction.kind is BlockKind.REDUCTION
    assert {i.block_id for i in reduction.inputs} == {
        by_edge["0-3"].block_id,
        by_edge["1-3"].block_id,
        by_edge["2-3"].block_id,
    }


def test_architecture_spec_rejects_forward_references(mixed_cell, tiny):
    bad = BlockDescriptor(
        block_id=1,
        kind=BlockKind.STEM,
        in_channels=3,
        out_channels=2,
        resolution=4,
        inputs=(BlockInput(5),),
    )
    with pytest.raises(MalformedEncoding):
        ArchitectureSpec(mixed_cell, tiny, (bad,))


def test_random_cells_are_uniform_per_slot():
    draws = 10_000
    counts = np.zeros((len(NB201_EDGE_SLOTS), len(OPERATION_ORDER)), dtype=int)
    index = {op: i for i, op in enumerate(OPERATION_ORDER)}
    for seed in range(draws):
        for slot, op in enumerate(sample_random_cell(seed).operations()):
            counts[slot, index[op]] += 1
    p = 1.0 / len(OPERATION_ORDER)
    sigma = np.sqrt(draws * p * (1 - p))
    assert np.all(np.abs(counts - draws * p) <= 5 * sigma)


def test_random_cells_differ_across_seeds():
    cells = {render_nb201(sample_random_cell(seed)) for seed in range(100)}
    assert len(cells) >= 95


def test_expand_minimal_plan(mixed_cell):
    surrogate = SurrogateConfig(channels=1, cells_per_module=1, modules=1, probe_resolution=4)
    plan = expand(mixed_cell, surrogate).block_plan
    assert [b.kind for b in plan] == [BlockKind.STEM] + [BlockKind.CELL_OP] * 6 + [BlockKind.HEAD]
    assert all(b.out_channels == 1 for b in plan)


def test_expand_default_surrogate(mixed_cell):
    arch = expand(mixed_cell, SurrogateConfig())
    assert (arch.surrogate.channels, arch.surrogate.cells_per_module, arch.surrogate.modules) == (
        16,
        1,
        3,
    )
    assert len(arch.block_plan) == 1 + 6 * 3 + 2 + 1
    assert arch.count(BlockKind.REDUCTION) == 2
    head = arch.block_plan[-1]
    assert (head.in_channels, head.resolution) == (64, 8)
    assert expand(mixed_cell, SurrogateConfig()).block_plan == arch.block_plan


def test_adjacency_cells_concatenate_at_output():
    cell = parse_arch_text(NB101_CELL)
    assert cell.concat_output
    assert not parse_nb201_arch(MIXED).concat_output

    widths, shares = node_widths(cell, 5)
    assert shares == {1: 3, 2: 2}
    assert widths == {0: 5, 1: 3, 2: 2, 3: 5}


def test_node_widths_follow_successors():
    matrix = [
        [0, 1, 0, 0, 1],
        [0, 0, 1, 1, 0],
        [0, 0, 0, 0, 1],
        [0, 0, 0, 0, 1],
        [0, 0, 0, 0, 0],
    ]
    labels = ["input", "conv1x1-bn-relu", "conv3x3-bn-relu", "maxpool3x3", "output"]
    widths, shares = node_widths(parse_adjacency_cell(matrix, labels), 5)
    assert shares == {0: 2, 2: 2, 3: 1}
    assert widths[1] == 2
    assert node_widths(parse_nb201_arch(MIXED), 4) == ({0: 4, 1: 4, 2: 4, 3: 4}, {})

    with pytest.raises(InvalidSurrogate):
        node_widths(parse_adjacency_cell(matrix, labels), 2)


def test_expand_concatenating_cell(tiny):
    arch = expand(parse_arch_text(NB101_CELL), tiny)
    ops = [b for b in arch.block_plan if b.kind is BlockKind.CELL_OP][:4]
    assert [(b.in_channels, b.out_channels) for b in ops] == [(2, 1), (2, 1), (1, 1), (1, 1)]
    reduction = next(b for b in arch.block_plan if b.kind is BlockKind.REDUCTION)
    assert reduction.inputs == (
        BlockInput(ops[2].block_id, CombineMode.CONCAT, 0),
        BlockInput(ops[3].block_id, CombineMode.CONCAT, 1),
    )

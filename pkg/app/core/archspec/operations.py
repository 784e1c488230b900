from enum import Enum
from typing import Optional

from app.core.errors import UnknownOperation


class OperationKind(Enum):
    """Candidate operations on a cell edge.

    Values are the NAS-Bench-201 operation names. The set is closed at
    runtime; adding a variant also needs a block form in
    ``app.core.graphify.block``.
    """

    NONE = "none"
    SKIP_CONNECT = "skip_connect"
    CONV_1X1 = "nor_conv_1x1"
    CONV_3X3 = "nor_conv_3x3"
    AVG_POOL_3X3 = "avg_pool_3x3"

    @classmethod
    def from_name(cls, name: str) -> "OperationKind":
        op = _ALIASES.get(name.strip().lower())
        if op is None:
            raise UnknownOperation(f"Unknown operation: {name!r}")
        return op


# Canonical order used by frequency histograms and random sampling.
OPERATION_ORDER = tuple(OperationKind)

_ALIASES = {op.value: op for op in OperationKind}
# NAS-Bench-101 vocabulary. Max and average pooling produce the same probe
# topology on non-negative one-hot inputs, so maxpool maps onto AVG_POOL_3X3.
_ALIASES.update(
    {
        "conv3x3-bn-relu": OperationKind.CONV_3X3,
        "conv1x1-bn-relu": OperationKind.CONV_1X1,
        "maxpool3x3": OperationKind.AVG_POOL_3X3,
    }
)

# Adjacency-encoding node markers; edges into them are plain skips.
NODE_MARKERS = frozenset({"input", "output"})


def resolve_label(label) -> Optional[OperationKind]:
    """Map an adjacency node label to its operation, None for io markers."""
    if isinstance(label, OperationKind):
        return label
    if not isinstance(label, str):
        raise UnknownOperation(f"Unknown operation: {label!r}")
    if label.strip().lower() in NODE_MARKERS:
        return None
    return OperationKind.from_name(label)

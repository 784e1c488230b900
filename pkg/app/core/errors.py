class NASGraphError(ValueError):
    """Base class for every input-level failure raised by the pipeline."""

    pass


# archspec
class MalformedEncoding(NASGraphError):
    """The architecture string does not follow the cell grammar."""

    pass


class UnknownOperation(NASGraphError):
    """An operation name is not part of the search space."""

    pass


class BadPredecessorIndex(NASGraphError):
    """A cell edge points at a node that is not an earlier node."""

    pass


class NotUpperTriangular(NASGraphError):
    """An adjacency matrix has entries on or below the diagonal."""

    pass


class DimensionMismatch(NASGraphError):
    """Adjacency matrix and label list disagree on the node count."""

    pass


class InvalidSurrogate(NASGraphError):
    """Surrogate configuration values are out of range."""

    pass


# tensorlite
class ShapeMismatch(NASGraphError):
    """Tensor shapes are incompatible with the requested kernel."""

    pass


# graphify
class ChannelOutOfRange(NASGraphError):
    """A probe targets a channel the block does not have."""

    pass


# measures
class EmptyGraph(NASGraphError):
    """The graph has no nodes."""

    pass


class DegenerateGraph(NASGraphError):
    """The graph has fewer than two nodes."""

    pass


class EmptyEdgeSet(NASGraphError):
    """The graph has no edges."""

    pass


# ranker
class EmptyInput(NASGraphError):
    """No scores were given."""

    pass


class NonFiniteScore(NASGraphError):
    """A score is NaN or infinite."""

    pass


class LengthMismatch(NASGraphError):
    """Paired vectors have different lengths."""

    pass


class DegenerateInput(NASGraphError):
    """A vector is constant, so its rank correlation is undefined."""

    pass


class MismatchedUniverse(NASGraphError):
    """Two rankings cover different architecture sets."""

    pass


# search
class PoolTooSmall(NASGraphError):
    """The pool holds fewer architectures than the sample size."""

    pass


# harness
class BenchmarkIOError(NASGraphError):
    """The benchmark file could not be read."""

    pass


class UnknownDataset(NASGraphError):
    """No record carries accuracies for the requested dataset."""

    pass


class RecordError(NASGraphError):
    """A benchmark line failed validation."""

    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class MalformedRecord(RecordError):
    pass


class InvalidArch(RecordError):
    pass


class AccuracyOutOfRange(RecordError):
    pass

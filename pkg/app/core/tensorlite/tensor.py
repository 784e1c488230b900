from dataclasses import dataclass

import numpy as np

from app.core.errors import ShapeMismatch


@dataclass(frozen=True, eq=False)
class Tensor3:
    """An immutable C x H x W float64 activation."""

    data: np.ndarray

    def __post_init__(self):
        data = np.array(self.data, dtype=np.float64)
        if data.ndim != 3:
            raise ShapeMismatch(f"Tensor3 needs 3 dims, got shape {data.shape}.")
        if data.shape[1] < 1 or data.shape[2] < 1:
            raise ShapeMismatch(f"Tensor3 needs positive H and W, got {data.shape}.")
        if not np.isfinite(data).all():
            raise ValueError("Tensor3 data must be finite.")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def zeros(cls, channels: int, height: int, width: int) -> "Tensor3":
        return cls(np.zeros((channels, height, width)))

    @classmethod
    def ones(cls, channels: int, height: int, width: int) -> "Tensor3":
        return cls(np.ones((channels, height, width)))

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape

    def __eq__(self, other) -> bool:
        if not isinstance(other, Tensor3):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.shape, self.data.tobytes()))


@dataclass(frozen=True, eq=False)
class ConvParams:
    """Convolution weights ``[out][in][kh][kw]`` with per-output bias."""

    weights: np.ndarray
    bias: np.ndarray
    stride: int = 1
    padding: int = 0

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        bias = np.asarray(self.bias, dtype=np.float64)
        if weights.ndim != 4 or 0 in weights.shape:
            raise ShapeMismatch(
                f"Conv weights need shape [out][in][kh][kw], got {weights.shape}."
            )
        if bias.shape != (weights.shape[0],):
            raise ShapeMismatch(
                f"Bias length {bias.shape} does not match {weights.shape[0]} outputs."
            )
        if self.stride < 1 or self.padding < 0:
            raise ShapeMismatch(
                f"Invalid stride {self.stride} / padding {self.padding}."
            )
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "bias", bias)

    @property
    def out_channels(self) -> int:
        return self.weights.shape[0]

    @property
    def in_channels(self) -> int:
        return self.weights.shape[1]

    @property
    def kernel_h(self) -> int:
        return self.weights.shape[2]

    @property
    def kernel_w(self) -> int:
        return self.weights.shape[3]

    def scaled(self, factor: float) -> "ConvParams":
        return ConvParams(self.weights * factor, self.bias * factor, self.stride, self.padding)

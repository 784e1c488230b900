"""Forward-only kernels.

Every kernel has a batched form working on ``[B][C][H][W]`` arrays and a
``Tensor3`` form that runs the batched form on a batch of one, so single and
batched probes share one code path. Accumulation is float64 throughout.
"""

import math
from typing import Sequence, Tuple, Union

import numpy as np

from app.core.errors import ShapeMismatch
from .tensor import ConvParams, Tensor3


def _output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def _check_batch(x: np.ndarray) -> None:
    if x.ndim != 4:
        raise ShapeMismatch(f"Batched kernels need [B][C][H][W], got shape {x.shape}.")


def conv2d_batch(x: np.ndarray, p: ConvParams) -> np.ndarray:
    _check_batch(x)
    batch, channels, height, width = x.shape
    if channels != p.in_channels:
        raise ShapeMismatch(
            f"Input has {channels} channels, convolution expects {p.in_channels}."
        )
    out_h = _output_size(height, p.kernel_h, p.stride, p.padding)
    out_w = _output_size(width, p.kernel_w, p.stride, p.padding)
    if out_h < 1 or out_w < 1:
        raise ShapeMismatch(
            f"{height}x{width} input is too small for a {p.kernel_h}x{p.kernel_w} "
            f"kernel with padding {p.padding}."
        )

    pad = p.padding
    padded = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    out = np.zeros((batch, p.out_channels, out_h, out_w))
    row_span = p.stride * (out_h - 1) + 1
    col_span = p.stride * (out_w - 1) + 1
    for i in range(p.kernel_h):
        for j in range(p.kernel_w):
            window = padded[:, :, i : i + row_span : p.stride, j : j + col_span : p.stride]
            # [B][Ho][Wo][out] -> [B][out][Ho][Wo]
            out += np.moveaxis(
                np.tensordot(window, p.weights[:, :, i, j], axes=([1], [1])), -1, 1
            )
    out += p.bias[None, :, None, None]
    return out


def relu_batch(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0.0, x, 0.0)


def avg_pool_batch(x: np.ndarray, kernel: int, stride: int, padding: int) -> np.ndarray:
    """Average pooling that excludes padded positions from the count."""
    _check_batch(x)
    _, _, height, width = x.shape
    if kernel < 1 or stride < 1 or padding < 0 or 2 * padding > kernel:
        raise ShapeMismatch(
            f"Invalid pooling kernel {kernel} / stride {stride} / padding {padding}."
        )
    out_h = _output_size(height, kernel, stride, padding)
    out_w = _output_size(width, kernel, stride, padding)
    if out_h < 1 or out_w < 1:
        raise ShapeMismatch(
            f"{height}x{width} input is too small for a {kernel}x{kernel} pool."
        )

    pad = ((padding, padding), (padding, padding))
    padded = np.pad(x, ((0, 0), (0, 0)) + pad)
    support = np.pad(np.ones((height, width)), pad)
    sums = np.zeros(x.shape[:2] + (out_h, out_w))
    counts = np.zeros((out_h, out_w))
    row_span = stride * (out_h - 1) + 1
    col_span = stride * (out_w - 1) + 1
    for i in range(kernel):
        for j in range(kernel):
            rows = slice(i, i + row_span, stride)
            cols = slice(j, j + col_span, stride)
            sums += padded[:, :, rows, cols]
            counts += support[rows, cols]
    return sums / counts


def global_avg_pool_batch(x: np.ndarray) -> np.ndarray:
    _check_batch(x)
    return x.mean(axis=(2, 3), keepdims=True)


def conv2d(x: Tensor3, p: ConvParams) -> Tensor3:
    return Tensor3(conv2d_batch(x.data[None], p)[0])


def relu(x: Tensor3) -> Tensor3:
    return Tensor3(relu_batch(x.data))


def avg_pool(x: Tensor3, kernel: int, stride: int, padding: int) -> Tensor3:
    return Tensor3(avg_pool_batch(x.data[None], kernel, stride, padding)[0])


def global_avg_pool(x: Tensor3) -> Tensor3:
    return Tensor3(global_avg_pool_batch(x.data[None])[0])


def elementwise_sum(xs: Sequence[Tensor3]) -> Tensor3:
    if not xs:
        raise ShapeMismatch("Cannot sum an empty list of tensors.")
    shape = xs[0].shape
    total = np.zeros(shape)
    for x in xs:
        if x.shape != shape:
            raise ShapeMismatch(f"Cannot sum shapes {shape} and {x.shape}.")
        total = total + x.data
    return Tensor3(total)


def channel_concat(xs: Sequence[Tensor3]) -> Tensor3:
    if not xs:
        raise ShapeMismatch("Cannot concatenate an empty list of tensors.")
    spatial = xs[0].shape[1:]
    for x in xs:
        if x.shape[1:] != spatial:
            raise ShapeMismatch(
                f"Cannot concatenate spatial shapes {spatial} and {x.shape[1:]}."
            )
    return Tensor3(np.concatenate([x.data for x in xs], axis=0))


def gaussian_init(
    shape: Tuple[int, ...], seed: Union[int, Sequence[int]], std: float
) -> np.ndarray:
    """I.i.d. N(0, std^2) draws from numpy's PCG64 generator.

    ``seed`` may be an int or a sequence of ints (hashed by ``SeedSequence``),
    so callers can key draws by several integers at once.
    """
    if not math.isfinite(std) or std < 0:
        raise ValueError(f"std must be a finite non-negative number, got {std}")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    return rng.standard_normal(size=shape) * std

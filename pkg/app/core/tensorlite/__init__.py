from .tensor import ConvParams, Tensor3
from .kernels import (
    avg_pool,
    avg_pool_batch,
    channel_concat,
    conv2d,
    conv2d_batch,
    elementwise_sum,
    gaussian_init,
    global_avg_pool,
    global_avg_pool_batch,
    relu,
    relu_batch,
)

__all__ = [
    "ConvParams",
    "Tensor3",
    "avg_pool",
    "avg_pool_batch",
    "channel_concat",
    "conv2d",
    "conv2d_batch",
    "elementwise_sum",
    "gaussian_init",
    "global_avg_pool",
    "global_avg_pool_batch",
    "relu",
    "relu_batch",
]

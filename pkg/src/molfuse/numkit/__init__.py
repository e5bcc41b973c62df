from molfuse.numkit.tensor import (
    Tensor,
    add,
    assert_finite,
    backward,
    clip,
    div,
    exp,
    log,
    matmul,
    mul,
    neg,
    relu,
    reshape,
    sigmoid,
    softmax,
    sqrt,
    sub,
    tanh,
    tensor,
    tmean,
    transpose,
    tsum,
)
from molfuse.numkit.optim import AdamState, PlateauScheduler, adam_step

__all__ = [
    "Tensor", "tensor", "add", "sub", "mul", "div", "neg", "matmul",
    "tanh", "sigmoid", "relu", "exp", "log", "sqrt", "clip",
    "tsum", "tmean", "reshape", "transpose", "softmax", "backward",
    "assert_finite", "AdamState", "adam_step", "PlateauScheduler",
]

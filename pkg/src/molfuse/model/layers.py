"""Parameterized layers over the autodiff tape.

Parameters live in a flat dict keyed by canonical dotted names; each layer
is a pair of functions: add_* registers freshly initialized tensors under a
prefix, and the forward function reads them back. Initialization draws from
a caller-supplied numpy Generator so whole-model setup is reproducible from
one seed.
"""

from __future__ import annotations

import numpy as np

from molfuse import numkit as nk
from molfuse.errors import ShapeError
from molfuse.numkit import Tensor

Params = dict[str, Tensor]


def add_linear(params: Params, rng: np.random.Generator, prefix: str,
               fan_in: int, fan_out: int) -> None:
    bound = 1.0 / np.sqrt(fan_in)
    params[f"{prefix}.weight"] = Tensor(
        rng.uniform(-bound, bound, size=(fan_in, fan_out)), requires_grad=True)
    params[f"{prefix}.bias"] = Tensor(
        rng.uniform(-bound, bound, size=(fan_out,)), requires_grad=True)


def linear(params: Params, prefix: str, x: Tensor) -> Tensor:
    return x @ params[f"{prefix}.weight"] + params[f"{prefix}.bias"]


def add_layer_norm(params: Params, prefix: str, width: int) -> None:
    params[f"{prefix}.gamma"] = Tensor(np.ones(width), requires_grad=True)
    params[f"{prefix}.beta"] = Tensor(np.zeros(width), requires_grad=True)


def layer_norm(params: Params, prefix: str, x: Tensor, eps: float = 1e-5) -> Tensor:
    mu = nk.tmean(x, axis=-1, keepdims=True)
    centered = x - mu
    var = nk.tmean(centered * centered, axis=-1, keepdims=True)
    normed = centered / nk.sqrt(var + eps)
    return normed * params[f"{prefix}.gamma"] + params[f"{prefix}.beta"]


def add_attention(params: Params, rng: np.random.Generator, prefix: str, width: int) -> None:
    for name in ("q", "k", "v", "out"):
        add_linear(params, rng, f"{prefix}.{name}", width, width)


def attention(params: Params, prefix: str, query: Tensor, key: Tensor, value: Tensor,
              heads: int, key_mask: np.ndarray | None = None) -> tuple[Tensor, Tensor]:
    """Scaled dot-product multi-head attention.

    query: (n, d); key/value: (m, d); key_mask: (m,) booleans, True = usable.
    Returns (output (n, d), attention weights (heads, n, m))."""
    n, d = query.shape
    m = key.shape[0]
    if d % heads != 0:
        raise ShapeError(f"width {d} not divisible by {heads} heads")
    dh = d // heads

    def split(t: Tensor, length: int) -> Tensor:
        return nk.transpose(nk.reshape(t, (length, heads, dh)), (1, 0, 2))

    q = split(linear(params, f"{prefix}.q", query), n)  # (H, n, dh)
    k = split(linear(params, f"{prefix}.k", key), m)  # (H, m, dh)
    v = split(linear(params, f"{prefix}.v", value), m)
    scores = (q @ nk.transpose(k, (0, 2, 1))) * (1.0 / np.sqrt(dh))  # (H, n, m)
    weights = nk.softmax(scores, axis=-1, mask=key_mask)
    context = weights @ v  # (H, n, dh)
    merged = nk.reshape(nk.transpose(context, (1, 0, 2)), (n, d))
    return linear(params, f"{prefix}.out", merged), weights


def add_ffn(params: Params, rng: np.random.Generator, prefix: str,
            width: int, expansion: int = 4) -> None:
    add_linear(params, rng, f"{prefix}.fc1", width, width * expansion)
    add_linear(params, rng, f"{prefix}.fc2", width * expansion, width)


def ffn(params: Params, prefix: str, x: Tensor) -> Tensor:
    return linear(params, f"{prefix}.fc2", nk.relu(linear(params, f"{prefix}.fc1", x)))


def dropout(x: Tensor, p: float, rng: np.random.Generator | None) -> Tensor:
    """Inverted dropout; identity when rng is None (eval mode) or p == 0."""
    if rng is None or p <= 0.0:
        return x
    keep = (rng.random(x.shape) >= p) / (1.0 - p)
    return x * Tensor(keep)

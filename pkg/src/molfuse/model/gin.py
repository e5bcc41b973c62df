"""Graph isomorphism network encoder."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from molfuse import numkit as nk
from molfuse.errors import ConfigError, DataError
from molfuse.model.layers import Params, add_linear, linear
from molfuse.numkit import Tensor


@dataclass
class GinConfig:
    num_layers: int = 5
    hidden: int = 128
    input_dim: int = 30

    def __post_init__(self):
        if self.num_layers < 1:
            raise ConfigError(f"GIN needs at least one layer, got {self.num_layers}")
        if self.hidden <= 0 or self.input_dim <= 0:
            raise ConfigError("GIN widths must be positive")


def add_gin(params: Params, rng: np.random.Generator, cfg: GinConfig,
            prefix: str = "gin") -> None:
    for k in range(cfg.num_layers):
        width_in = cfg.input_dim if k == 0 else cfg.hidden
        params[f"{prefix}.layer{k}.eps"] = Tensor(np.zeros(()), requires_grad=True)
        add_linear(params, rng, f"{prefix}.layer{k}.mlp.fc1", width_in, cfg.hidden)
        add_linear(params, rng, f"{prefix}.layer{k}.mlp.fc2", cfg.hidden, cfg.hidden)


def gin_forward(params: Params, cfg: GinConfig, features: np.ndarray,
                edges: list[tuple[int, int]], prefix: str = "gin") -> tuple[Tensor, Tensor]:
    """K rounds of h_v <- MLP((1 + eps) * h_v + sum of neighbor h_u), then a
    mean-pooled graph vector. Returns (node embeddings |V| x d_g, pooled d_g)."""
    features = np.asarray(features, dtype=np.float64)
    if features.ndim != 2 or features.shape[0] == 0:
        raise DataError(f"graph features must be |V| x F with |V| >= 1, got {features.shape}")
    n = features.shape[0]
    adjacency = np.zeros((n, n))
    for i, j in edges:
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise DataError(f"edge ({i}, {j}) invalid for {n} nodes")
        adjacency[i, j] = 1.0
        adjacency[j, i] = 1.0
    adj = Tensor(adjacency)
    h = Tensor(features)
    for k in range(cfg.num_layers):
        eps = params[f"{prefix}.layer{k}.eps"]
        agg = h * (eps + 1.0) + adj @ h
        hidden = nk.relu(linear(params, f"{prefix}.layer{k}.mlp.fc1", agg))
        h = linear(params, f"{prefix}.layer{k}.mlp.fc2", hidden)
    pooled = nk.tmean(h, axis=0)
    return h, pooled

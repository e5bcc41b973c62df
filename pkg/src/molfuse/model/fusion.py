"""Gated cross-attention fusion of molecular and chemist-knowledge tokens."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from molfuse import numkit as nk
from molfuse.errors import ConfigError, MaskError, ShapeError
from molfuse.model.layers import (
    Params,
    add_attention,
    add_ffn,
    add_layer_norm,
    attention,
    ffn,
    layer_norm,
)
from molfuse.numkit import Tensor


@dataclass
class FusionConfig:
    width: int = 128  # shared token width d
    heads: int = 4
    ffn_expansion: int = 4
    num_blocks: int = 1

    def __post_init__(self):
        if self.width % self.heads != 0:
            raise ConfigError(
                f"fusion width {self.width} must be divisible by heads {self.heads}")
        if self.num_blocks < 1:
            raise ConfigError("fusion needs at least one block")


def add_fusion(params: Params, rng: np.random.Generator, cfg: FusionConfig,
               prefix: str = "fusion") -> None:
    for b in range(cfg.num_blocks):
        base = f"{prefix}.block{b}"
        add_layer_norm(params, f"{base}.ln_xattn", cfg.width)
        add_attention(params, rng, f"{base}.xattn", cfg.width)
        params[f"{base}.alpha_xattn"] = Tensor(np.zeros(()), requires_grad=True)
        add_layer_norm(params, f"{base}.ln_gff", cfg.width)
        add_ffn(params, rng, f"{base}.gff", cfg.width, cfg.ffn_expansion)
        params[f"{base}.alpha_dense"] = Tensor(np.zeros(()), requires_grad=True)
        add_layer_norm(params, f"{base}.ln_self", cfg.width)
        add_attention(params, rng, f"{base}.selfattn", cfg.width)
        add_layer_norm(params, f"{base}.ln_ff", cfg.width)
        add_ffn(params, rng, f"{base}.ff", cfg.width, cfg.ffn_expansion)


def fusion_forward(
    params: Params,
    cfg: FusionConfig,
    mol_tokens: Tensor,
    chem_tokens: Tensor,
    chem_mask: np.ndarray,
    mol_mask: np.ndarray | None = None,
    prefix: str = "fusion",
) -> tuple[Tensor, np.ndarray]:
    """Per-block: cross-attention with the chem padding mask, tanh-gated
    residual, tanh-gated feedforward residual, then ungated self-attention and
    feedforward residuals. Pre-norm on each sub-block input; key/value tokens
    enter unnormalized. Returns (fused n x d, cross-attention weights n x m
    averaged over heads, from the last block)."""
    if mol_tokens.shape[-1] != cfg.width or chem_tokens.shape[-1] != cfg.width:
        raise ShapeError(
            f"token width mismatch: mol {mol_tokens.shape}, chem {chem_tokens.shape}, "
            f"fusion width {cfg.width}")
    chem_mask = np.asarray(chem_mask, dtype=bool)
    if chem_mask.shape != (chem_tokens.shape[0],):
        raise ShapeError(
            f"chem mask shape {chem_mask.shape} does not match {chem_tokens.shape[0]} tokens")
    if not chem_mask.any():
        raise MaskError("chemist knowledge sequence is fully masked")

    h = mol_tokens
    cross_weights: np.ndarray | None = None
    for b in range(cfg.num_blocks):
        base = f"{prefix}.block{b}"
        attended, weights = attention(
            params, f"{base}.xattn", layer_norm(params, f"{base}.ln_xattn", h),
            chem_tokens, chem_tokens, cfg.heads, key_mask=chem_mask)
        h = h + nk.tanh(params[f"{base}.alpha_xattn"]) * attended
        h = h + nk.tanh(params[f"{base}.alpha_dense"]) * ffn(
            params, f"{base}.gff", layer_norm(params, f"{base}.ln_gff", h))
        normed = layer_norm(params, f"{base}.ln_self", h)
        self_attended, _ = attention(
            params, f"{base}.selfattn", normed, normed, normed,
            cfg.heads, key_mask=mol_mask)
        h = h + self_attended
        h = h + ffn(params, f"{base}.ff", layer_norm(params, f"{base}.ln_ff", h))
        cross_weights = weights.data.mean(axis=0)
    return h, cross_weights

"""Graph encoder, gated cross-attention fusion, heads, and checkpoints."""

from molfuse.model.gin import GinConfig, add_gin, gin_forward
from molfuse.model.fusion import FusionConfig, add_fusion, fusion_forward
from molfuse.model.layers import (
    Params,
    add_attention,
    add_ffn,
    add_layer_norm,
    add_linear,
    attention,
    dropout,
    ffn,
    layer_norm,
    linear,
)
from molfuse.model.network import (
    CLASSIFICATION,
    REGRESSION,
    VARIANTS,
    HeadConfig,
    Model,
    bce_loss,
    build_variant,
    model_forward,
    mse_loss,
    predict,
    sample_loss,
)
from molfuse.model.checkpoint import load_checkpoint, save_checkpoint

__all__ = [
    "CLASSIFICATION",
    "FusionConfig",
    "GinConfig",
    "HeadConfig",
    "Model",
    "Params",
    "REGRESSION",
    "VARIANTS",
    "add_attention",
    "add_ffn",
    "add_fusion",
    "add_gin",
    "add_layer_norm",
    "add_linear",
    "attention",
    "bce_loss",
    "build_variant",
    "dropout",
    "ffn",
    "fusion_forward",
    "gin_forward",
    "layer_norm",
    "linear",
    "load_checkpoint",
    "model_forward",
    "mse_loss",
    "predict",
    "sample_loss",
    "save_checkpoint",
]

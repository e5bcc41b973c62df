"""Model assembly: ablation variants, prediction head, and losses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from molfuse import numkit as nk
from molfuse.errors import ConfigError, DataError, ShapeError
from molfuse.knowledge import KnowledgeEmbedding
from molfuse.model.fusion import FusionConfig, add_fusion, fusion_forward
from molfuse.model.gin import GinConfig, add_gin, gin_forward
from molfuse.model.layers import Params, add_linear, dropout, linear
from molfuse.numkit import Tensor

VARIANTS = ("full", "gin_only", "chem_only")

CLASSIFICATION = "classification"
REGRESSION = "regression"


@dataclass
class HeadConfig:
    input_dim: int = 128
    tasks: int = 1
    task_type: str = CLASSIFICATION
    dropout: float = 0.5

    def __post_init__(self):
        if self.task_type not in (CLASSIFICATION, REGRESSION):
            raise ConfigError(f"unknown task type {self.task_type!r}")
        if self.tasks < 1:
            raise ConfigError("head needs at least one task")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError(f"dropout must be in [0, 1), got {self.dropout}")


@dataclass
class Model:
    variant: str
    gin_cfg: GinConfig
    fusion_cfg: FusionConfig
    head_cfg: HeadConfig
    knowledge_dim: int
    params: Params = field(repr=False)

    def param_names(self) -> list[str]:
        return sorted(self.params)

    def eval_clone(self) -> "Model":
        return self


def _add_head(params: Params, rng: np.random.Generator, cfg: HeadConfig) -> None:
    hidden = max(cfg.input_dim // 2, 1)
    add_linear(params, rng, "head.fc1", cfg.input_dim, hidden)
    add_linear(params, rng, "head.fc2", hidden, cfg.tasks)


def build_variant(
    tag: str,
    gin_cfg: GinConfig | None = None,
    fusion_cfg: FusionConfig | None = None,
    head_cfg: HeadConfig | None = None,
    knowledge_dim: int = 64,
    seed: int = 0,
) -> Model:
    if tag not in VARIANTS:
        raise ConfigError(f"unknown variant {tag!r}; expected one of {VARIANTS}")
    gin_cfg = gin_cfg or GinConfig()
    fusion_cfg = fusion_cfg or FusionConfig()
    head_cfg = head_cfg or HeadConfig()

    expected_head_in = {
        "full": fusion_cfg.width,
        "gin_only": gin_cfg.hidden,
        "chem_only": fusion_cfg.width,
    }[tag]
    if head_cfg.input_dim != expected_head_in:
        head_cfg = HeadConfig(
            input_dim=expected_head_in, tasks=head_cfg.tasks,
            task_type=head_cfg.task_type, dropout=head_cfg.dropout)

    rng = np.random.default_rng(seed)
    params: Params = {}
    if tag in ("full", "gin_only"):
        add_gin(params, rng, gin_cfg)
    if tag == "full":
        add_linear(params, rng, "mol_proj", gin_cfg.hidden, fusion_cfg.width)
    if tag in ("full", "chem_only"):
        add_linear(params, rng, "know_proj", knowledge_dim, fusion_cfg.width)
    if tag == "full":
        add_fusion(params, rng, fusion_cfg)
    _add_head(params, rng, head_cfg)
    return Model(
        variant=tag, gin_cfg=gin_cfg, fusion_cfg=fusion_cfg, head_cfg=head_cfg,
        knowledge_dim=knowledge_dim, params=params)


def model_forward(
    model: Model,
    features: np.ndarray | None,
    edges: list[tuple[int, int]] | None,
    chem: KnowledgeEmbedding | None,
    training: bool = False,
    dropout_rng: np.random.Generator | None = None,
) -> tuple[Tensor, dict]:
    """Run one molecule through the variant's pathway.

    Returns (per-task outputs (T,), aux). Classification outputs are sigmoid
    probabilities; regression outputs are raw standardized-space values.
    aux carries the head-input vector and, for the full variant, the
    cross-attention weight matrix (n x m, averaged over heads)."""
    params = model.params
    aux: dict = {"cross_attention": None}

    if model.variant in ("full", "gin_only"):
        if features is None or edges is None:
            raise DataError(f"variant {model.variant!r} needs a molecular graph")
    if model.variant in ("full", "chem_only"):
        if chem is None:
            raise DataError(f"variant {model.variant!r} needs a knowledge embedding")
        if chem.d_k != model.knowledge_dim:
            raise ShapeError(
                f"knowledge width {chem.d_k} does not match model width "
                f"{model.knowledge_dim}")

    if model.variant == "full":
        nodes, _ = gin_forward(params, model.gin_cfg, features, edges)
        mol_tokens = linear(params, "mol_proj", nodes)
        chem_tokens = linear(params, "know_proj", Tensor(chem.tokens))
        fused, cross = fusion_forward(
            params, model.fusion_cfg, mol_tokens, chem_tokens, chem.mask)
        pooled = nk.tmean(fused, axis=0)
        aux["cross_attention"] = cross
        aux["mol_pooled"] = mol_tokens.data.mean(axis=0)
        aux["chem_pooled"] = chem.tokens[chem.mask].mean(axis=0)
    elif model.variant == "gin_only":
        _, pooled = gin_forward(params, model.gin_cfg, features, edges)
        aux["mol_pooled"] = pooled.data.copy()
    else:  # chem_only
        mean_vec = chem.tokens[chem.mask].mean(axis=0, keepdims=True)  # frozen input
        pooled = nk.reshape(
            linear(params, "know_proj", Tensor(mean_vec)), (model.fusion_cfg.width,))
        aux["chem_pooled"] = mean_vec[0].copy()

    aux["head_input"] = pooled.data.copy()
    x = nk.reshape(pooled, (1, model.head_cfg.input_dim))
    hidden = nk.relu(linear(params, "head.fc1", x))
    hidden = dropout(hidden, model.head_cfg.dropout if training else 0.0, dropout_rng)
    out = nk.reshape(linear(params, "head.fc2", hidden), (model.head_cfg.tasks,))
    if model.head_cfg.task_type == CLASSIFICATION:
        out = nk.sigmoid(out)
    return out, aux


def predict(model: Model, features, edges, chem) -> np.ndarray:
    """Eval-mode forward; deterministic (dropout off)."""
    outputs, _ = model_forward(model, features, edges, chem, training=False)
    return outputs.data.copy()


def _task_weights(shape: tuple, mask: np.ndarray | None) -> np.ndarray:
    """Per-task averaging weights; masked-out tasks get exactly zero weight."""
    if mask is None:
        return np.full(shape, 1.0 / int(np.prod(shape)))
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != shape:
        raise ShapeError(f"label mask shape {mask.shape} does not match {shape}")
    present = int(mask.sum())
    if present == 0:
        raise DataError("sample has no labelled tasks")
    weights = np.zeros(shape)
    weights[mask] = 1.0 / present
    return weights


def bce_loss(probs: Tensor, labels: np.ndarray, mask: np.ndarray | None = None) -> Tensor:
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != probs.shape:
        raise ShapeError(
            f"labels shape {labels.shape} does not match outputs {probs.shape}")
    weights = _task_weights(labels.shape, mask)
    checked = labels if mask is None else labels[np.asarray(mask, dtype=bool)]
    if not np.isin(checked, (0.0, 1.0)).all():
        bad = checked[~np.isin(checked, (0.0, 1.0))][0]
        raise DataError(f"classification labels must be 0 or 1, got {bad}")
    p = nk.clip(probs, 1e-7, 1.0 - 1e-7)
    y = Tensor(labels)
    per_task = -(y * nk.log(p) + (1.0 - y) * nk.log(1.0 - p))
    return nk.tsum(per_task * Tensor(weights))


def mse_loss(preds: Tensor, labels: np.ndarray, mask: np.ndarray | None = None) -> Tensor:
    labels = np.asarray(labels, dtype=np.float64)
    if labels.shape != preds.shape:
        raise ShapeError(
            f"labels shape {labels.shape} does not match outputs {preds.shape}")
    weights = _task_weights(labels.shape, mask)
    diff = preds - Tensor(labels)
    return nk.tsum(diff * diff * Tensor(weights))


def sample_loss(
    model: Model,
    outputs: Tensor,
    labels: np.ndarray,
    mask: np.ndarray | None = None,
) -> Tensor:
    if model.head_cfg.task_type == CLASSIFICATION:
        return bce_loss(outputs, labels, mask)
    return mse_loss(outputs, labels, mask)

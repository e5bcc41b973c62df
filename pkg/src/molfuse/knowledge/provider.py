"""Text-to-embedding providers for chemist knowledge."""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from molfuse.errors import DataError, ShapeError

log = logging.getLogger(__name__)

TOKEN_CAP = 256
_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass
class KnowledgeEmbedding:
    tokens: np.ndarray  # m x d_k, float64
    mask: np.ndarray  # length m, bool
    provider_id: str
    text_hash: str

    def __post_init__(self):
        self.tokens = np.asarray(self.tokens, dtype=np.float64)
        self.mask = np.asarray(self.mask, dtype=bool)
        if self.tokens.ndim != 2 or self.tokens.shape[0] < 1:
            raise ShapeError(f"token matrix must be m x d_k with m >= 1, got {self.tokens.shape}")
        if self.mask.shape != (self.tokens.shape[0],):
            raise ShapeError(
                f"mask length {self.mask.shape} does not match m={self.tokens.shape[0]}")
        if not self.mask.any():
            raise DataError("knowledge embedding mask has no true entries")
        if self.tokens[~self.mask].any():
            raise DataError("padding rows must be zero vectors")

    @property
    def d_k(self) -> int:
        return int(self.tokens.shape[1])


class EmbeddingProvider(Protocol):
    id: str
    native_dim: int

    def embed(self, text: str) -> KnowledgeEmbedding: ...


def _token_vector(token: str, d_k: int, seed: int) -> np.ndarray:
    """Sign vector +-1/sqrt(d_k) from a cryptographic hash of the token.

    hashlib keeps the map stable across runs, platforms, and processes."""
    scale = 1.0 / np.sqrt(d_k)
    bits_needed = d_k
    out = np.empty(d_k, dtype=np.float64)
    pos = 0
    block = 0
    while pos < bits_needed:
        digest = hashlib.sha256(f"{seed}:{block}:{token}".encode("utf-8")).digest()
        for byte in digest:
            for k in range(8):
                if pos >= bits_needed:
                    break
                out[pos] = scale if (byte >> k) & 1 else -scale
                pos += 1
            if pos >= bits_needed:
                break
        block += 1
    return out


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def builtin_embed(text: str, d_k: int = 64, seed: int = 0) -> KnowledgeEmbedding:
    if not text or not text.strip():
        raise DataError("cannot embed empty text")
    tokens = tokenize(text)
    if not tokens:
        raise DataError("text contains no embeddable tokens")
    if len(tokens) > TOKEN_CAP:
        log.warning("text has %d tokens; truncating to %d", len(tokens), TOKEN_CAP)
        tokens = tokens[:TOKEN_CAP]
    matrix = np.stack([_token_vector(tok, d_k, seed) for tok in tokens])
    return KnowledgeEmbedding(
        tokens=matrix,
        mask=np.ones(len(tokens), dtype=bool),
        provider_id=f"builtin:sha256:d{d_k}:seed{seed}",
        text_hash=hashlib.sha256(text.encode("utf-8")).hexdigest(),
    )


@dataclass
class BuiltinProvider:
    native_dim: int = 64
    seed: int = 0
    id: str = field(init=False)

    def __post_init__(self):
        self.id = f"builtin:sha256:d{self.native_dim}:seed{self.seed}"

    def embed(self, text: str) -> KnowledgeEmbedding:
        return builtin_embed(text, d_k=self.native_dim, seed=self.seed)


def pad_batch(items: list[KnowledgeEmbedding]) -> tuple[np.ndarray, np.ndarray]:
    if not items:
        raise DataError("pad_batch needs at least one embedding")
    d_k = items[0].d_k
    for item in items[1:]:
        if item.d_k != d_k:
            raise ShapeError(f"mixed embedding widths: {d_k} vs {item.d_k}")
    m_max = max(item.tokens.shape[0] for item in items)
    batch = np.zeros((len(items), m_max, d_k), dtype=np.float64)
    mask = np.zeros((len(items), m_max), dtype=bool)
    for row, item in enumerate(items):
        m = item.tokens.shape[0]
        batch[row, :m] = item.tokens
        mask[row, :m] = item.mask
    return batch, mask

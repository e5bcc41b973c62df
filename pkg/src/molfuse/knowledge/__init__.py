"""Chemist-knowledge embeddings: providers, storage, text generation."""

from molfuse.knowledge.provider import (
    TOKEN_CAP,
    BuiltinProvider,
    EmbeddingProvider,
    KnowledgeEmbedding,
    builtin_embed,
    pad_batch,
    tokenize,
)
from molfuse.knowledge.container import load_embeddings, save_embeddings
from molfuse.knowledge.chat import (
    ENV_API_BASE,
    ENV_API_KEY,
    ENV_MODEL,
    ChatClientConfig,
    generate_knowledge,
)

__all__ = [
    "BuiltinProvider",
    "ChatClientConfig",
    "ENV_API_BASE",
    "ENV_API_KEY",
    "ENV_MODEL",
    "EmbeddingProvider",
    "KnowledgeEmbedding",
    "TOKEN_CAP",
    "builtin_embed",
    "generate_knowledge",
    "load_embeddings",
    "pad_batch",
    "save_embeddings",
    "tokenize",
]

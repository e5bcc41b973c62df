"""On-disk embedding container: index.json plus a packed float32 blob.

Layout of embeddings.bin per entry: m * d_k little-endian float32 values,
then a little-endian uint32 CRC32 of those payload bytes. index.json maps
molecule id to {"offset", "m", "d_k"} with offset in bytes from file start.
"""

from __future__ import annotations

import json
import zlib
from pathlib import Path

import numpy as np

from molfuse.errors import DataError
from molfuse.knowledge.provider import KnowledgeEmbedding

INDEX_NAME = "index.json"
BLOB_NAME = "embeddings.bin"


def save_embeddings(directory: str | Path, items: dict[str, KnowledgeEmbedding]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    index: dict[str, dict] = {}
    provider_ids = sorted({item.provider_id for item in items.values()})
    offset = 0
    blob_parts: list[bytes] = []
    for mol_id in sorted(items):
        item = items[mol_id]
        payload = np.ascontiguousarray(item.tokens, dtype="<f4").tobytes()
        crc = zlib.crc32(payload) & 0xFFFFFFFF
        blob_parts.append(payload)
        blob_parts.append(crc.to_bytes(4, "little"))
        m, d_k = item.tokens.shape
        index[mol_id] = {
            "offset": offset,
            "m": int(m),
            "d_k": int(d_k),
            "mask": [bool(flag) for flag in item.mask],
            "text_hash": item.text_hash,
        }
        offset += len(payload) + 4
    (directory / BLOB_NAME).write_bytes(b"".join(blob_parts))
    index_doc = {"providers": provider_ids, "entries": index}
    (directory / INDEX_NAME).write_text(
        json.dumps(index_doc, indent=1, sort_keys=True), encoding="utf-8")
    return directory / INDEX_NAME


def load_embeddings(index_path: str | Path) -> dict[str, KnowledgeEmbedding]:
    index_path = Path(index_path)
    if index_path.is_dir():
        index_path = index_path / INDEX_NAME
    if not index_path.exists():
        raise DataError(f"embedding index not found: {index_path}")
    try:
        doc = json.loads(index_path.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DataError(f"embedding index is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "entries" not in doc:
        raise DataError("embedding index missing 'entries'")
    entries = doc["entries"]
    providers = doc.get("providers", [])
    provider_id = providers[0] if providers else "unknown"
    blob_path = index_path.parent / BLOB_NAME
    if not blob_path.exists():
        raise DataError(f"embedding blob not found: {blob_path}")
    blob = blob_path.read_bytes()

    out: dict[str, KnowledgeEmbedding] = {}
    shared_d_k: int | None = None
    for mol_id in sorted(entries):
        meta = entries[mol_id]
        try:
            offset, m, d_k = int(meta["offset"]), int(meta["m"]), int(meta["d_k"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DataError(f"malformed index entry for {mol_id!r}: {exc}") from exc
        if shared_d_k is None:
            shared_d_k = d_k
        elif d_k != shared_d_k:
            raise DataError(
                f"mixed embedding widths in container: {shared_d_k} vs {d_k} for {mol_id!r}")
        nbytes = m * d_k * 4
        end = offset + nbytes + 4
        if offset < 0 or end > len(blob):
            raise DataError(f"entry {mol_id!r} runs past end of blob (checksum unverifiable)")
        payload = blob[offset : offset + nbytes]
        stored_crc = int.from_bytes(blob[offset + nbytes : end], "little")
        if zlib.crc32(payload) & 0xFFFFFFFF != stored_crc:
            raise DataError(f"checksum mismatch for entry {mol_id!r}")
        tokens = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(m, d_k)
        if not np.isfinite(tokens).all():
            raise DataError(f"non-finite values in entry {mol_id!r}")
        mask_meta = meta.get("mask")
        mask = (
            np.asarray(mask_meta, dtype=bool)
            if mask_meta is not None
            else np.ones(m, dtype=bool)
        )
        if mask.shape != (m,):
            raise DataError(f"mask length mismatch for entry {mol_id!r}")
        out[mol_id] = KnowledgeEmbedding(
            tokens=tokens,
            mask=mask,
            provider_id=provider_id,
            text_hash=str(meta.get("text_hash", "")),
        )
    return out

"""Versioned checkpoint container.

Layout:
  bytes 0-3   magic b"MFCP"
  bytes 4-7   format version, uint32 little-endian (currently 1)
  bytes 8-11  header length in bytes, uint32 little-endian
  header      UTF-8 JSON, sorted keys: model configs, variant, knowledge
              width, parameter manifest [[name, shape], ...], extra metadata
  blob        parameter values as little-endian float64, concatenated in
              manifest order
  tail        uint32 little-endian CRC32 of the blob
"""

from __future__ import annotations

import json
import zlib
from dataclasses import asdict
from pathlib import Path

import numpy as np

from molfuse.errors import DataError
from molfuse.model.fusion import FusionConfig
from molfuse.model.gin import GinConfig
from molfuse.model.network import HeadConfig, Model, build_variant

MAGIC = b"MFCP"
VERSION = 1


def save_checkpoint(path: str | Path, model: Model, extra: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    manifest = [[name, list(model.params[name].data.shape)] for name in sorted(model.params)]
    header = {
        "variant": model.variant,
        "gin": asdict(model.gin_cfg),
        "fusion": asdict(model.fusion_cfg),
        "head": asdict(model.head_cfg),
        "knowledge_dim": model.knowledge_dim,
        "params": manifest,
        "extra": extra or {},
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    blob = b"".join(
        np.ascontiguousarray(model.params[name].data, dtype="<f8").tobytes()
        for name, _ in manifest
    )
    crc = zlib.crc32(blob) & 0xFFFFFFFF
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(VERSION.to_bytes(4, "little"))
        fh.write(len(header_bytes).to_bytes(4, "little"))
        fh.write(header_bytes)
        fh.write(blob)
        fh.write(crc.to_bytes(4, "little"))
    return path


def load_checkpoint(path: str | Path) -> tuple[Model, dict]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"checkpoint not found: {path}")
    raw = path.read_bytes()
    if len(raw) < 12 or raw[:4] != MAGIC:
        raise DataError(f"not a checkpoint file (bad magic): {path}")
    version = int.from_bytes(raw[4:8], "little")
    if version != VERSION:
        raise DataError(f"unsupported checkpoint version {version} (expected {VERSION})")
    header_len = int.from_bytes(raw[8:12], "little")
    header_end = 12 + header_len
    if header_end + 4 > len(raw):
        raise DataError("checkpoint truncated inside header")
    try:
        header = json.loads(raw[12:header_end].decode("utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise DataError(f"checkpoint header is not valid JSON: {exc}") from exc

    manifest = header["params"]
    blob_len = sum(int(np.prod(shape)) * 8 for _, shape in manifest)
    blob_end = header_end + blob_len
    if blob_end + 4 != len(raw):
        raise DataError(
            f"checkpoint size mismatch: expected {blob_end + 4} bytes, have {len(raw)}")
    blob = raw[header_end:blob_end]
    stored_crc = int.from_bytes(raw[blob_end : blob_end + 4], "little")
    if zlib.crc32(blob) & 0xFFFFFFFF != stored_crc:
        raise DataError("checkpoint blob checksum mismatch")

    model = build_variant(
        header["variant"],
        gin_cfg=GinConfig(**header["gin"]),
        fusion_cfg=FusionConfig(**header["fusion"]),
        head_cfg=HeadConfig(**header["head"]),
        knowledge_dim=int(header["knowledge_dim"]),
        seed=0,
    )
    expected = set(model.params)
    listed = {name for name, _ in manifest}
    if listed != expected:
        missing = sorted(expected - listed)
        surplus = sorted(listed - expected)
        raise DataError(
            f"checkpoint parameters do not match configs "
            f"(missing {missing[:3]}, unexpected {surplus[:3]})")
    offset = 0
    for name, shape in manifest:
        count = int(np.prod(shape))
        values = np.frombuffer(
            blob, dtype="<f8", count=count, offset=offset).reshape(shape)
        model.params[name].data = values.astype(np.float64).copy()
        offset += count * 8
    return model, header.get("extra", {})

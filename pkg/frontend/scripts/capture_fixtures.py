"""Capture byte-exact HTTP API fixtures for the console's test suite.

Starts the real prediction server over a small deterministic checkpoint,
records the raw response bytes for /api/model, a successful /api/predict,
and a parse-error /api/predict, and writes them to tests/fixtures/.  The
console tests replay these bytes through a mocked fetch, so they assert
against genuine server output without needing Python at test time.

Run from the repository root after installing the package:

    python3 frontend/scripts/capture_fixtures.py
"""
from __future__ import annotations

import json
import tempfile
import threading
import urllib.error
import urllib.request
from pathlib import Path

import numpy as np

from molfuse.model import (FusionConfig, GinConfig, HeadConfig, build_variant,
                           save_checkpoint)
from molfuse.server import create_server

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"

SMILES = "c1ccoc1CC"  # 7 heavy atoms
TEXT = "a strong potent high affinity binder"
BAD_SMILES = "C1CC"  # unclosed ring -> 400 with byte offset


def _compact(payload: dict) -> bytes:
    """Serialize exactly like the console does (JSON.stringify)."""
    return json.dumps(payload, separators=(",", ":")).encode("utf-8")


def _post(base: str, body: bytes) -> tuple[int, bytes]:
    request = urllib.request.Request(
        base + "/api/predict", data=body,
        headers={"Content-Type": "application/json"})
    try:
        with urllib.request.urlopen(request) as response:
            return response.status, response.read()
    except urllib.error.HTTPError as exc:
        return exc.code, exc.read()


def _serve(checkpoint: Path):
    server = create_server(port=0, checkpoint=checkpoint)
    threading.Thread(target=server.serve_forever, daemon=True).start()
    return server, f"http://127.0.0.1:{server.server_address[1]}"


def main() -> None:
    FIXTURES.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        checkpoint = Path(tmp) / "console.ckpt"
        model = build_variant(
            "full",
            gin_cfg=GinConfig(num_layers=2, hidden=8, input_dim=30),
            fusion_cfg=FusionConfig(width=8, heads=2, ffn_expansion=2),
            head_cfg=HeadConfig(input_dim=8, tasks=1, task_type="classification"),
            knowledge_dim=8, seed=3,
        )
        # non-zero gates so the text channel influences the outputs
        model.params["fusion.block0.alpha_xattn"].data = np.asarray(0.3)
        model.params["fusion.block0.alpha_dense"].data = np.asarray(-0.2)
        save_checkpoint(checkpoint, model,
                        extra={"task": "fusion_synthetic", "provider_dim": 8,
                               "provider_seed": 0})

        server, base = _serve(checkpoint)
        try:
            with urllib.request.urlopen(base + "/api/model") as response:
                (FIXTURES / "model_response.json").write_bytes(response.read())

            request_bytes = _compact({"smiles": SMILES, "knowledge_text": TEXT})
            (FIXTURES / "predict_request.json").write_bytes(request_bytes)
            status, body = _post(base, request_bytes)
            assert status == 200, (status, body)
            (FIXTURES / "predict_response.json").write_bytes(body)

            status, error_body = _post(
                base, _compact({"smiles": BAD_SMILES, "knowledge_text": TEXT}))
            assert status == 400, (status, error_body)
            (FIXTURES / "error_response.json").write_bytes(error_body)
        finally:
            server.shutdown()
            server.server_close()

        # graph-only regression checkpoint: gates/attention are null and the
        # chemist note is ignored, which the console must reflect
        gin_ckpt = Path(tmp) / "gin.ckpt"
        gin_model = build_variant(
            "gin_only",
            gin_cfg=GinConfig(num_layers=2, hidden=8, input_dim=30),
            head_cfg=HeadConfig(input_dim=8, tasks=1, task_type="regression"),
            seed=5,
        )
        save_checkpoint(gin_ckpt, gin_model,
                        extra={"task": "freesolv", "label_mean": 2.0,
                               "label_std": 0.5})
        server, base = _serve(gin_ckpt)
        try:
            with urllib.request.urlopen(base + "/api/model") as response:
                (FIXTURES / "model_gin_response.json").write_bytes(response.read())
            gin_request = _compact({"smiles": "CCO"})
            (FIXTURES / "predict_gin_request.json").write_bytes(gin_request)
            status, gin_body = _post(base, gin_request)
            assert status == 200, (status, gin_body)
            (FIXTURES / "predict_gin_response.json").write_bytes(gin_body)
        finally:
            server.shutdown()
            server.server_close()

    payload = json.loads(body)
    attention = payload["cross_attention"]
    print(f"wrote fixtures to {FIXTURES}")
    print(f"  outputs: {payload['outputs']}")
    print(f"  gates:   {payload['gates']}")
    print(f"  tokens:  {payload['tokens']}")
    print(f"  attention: {attention['rows']} x {attention['cols']} "
          f"(truncated={attention['truncated']})")


if __name__ == "__main__":
    main()

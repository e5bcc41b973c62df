"""HTTP API over a trained checkpoint: one-off predictions with
user-supplied chemist notes, plus gate and attention introspection.

Endpoints:
  GET  /api/health   liveness; 503 until a checkpoint is loaded
  GET  /api/model    variant, architecture, task and checkpoint metadata
  POST /api/predict  {smiles, knowledge_text, task?} -> outputs + attention

The loaded model is an immutable snapshot shared across request threads;
request handling never mutates it or the checkpoint file.  Attention
matrices are truncated to ``ATTENTION_MAX_ROWS`` x ``ATTENTION_MAX_COLS``
with a ``truncated`` flag so payloads stay bounded.
"""
from __future__ import annotations

import hashlib
import json
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

import numpy as np

from . import __version__
from .chem import featurize, parse_smiles
from .errors import (ConfigError, DataError, MaskError, MolfuseError,
                     NumericError, ParseError, ShapeError)
from .knowledge import BuiltinProvider, tokenize
from .model import load_checkpoint, model_forward
from .model.network import REGRESSION as HEAD_REGRESSION
from .pipeline import destandardize, get_task

ATTENTION_MAX_ROWS = 64
ATTENTION_MAX_COLS = 256
MAX_BODY_BYTES = 1 << 20

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".png": "image/png",
    ".ico": "image/x-icon",
    ".txt": "text/plain; charset=utf-8",
    ".map": "application/json; charset=utf-8",
}


class _HttpFault(Exception):
    """Internal: carries an HTTP status plus a JSON-serializable payload."""

    def __init__(self, status: int, payload: dict):
        super().__init__(payload.get("error", ""))
        self.status = status
        self.payload = payload


class ModelState:
    """Immutable bundle of everything a request needs; shared across threads."""

    def __init__(self, model, extra: dict, checkpoint_sha256: str,
                 provider: BuiltinProvider | None):
        self.model = model
        self.extra = extra
        self.checkpoint_sha256 = checkpoint_sha256
        self.provider = provider
        self.task = extra.get("task")
        if self.task:
            spec = get_task(self.task)
            self.label_columns = list(spec.label_columns)
        else:
            self.label_columns = [f"task_{i}" for i in range(model.head_cfg.tasks)]

    def gate_values(self) -> dict | None:
        if self.model.variant != "full":
            return None
        gates: dict[str, list[float]] = {"xattn": [], "dense": []}
        for block in range(self.model.fusion_cfg.num_blocks):
            base = f"fusion.block{block}"
            gates["xattn"].append(
                float(np.tanh(self.model.params[f"{base}.alpha_xattn"].data)))
            gates["dense"].append(
                float(np.tanh(self.model.params[f"{base}.alpha_dense"].data)))
        return gates


def load_state(checkpoint: str | Path,
               provider_seed: int | None = None) -> ModelState:
    path = Path(checkpoint)
    if not path.exists():
        raise ConfigError(f"checkpoint not found: {path}")
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    model, extra = load_checkpoint(path)
    provider = None
    if model.variant in ("full", "chem_only"):
        seed = provider_seed if provider_seed is not None \
            else int(extra.get("provider_seed", 0))
        provider = BuiltinProvider(native_dim=model.knowledge_dim, seed=seed)
    return ModelState(model, extra, digest, provider)


def _model_metadata(state: ModelState) -> dict:
    model = state.model
    return {
        "variant": model.variant,
        "task": state.task,
        "task_type": model.head_cfg.task_type,
        "label_columns": state.label_columns,
        "knowledge_dim": model.knowledge_dim,
        "gin": {"num_layers": model.gin_cfg.num_layers,
                "hidden": model.gin_cfg.hidden,
                "input_dim": model.gin_cfg.input_dim},
        "fusion": {"width": model.fusion_cfg.width,
                   "heads": model.fusion_cfg.heads,
                   "ffn_expansion": model.fusion_cfg.ffn_expansion,
                   "num_blocks": model.fusion_cfg.num_blocks},
        "head": {"tasks": model.head_cfg.tasks,
                 "dropout": model.head_cfg.dropout},
        "provider": None if state.provider is None else state.provider.id,
        "gates": state.gate_values(),
        "checkpoint_sha256": state.checkpoint_sha256,
        "version": __version__,
    }


def _validate_request(state: ModelState, body: bytes) -> tuple[str, str | None, str]:
    """Returns (smiles, knowledge_text, task); raises _HttpFault on bad input."""
    try:
        payload = json.loads(body.decode("utf-8"))
    except UnicodeDecodeError as exc:
        raise _HttpFault(400, {"error": f"request body is not UTF-8: {exc.reason}",
                               "offset": exc.start})
    except json.JSONDecodeError as exc:
        raise _HttpFault(400, {"error": f"request body is not valid JSON: {exc.msg}",
                               "offset": exc.pos})
    if not isinstance(payload, dict):
        raise _HttpFault(400, {"error": "request body must be a JSON object"})
    unknown = sorted(set(payload) - {"smiles", "knowledge_text", "task"})
    if unknown:
        raise _HttpFault(400, {"error": f"unknown request fields: {', '.join(unknown)}"})

    smiles = payload.get("smiles")
    if not isinstance(smiles, str) or not smiles.strip():
        raise _HttpFault(400, {"error": "smiles must be a non-empty string"})

    task = payload.get("task", state.task)
    if state.task and task != state.task:
        raise _HttpFault(400, {"error": f"this server predicts task {state.task!r},"
                                        f" got {task!r}"})

    text = payload.get("knowledge_text")
    if state.model.variant in ("full", "chem_only"):
        if not isinstance(text, str) or not text.strip():
            raise _HttpFault(400, {"error": "knowledge_text must be a non-empty "
                                            "string for this model variant"})
    else:
        text = None
    return smiles, text, task


def predict_payload(state: ModelState, body: bytes) -> dict:
    """Full predict-endpoint behavior minus HTTP plumbing (shared with tests)."""
    smiles, text, task = _validate_request(state, body)
    model = state.model

    try:
        graph = parse_smiles(smiles)
    except ParseError as exc:
        raise _HttpFault(400, {"error": str(exc), "offset": exc.offset})
    features = featurize(graph)
    edges = [(i, j) for i, j, _ in graph.bonds]

    chem = None
    tokens: list[str] = []
    if text is not None:
        try:
            chem = state.provider.embed(text)
        except DataError as exc:
            # text tokenized to nothing: every attention key would be masked
            raise _HttpFault(422, {"error": str(exc)})
        # align with the embedded sequence, which caps very long texts
        tokens = tokenize(text)[:chem.tokens.shape[0]]

    try:
        outputs, aux = model_forward(
            model,
            features if model.variant != "chem_only" else None,
            edges if model.variant != "chem_only" else None,
            chem,
            training=False,
        )
    except MaskError as exc:
        raise _HttpFault(422, {"error": str(exc)})
    except (NumericError, ShapeError) as exc:
        raise _HttpFault(500, {"error": str(exc)})

    values = outputs.data.astype(float)
    if not np.all(np.isfinite(values)):
        raise _HttpFault(500, {"error": "model produced non-finite outputs"})
    if model.head_cfg.task_type == HEAD_REGRESSION and "label_mean" in state.extra:
        spec = get_task(state.task).with_stats(float(state.extra["label_mean"]),
                                               float(state.extra["label_std"]))
        values = destandardize(spec, values)

    attention = None
    cross = aux.get("cross_attention")
    if cross is not None:
        rows, cols = cross.shape
        clipped = cross[:ATTENTION_MAX_ROWS, :ATTENTION_MAX_COLS]
        attention = {
            "matrix": [[float(v) for v in row] for row in clipped],
            "rows": int(rows),
            "cols": int(cols),
            "truncated": bool(rows > ATTENTION_MAX_ROWS or cols > ATTENTION_MAX_COLS),
        }

    return {
        "request_sha256": hashlib.sha256(body).hexdigest(),
        "smiles": smiles,
        "task": task,
        "task_type": model.head_cfg.task_type,
        "variant": model.variant,
        "outputs": {name: float(v)
                    for name, v in zip(state.label_columns, values)},
        "gates": state.gate_values(),
        "tokens": tokens,
        "cross_attention": attention,
        "model": {"checkpoint_sha256": state.checkpoint_sha256,
                  "variant": model.variant,
                  "version": __version__},
    }


class MolfuseServer(ThreadingHTTPServer):
    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, state: ModelState | None,
                 static_dir: str | Path | None = None, quiet: bool = True):
        self.state = state
        self.static_dir = Path(static_dir).resolve() if static_dir else None
        self.quiet = quiet
        super().__init__(address, _Handler)


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server: MolfuseServer

    # -- plumbing -----------------------------------------------------------

    def log_message(self, format, *args):
        if not self.server.quiet:
            super().log_message(format, *args)

    def _send_json(self, status: int, payload: dict) -> None:
        body = json.dumps(payload, sort_keys=True).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)

    def _state_or_503(self) -> ModelState | None:
        state = self.server.state
        if state is None:
            self._send_json(503, {"error": "no checkpoint loaded"})
        return state

    # -- verbs --------------------------------------------------------------

    def do_OPTIONS(self):
        self.send_response(204)
        self.send_header("Access-Control-Allow-Origin", "*")
        self.send_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS")
        self.send_header("Access-Control-Allow-Headers", "Content-Type")
        self.send_header("Content-Length", "0")
        self.end_headers()

    def do_GET(self):
        if self.path == "/api/health":
            state = self._state_or_503()
            if state is not None:
                self._send_json(200, {"status": "ok",
                                      "checkpoint_sha256": state.checkpoint_sha256})
            return
        if self.path == "/api/model":
            state = self._state_or_503()
            if state is not None:
                self._send_json(200, _model_metadata(state))
            return
        if self.path.startswith("/api/"):
            self._send_json(404, {"error": f"unknown endpoint {self.path}"})
            return
        self._serve_static()

    def do_POST(self):
        # consume the body before any response so keep-alive framing survives
        try:
            length = int(self.headers.get("Content-Length", "0"))
        except ValueError:
            self.close_connection = True
            self._send_json(400, {"error": "invalid Content-Length header"})
            return
        if length > MAX_BODY_BYTES:
            self.close_connection = True
            self._send_json(400, {"error": f"request body exceeds {MAX_BODY_BYTES} bytes"})
            return
        body = self.rfile.read(length) if length > 0 else b""
        if self.path != "/api/predict":
            self._send_json(404, {"error": f"unknown endpoint {self.path}"})
            return
        state = self._state_or_503()
        if state is None:
            return
        if not body:
            self._send_json(400, {"error": "request body is required"})
            return
        try:
            payload = predict_payload(state, body)
        except _HttpFault as fault:
            self._send_json(fault.status, fault.payload)
            return
        except MolfuseError as exc:
            self._send_json(500, {"error": str(exc)})
            return
        self._send_json(200, payload)

    # -- static console -----------------------------------------------------

    def _serve_static(self):
        root = self.server.static_dir
        if root is None:
            self._send_json(404, {"error": f"unknown endpoint {self.path}"})
            return
        relative = self.path.split("?", 1)[0].lstrip("/") or "index.html"
        target = (root / relative).resolve()
        if not target.is_relative_to(root) or not target.is_file():
            self._send_json(404, {"error": f"not found: {self.path}"})
            return
        body = target.read_bytes()
        self.send_response(200)
        self.send_header("Content-Type",
                         _CONTENT_TYPES.get(target.suffix, "application/octet-stream"))
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        self.wfile.write(body)


def create_server(host: str = "127.0.0.1", port: int = 0,
                  checkpoint: str | Path | None = None,
                  provider_seed: int | None = None,
                  static_dir: str | Path | None = None,
                  quiet: bool = True) -> MolfuseServer:
    """Build a ready-to-serve instance; ``port=0`` picks a free port."""
    state = load_state(checkpoint, provider_seed) if checkpoint else None
    return MolfuseServer((host, port), state, static_dir=static_dir, quiet=quiet)


def run_server(checkpoint: str | Path, host: str = "127.0.0.1", port: int = 8000,
               provider_seed: int | None = None,
               static_dir: str | Path | None = None) -> None:
    server = create_server(host, port, checkpoint=checkpoint,
                           provider_seed=provider_seed, static_dir=static_dir,
                           quiet=False)
    address = f"http://{server.server_address[0]}:{server.server_address[1]}"
    print(f"serving {address}/api (checkpoint "
          f"{server.state.checkpoint_sha256[:12]}...)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()

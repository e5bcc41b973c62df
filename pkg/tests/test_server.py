"""HTTP API tests: endpoints, error statuses, determinism, concurrency."""
from __future__ import annotations

import hashlib
import json
import threading
from concurrent.futures import ThreadPoolExecutor

import httpx
import numpy as np
import pytest

from molfuse.model import (FusionConfig, GinConfig, HeadConfig, build_variant,
                           predict, save_checkpoint)
from molfuse.server import create_server


def _start(server):
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    return f"http://127.0.0.1:{server.server_address[1]}"


@pytest.fixture(scope="module")
def checkpoints(tmp_path_factory):
    root = tmp_path_factory.mktemp("server_ckpts")
    full = build_variant(
        "full",
        gin_cfg=GinConfig(num_layers=2, hidden=8, input_dim=30),
        fusion_cfg=FusionConfig(width=8, heads=2, ffn_expansion=2),
        head_cfg=HeadConfig(input_dim=8, tasks=1, task_type="classification"),
        knowledge_dim=8, seed=3,
    )
    full_path = root / "full.ckpt"
    save_checkpoint(full_path, full,
                    extra={"task": "fusion_synthetic", "provider_dim": 8,
                           "provider_seed": 0})

    reg = build_variant(
        "gin_only",
        gin_cfg=GinConfig(num_layers=2, hidden=8, input_dim=30),
        head_cfg=HeadConfig(input_dim=8, tasks=1, task_type="regression"),
        seed=5,
    )
    reg_path = root / "reg.ckpt"
    save_checkpoint(reg_path, reg,
                    extra={"task": "freesolv", "label_mean": 2.0, "label_std": 0.5})
    return {"full": full_path, "full_model": full,
            "reg": reg_path, "reg_model": reg}


@pytest.fixture(scope="module")
def served(checkpoints):
    server = create_server(port=0, checkpoint=checkpoints["full"])
    base = _start(server)
    with httpx.Client(base_url=base) as client:
        yield client
    server.shutdown()
    server.server_close()


@pytest.fixture(scope="module")
def served_regression(checkpoints):
    server = create_server(port=0, checkpoint=checkpoints["reg"])
    base = _start(server)
    with httpx.Client(base_url=base) as client:
        yield client
    server.shutdown()
    server.server_close()


# ---------------------------------------------------------------------------
# metadata endpoints


def test_health_reports_checkpoint_hash(served):
    first = served.get("/api/health")
    second = served.get("/api/health")
    assert first.status_code == 200
    assert first.json()["status"] == "ok"
    assert first.content == second.content  # hash stable across requests
    assert len(first.json()["checkpoint_sha256"]) == 64


def test_model_metadata(served):
    response = served.get("/api/model")
    assert response.status_code == 200
    data = response.json()
    assert data["variant"] == "full"
    assert data["task"] == "fusion_synthetic"
    assert data["label_columns"] == ["active"]
    assert data["knowledge_dim"] == 8
    assert data["fusion"]["heads"] == 2
    assert data["gates"] == {"xattn": [0.0], "dense": [0.0]}
    assert data["version"]


def test_unknown_api_endpoint_404(served):
    assert served.get("/api/nope").status_code == 404
    assert served.post("/api/nope", json={}).status_code == 404


def test_endpoints_503_before_checkpoint_load():
    server = create_server(port=0, checkpoint=None)
    base = _start(server)
    try:
        with httpx.Client(base_url=base) as client:
            assert client.get("/api/health").status_code == 503
            assert client.get("/api/model").status_code == 503
            response = client.post("/api/predict", json={"smiles": "C"})
            assert response.status_code == 503
            assert "no checkpoint" in response.json()["error"]
    finally:
        server.shutdown()
        server.server_close()


def test_cors_headers_on_all_responses(served):
    preflight = served.options("/api/predict")
    assert preflight.status_code == 204
    assert "POST" in preflight.headers["access-control-allow-methods"]
    ok = served.get("/api/health")
    assert ok.headers["access-control-allow-origin"] == "*"
    error = served.post("/api/predict", content=b"{}",
                        headers={"Content-Type": "application/json"})
    assert error.headers["access-control-allow-origin"] == "*"


# ---------------------------------------------------------------------------
# prediction


def test_predict_is_deterministic_and_echoes_request_hash(served):
    body = json.dumps({"smiles": "c1ccoc1CC",
                       "knowledge_text": "a strong potent binder"},
                      sort_keys=True).encode()
    kwargs = {"content": body, "headers": {"Content-Type": "application/json"}}
    first = served.post("/api/predict", **kwargs)
    second = served.post("/api/predict", **kwargs)
    assert first.status_code == 200
    assert first.content == second.content
    assert first.json()["request_sha256"] == hashlib.sha256(body).hexdigest()


def test_gate_zero_texts_change_attention_not_outputs(served):
    responses = []
    for text in ("a strong potent binder", "an entirely inert compound today"):
        response = served.post("/api/predict",
                               json={"smiles": "c1ccoc1CC", "knowledge_text": text})
        assert response.status_code == 200
        responses.append(response.json())
    a, b = responses
    assert a["outputs"] == b["outputs"]
    assert a["gates"] == {"xattn": [0.0], "dense": [0.0]}
    assert a["cross_attention"]["matrix"] != b["cross_attention"]["matrix"]
    assert a["tokens"] != b["tokens"]


def test_attention_rows_sum_to_one(served):
    response = served.post("/api/predict",
                           json={"smiles": "c1ccoc1CC",
                                 "knowledge_text": "four embeddable words here"})
    data = response.json()
    att = data["cross_attention"]
    assert att["rows"] == 7            # heavy atoms in the molecule
    assert att["cols"] == 4            # tokens in the note
    assert att["truncated"] is False
    assert data["tokens"] == ["four", "embeddable", "words", "here"]
    for row in att["matrix"]:
        assert sum(row) == pytest.approx(1.0, abs=1e-6)
        assert all(w >= 0.0 for w in row)


def test_attention_truncation_flag_for_large_molecules(served):
    smiles = "C" * 70
    response = served.post("/api/predict",
                           json={"smiles": smiles, "knowledge_text": "a note"})
    assert response.status_code == 200
    att = response.json()["cross_attention"]
    assert att["rows"] == 70
    assert att["truncated"] is True
    assert len(att["matrix"]) == 64    # clipped payload


def test_predict_regression_destandardizes(served_regression, checkpoints):
    response = served_regression.post("/api/predict", json={"smiles": "CCO"})
    assert response.status_code == 200
    data = response.json()
    assert data["task_type"] == "regression"
    assert data["cross_attention"] is None
    assert data["tokens"] == []
    from molfuse.chem import parse_smiles, featurize
    graph = parse_smiles("CCO")
    raw = predict(checkpoints["reg_model"], featurize(graph),
                  [(i, j) for i, j, _ in graph.bonds], None)[0]
    assert data["outputs"]["expt"] == pytest.approx(raw * 0.5 + 2.0, rel=1e-12)


def test_gin_only_server_ignores_knowledge_text(served_regression):
    with_text = served_regression.post(
        "/api/predict", json={"smiles": "CCO", "knowledge_text": "whatever"})
    without = served_regression.post("/api/predict", json={"smiles": "CCO"})
    assert with_text.status_code == without.status_code == 200
    assert with_text.json()["outputs"] == without.json()["outputs"]


def test_concurrent_identical_requests_identical_bodies(served):
    body = json.dumps({"smiles": "c1ccoc1CC",
                       "knowledge_text": "a strong potent binder"}).encode()

    def post(_):
        with httpx.Client(base_url=str(served.base_url)) as client:
            return client.post("/api/predict", content=body,
                               headers={"Content-Type": "application/json"}).content

    with ThreadPoolExecutor(max_workers=8) as pool:
        bodies = list(pool.map(post, range(16)))
    assert len(set(bodies)) == 1


# ---------------------------------------------------------------------------
# request validation


def test_malformed_smiles_400_with_offset(served):
    response = served.post("/api/predict",
                           json={"smiles": "c1ccoc1(", "knowledge_text": "x y"})
    assert response.status_code == 400
    data = response.json()
    assert "byte offset" in data["error"]
    assert isinstance(data["offset"], int)


def test_invalid_json_400_with_offset(served):
    response = served.post("/api/predict", content=b'{"smiles": ',
                           headers={"Content-Type": "application/json"})
    assert response.status_code == 400
    assert "offset" in response.json()


def test_missing_body_400(served):
    response = served.post("/api/predict")
    assert response.status_code == 400
    assert "body" in response.json()["error"]


def test_empty_smiles_400(served):
    response = served.post("/api/predict",
                           json={"smiles": "  ", "knowledge_text": "x"})
    assert response.status_code == 400


def test_missing_knowledge_text_400_for_full_variant(served):
    response = served.post("/api/predict", json={"smiles": "CCO"})
    assert response.status_code == 400
    assert "knowledge_text" in response.json()["error"]


def test_all_masked_text_422(served):
    response = served.post("/api/predict",
                           json={"smiles": "CCO", "knowledge_text": "?! --- ..."})
    assert response.status_code == 422
    assert "token" in response.json()["error"]


def test_unknown_request_field_400(served):
    response = served.post("/api/predict",
                           json={"smiles": "C", "knowledge_text": "x",
                                 "unexpected": 1})
    assert response.status_code == 400
    assert "unexpected" in response.json()["error"]


def test_task_mismatch_400(served):
    response = served.post("/api/predict",
                           json={"smiles": "C", "knowledge_text": "x",
                                 "task": "bace"})
    assert response.status_code == 400
    assert "fusion_synthetic" in response.json()["error"]


# ---------------------------------------------------------------------------
# static file serving


def test_static_dir_serving_and_traversal_guard(checkpoints, tmp_path):
    static = tmp_path / "static"
    static.mkdir()
    (static / "index.html").write_text("<h1>console</h1>")
    (static / "app.js").write_text("console.log(1)")
    secret = tmp_path / "secret.txt"
    secret.write_text("private")

    server = create_server(port=0, checkpoint=checkpoints["full"],
                           static_dir=static)
    base = _start(server)
    try:
        with httpx.Client(base_url=base) as client:
            index = client.get("/")
            assert index.status_code == 200
            assert index.text == "<h1>console</h1>"
            assert index.headers["content-type"].startswith("text/html")
            script = client.get("/app.js")
            assert script.status_code == 200
            assert script.headers["content-type"].startswith("text/javascript")
            assert client.get("/missing.html").status_code == 404
            assert client.get("/../secret.txt").status_code == 404
    finally:
        server.shutdown()
        server.server_close()


def test_no_static_dir_means_404_outside_api(served):
    assert served.get("/").status_code == 404

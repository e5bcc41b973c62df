import json

import numpy as np
import pytest

from molfuse.errors import ConfigError, DataError, ShapeError
from molfuse.knowledge import (
    TOKEN_CAP,
    BuiltinProvider,
    ChatClientConfig,
    KnowledgeEmbedding,
    builtin_embed,
    generate_knowledge,
    load_embeddings,
    pad_batch,
    save_embeddings,
)


# ------------------------------------------------------------- provider

def test_builtin_deterministic():
    a = builtin_embed("aromatic ring")
    b = builtin_embed("aromatic ring")
    assert a.tokens.shape == (2, 64)
    assert np.array_equal(a.tokens, b.tokens)
    assert a.text_hash == b.text_hash


def test_builtin_rows_unit_norm():
    emb = builtin_embed("lipophilic amide scaffold with three rings", d_k=64)
    norms = np.linalg.norm(emb.tokens, axis=1)
    assert np.abs(norms - 1.0).max() <= 1e-12


def test_builtin_odd_width_unit_norm():
    emb = builtin_embed("solvation energy", d_k=48)
    norms = np.linalg.norm(emb.tokens, axis=1)
    assert np.abs(norms - 1.0).max() <= 1e-12


def test_builtin_token_order():
    ab = builtin_embed("a b")
    ba = builtin_embed("b a")
    assert np.array_equal(ab.tokens[0], ba.tokens[1])
    assert np.array_equal(ab.tokens[1], ba.tokens[0])


def test_builtin_empty_text_rejected():
    with pytest.raises(DataError):
        builtin_embed("")
    with pytest.raises(DataError):
        builtin_embed("   ")
    with pytest.raises(DataError):
        builtin_embed("???!!!")


def test_builtin_token_cap():
    text = " ".join(f"tok{i}" for i in range(TOKEN_CAP + 50))
    emb = builtin_embed(text)
    assert emb.tokens.shape[0] == TOKEN_CAP


def test_builtin_seed_changes_vectors():
    a = builtin_embed("ring", seed=0)
    b = builtin_embed("ring", seed=1)
    assert not np.array_equal(a.tokens, b.tokens)


def test_provider_interface():
    provider = BuiltinProvider(native_dim=32, seed=7)
    emb = provider.embed("polar surface area")
    assert emb.d_k == 32
    assert emb.provider_id == provider.id
    assert "seed7" in provider.id


def test_embedding_invariants():
    with pytest.raises(DataError):
        KnowledgeEmbedding(
            tokens=np.ones((2, 4)), mask=np.array([False, False]),
            provider_id="x", text_hash="y")
    with pytest.raises(DataError):  # nonzero padding row
        KnowledgeEmbedding(
            tokens=np.ones((2, 4)), mask=np.array([True, False]),
            provider_id="x", text_hash="y")
    with pytest.raises(ShapeError):
        KnowledgeEmbedding(
            tokens=np.ones((2, 4)), mask=np.array([True, True, True]),
            provider_id="x", text_hash="y")


# ------------------------------------------------------------ pad_batch

def test_pad_batch_lengths():
    short = builtin_embed("one two")
    long = builtin_embed("a b c d e")
    batch, mask = pad_batch([short, long])
    assert batch.shape == (2, 5, 64)
    assert mask.shape == (2, 5)
    assert mask[0].tolist() == [True, True, False, False, False]
    assert mask[1].all()
    assert not batch[0, 2:].any()  # padding rows exactly zero


def test_pad_batch_single_identity():
    emb = builtin_embed("three token text")
    batch, mask = pad_batch([emb])
    assert np.array_equal(batch[0], emb.tokens)
    assert np.array_equal(mask[0], emb.mask)


def test_pad_batch_mixed_widths_rejected():
    with pytest.raises(ShapeError, match="mixed"):
        pad_batch([builtin_embed("x", d_k=32), builtin_embed("y", d_k=64)])


# ------------------------------------------------------------ container

def make_items():
    return {
        "m000001": builtin_embed("hydrophobic tail"),
        "m000002": builtin_embed("hydrogen bond donor rich"),
        "m000003": builtin_embed("strained ring"),
    }


def test_container_round_trip_bit_exact(tmp_path):
    items = make_items()
    save_embeddings(tmp_path, items)
    loaded = load_embeddings(tmp_path / "index.json")
    assert sorted(loaded) == sorted(items)
    for key in items:
        assert np.array_equal(loaded[key].tokens, items[key].tokens)
        assert np.array_equal(loaded[key].mask, items[key].mask)
        assert loaded[key].text_hash == items[key].text_hash


def test_container_variable_lengths(tmp_path):
    items = {
        "a": builtin_embed("one two three four five", d_k=8),
        "b": builtin_embed("six seven eight nine ten eleven twelve", d_k=8),
        "c": builtin_embed("short", d_k=8),
    }
    save_embeddings(tmp_path, items)
    loaded = load_embeddings(tmp_path)
    assert loaded["a"].tokens.shape == (5, 8)
    assert loaded["b"].tokens.shape == (7, 8)
    assert loaded["c"].tokens.shape == (1, 8)


def test_container_truncated_blob(tmp_path):
    save_embeddings(tmp_path, make_items())
    blob = tmp_path / "embeddings.bin"
    blob.write_bytes(blob.read_bytes()[:-10])
    with pytest.raises(DataError, match="checksum|end of blob"):
        load_embeddings(tmp_path)


def test_container_corrupted_payload(tmp_path):
    save_embeddings(tmp_path, make_items())
    blob = tmp_path / "embeddings.bin"
    data = bytearray(blob.read_bytes())
    data[3] ^= 0xFF
    blob.write_bytes(bytes(data))
    with pytest.raises(DataError, match="checksum mismatch"):
        load_embeddings(tmp_path)


def test_container_nan_rejected_by_name(tmp_path):
    emb = builtin_embed("fine text", d_k=8)
    bad = KnowledgeEmbedding(
        tokens=np.full((2, 8), 0.5), mask=np.array([True, True]),
        provider_id="x", text_hash="h")
    bad.tokens[1, 3] = np.nan
    save_embeddings(tmp_path, {"good": emb, "brokenmol": bad})
    with pytest.raises(DataError, match="brokenmol"):
        load_embeddings(tmp_path)


def test_container_mixed_dk_rejected(tmp_path):
    save_embeddings(tmp_path, {"a": builtin_embed("x", d_k=8)})
    index = json.loads((tmp_path / "index.json").read_text())
    entry = dict(index["entries"]["a"])
    entry["d_k"] = 16
    entry["m"] = 1
    index["entries"]["b"] = entry
    (tmp_path / "index.json").write_text(json.dumps(index))
    with pytest.raises(DataError, match="mixed"):
        load_embeddings(tmp_path)


def test_container_missing_index(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_embeddings(tmp_path / "index.json")


# ----------------------------------------------------------------- chat

def make_config(tmp_path, transport, **kw):
    return ChatClientConfig(
        api_base="http://chat.local/v1",
        api_key="secret",
        model="prophet-1",
        cache_dir=tmp_path / "cache",
        sleep=lambda s: None,
        transport=transport,
        **kw,
    )


def chat_body(text):
    return json.dumps({"choices": [{"message": {"content": text}}]}).encode()


def test_chat_success_and_cache(tmp_path):
    calls = []

    def transport(url, body, headers, timeout):
        calls.append((url, json.loads(body.decode())))
        assert headers["Authorization"] == "Bearer secret"
        return chat_body("looks lipophilic")

    config = make_config(tmp_path, transport)
    out1 = generate_knowledge("describe CCO", config)
    out2 = generate_knowledge("describe CCO", config)
    assert out1 == out2 == "looks lipophilic"
    assert len(calls) == 1  # second hit served from cache
    assert calls[0][0] == "http://chat.local/v1/chat/completions"
    assert calls[0][1]["messages"][0]["content"] == "describe CCO"


def test_chat_retries_then_success(tmp_path):
    attempts = []

    def transport(url, body, headers, timeout):
        attempts.append(1)
        if len(attempts) < 3:
            raise OSError("connection reset")
        return chat_body("third time lucky")

    sleeps = []
    config = make_config(tmp_path, transport)
    config.sleep = sleeps.append
    out = generate_knowledge("prompt", config)
    assert out == "third time lucky"
    assert len(attempts) == 3
    assert sleeps == [1.0, 2.0]  # exponential backoff


def test_chat_exhausted_retries(tmp_path):
    def transport(url, body, headers, timeout):
        raise OSError("down")

    config = make_config(tmp_path, transport)
    with pytest.raises(DataError, match="3 attempts"):
        generate_knowledge("prompt", config)


def test_chat_missing_key_no_network(tmp_path):
    def transport(url, body, headers, timeout):
        raise AssertionError("network must not be touched")

    config = make_config(tmp_path, transport)
    config.api_key = None
    with pytest.raises(ConfigError, match="MOLFUSE_CHAT_API_KEY"):
        generate_knowledge("prompt", config)


def test_chat_corrupt_cache_regenerates(tmp_path):
    calls = []

    def transport(url, body, headers, timeout):
        calls.append(1)
        return chat_body("fresh answer")

    config = make_config(tmp_path, transport)
    generate_knowledge("p1", config)
    assert len(calls) == 1
    cache_files = list((tmp_path / "cache").glob("*.txt"))
    assert len(cache_files) == 1
    cache_files[0].write_bytes(b"\xff\xfe invalid utf8 \xff")
    out = generate_knowledge("p1", config)
    assert out == "fresh answer"
    assert len(calls) == 2


def test_chat_from_env(monkeypatch, tmp_path):
    monkeypatch.setenv("MOLFUSE_CHAT_API_BASE", "http://env.local")
    monkeypatch.setenv("MOLFUSE_CHAT_API_KEY", "k")
    monkeypatch.setenv("MOLFUSE_CHAT_MODEL", "m")
    config = ChatClientConfig.from_env(cache_dir=tmp_path)
    assert config.api_base == "http://env.local"
    assert config.api_key == "k"
    assert config.model == "m"

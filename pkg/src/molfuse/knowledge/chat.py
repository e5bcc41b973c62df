"""Chat-completions client for generating chemist knowledge text."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import time
import urllib.error
import urllib.request
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

from molfuse.errors import ConfigError, DataError

log = logging.getLogger(__name__)

ENV_API_BASE = "MOLFUSE_CHAT_API_BASE"
ENV_API_KEY = "MOLFUSE_CHAT_API_KEY"
ENV_MODEL = "MOLFUSE_CHAT_MODEL"

# transport: (url, body_bytes, headers, timeout) -> response body bytes
Transport = Callable[[str, bytes, dict[str, str], float], bytes]


def _urllib_transport(url: str, body: bytes, headers: dict[str, str], timeout: float) -> bytes:
    request = urllib.request.Request(url, data=body, headers=headers, method="POST")
    with urllib.request.urlopen(request, timeout=timeout) as response:
        return response.read()


@dataclass
class ChatClientConfig:
    api_base: str | None = None
    api_key: str | None = None
    model: str | None = None
    cache_dir: str | Path | None = None
    timeout: float = 60.0
    max_attempts: int = 3
    backoff_base: float = 1.0
    transport: Transport = field(default=_urllib_transport, repr=False)
    sleep: Callable[[float], None] = field(default=time.sleep, repr=False)

    @classmethod
    def from_env(cls, cache_dir: str | Path | None = None, **overrides) -> "ChatClientConfig":
        return cls(
            api_base=os.environ.get(ENV_API_BASE),
            api_key=os.environ.get(ENV_API_KEY),
            model=os.environ.get(ENV_MODEL),
            cache_dir=cache_dir,
            **overrides,
        )


def _cache_path(cache_dir: Path, prompt: str, model: str) -> Path:
    digest = hashlib.sha256(f"{model}\x00{prompt}".encode("utf-8")).hexdigest()
    return cache_dir / f"{digest}.txt"


def generate_knowledge(prompt: str, config: ChatClientConfig) -> str:
    if not prompt or not prompt.strip():
        raise DataError("prompt is empty")
    if not config.api_base:
        raise ConfigError(f"chat API base URL is not configured (set {ENV_API_BASE})")
    if not config.api_key:
        raise ConfigError(f"chat API key is not configured (set {ENV_API_KEY})")
    if not config.model:
        raise ConfigError(f"chat model is not configured (set {ENV_MODEL})")

    cache_file = None
    if config.cache_dir is not None:
        cache_dir = Path(config.cache_dir)
        cache_dir.mkdir(parents=True, exist_ok=True)
        cache_file = _cache_path(cache_dir, prompt, config.model)
        if cache_file.exists():
            try:
                text = cache_file.read_bytes().decode("utf-8")
                if text:
                    return text
                log.warning("empty cache entry %s; regenerating", cache_file.name)
            except UnicodeDecodeError:
                log.warning("corrupt cache entry %s; regenerating", cache_file.name)

    url = config.api_base.rstrip("/") + "/chat/completions"
    body = json.dumps({
        "model": config.model,
        "messages": [{"role": "user", "content": prompt}],
    }).encode("utf-8")
    headers = {
        "Content-Type": "application/json",
        "Authorization": f"Bearer {config.api_key}",
    }

    last_error: Exception | None = None
    retries = 0
    for attempt in range(config.max_attempts):
        if attempt > 0:
            config.sleep(config.backoff_base * (2 ** (attempt - 1)))
        try:
            raw = config.transport(url, body, headers, config.timeout)
            payload = json.loads(raw.decode("utf-8"))
            text = payload["choices"][0]["message"]["content"]
            if not isinstance(text, str) or not text:
                raise DataError("chat response has no assistant text")
            retries = attempt
            if retries:
                log.info("chat request succeeded after %d retries", retries)
            if cache_file is not None:
                cache_file.write_text(text, encoding="utf-8")
            return text
        except (urllib.error.URLError, urllib.error.HTTPError, OSError,
                json.JSONDecodeError, KeyError, IndexError, DataError) as exc:
            last_error = exc
            log.warning("chat attempt %d/%d failed: %s", attempt + 1, config.max_attempts, exc)
    raise DataError(
        f"chat request failed after {config.max_attempts} attempts "
        f"({config.max_attempts - 1} retries): {last_error}")

"""Chat-completion backends.

Two kinds behind one ``complete(request)`` interface: a scripted mock that
replays fixture responses per request tag (fully deterministic, used by
tests and offline runs), and an HTTP client for any service speaking the
common chat-completions wire format, with exponential-backoff retries.

Credentials are read from the environment variable named in the config and
never appear in logs or error messages.
"""

from __future__ import annotations

import json
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path

import requests

from stlkit.errors import (
    BackendError,
    BackendTimeout,
    CredentialMissing,
    HttpStatusError,
    ScriptExhausted,
    StoreFormatError,
)

BACKEND_KINDS = ("scripted", "http")
RETRYABLE_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class ChatRequest:
    system_prompt: str
    user_prompt: str
    temperature: float = 0.0
    max_tokens: int = 1024
    tag: str = "default"

    def __post_init__(self):
        if not self.system_prompt or not self.user_prompt:
            raise ValueError("prompts must be non-empty")


@dataclass(frozen=True)
class ChatResponse:
    text: str
    latency: float
    backend_id: str


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "scripted"
    endpoint: str = ""
    model: str = ""
    api_key_env: str = ""
    timeout: float = 30.0
    max_retries: int = 3
    backoff_base: float = 0.5
    script_path: str = ""

    def __post_init__(self):
        kind = "scripted" if self.kind == "scripted-mock" else self.kind
        object.__setattr__(self, "kind", kind)
        if kind not in BACKEND_KINDS:
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if kind == "http" and (not self.endpoint or not self.model):
            raise ValueError("http backend requires endpoint and model")


class Backend:
    """Interface shared by all backends."""

    backend_id = "backend"

    def complete(self, request: ChatRequest) -> ChatResponse:
        raise NotImplementedError


class ScriptedBackend(Backend):
    """Replays scripted responses keyed by request tag, FIFO per tag.

    The fixture is a JSON Lines file (or list) of ``{"tag": ..,
    "response": ..}`` records.  Identical request sequences always produce
    identical response sequences; reported latency is fixed at zero so
    transcripts stay bit-reproducible.
    """

    backend_id = "scripted"

    def __init__(self, entries):
        self._queues: dict[str, list[str]] = {}
        self._lock = threading.Lock()
        for entry in entries:
            tag = str(entry.get("tag", "default"))
            if "response" not in entry:
                raise StoreFormatError("script entry missing 'response'")
            self._queues.setdefault(tag, []).append(str(entry["response"]))

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedBackend":
        entries = []
        with Path(path).open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                line = line.strip()
                if not line:
                    continue
                try:
                    entries.append(json.loads(line))
                except json.JSONDecodeError as e:
                    raise StoreFormatError(f"{path}:{lineno}: invalid JSON: {e}") from None
        return cls(entries)

    def complete(self, request: ChatRequest) -> ChatResponse:
        with self._lock:
            queue = self._queues.get(request.tag)
            if not queue:
                raise ScriptExhausted(request.tag)
            text = queue.pop(0)
        return ChatResponse(text=text, latency=0.0, backend_id=self.backend_id)

    def remaining(self, tag: str) -> int:
        with self._lock:
            return len(self._queues.get(tag, []))


class HttpBackend(Backend):
    """Client for the ``POST {endpoint}/chat/completions`` wire format."""

    def __init__(self, config: BackendConfig, session: requests.Session | None = None):
        if config.kind != "http":
            raise ValueError("HttpBackend needs an http config")
        self.config = config
        self.backend_id = f"http:{config.model}"
        self._session = session or requests.Session()

    def _auth_header(self) -> dict[str, str]:
        if not self.config.api_key_env:
            return {}
        key = os.environ.get(self.config.api_key_env, "")
        if not key:
            raise CredentialMissing(self.config.api_key_env)
        return {"Authorization": f"Bearer {key}"}

    def complete(self, request: ChatRequest) -> ChatResponse:
        url = self.config.endpoint.rstrip("/") + "/chat/completions"
        payload = {
            "model": self.config.model,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }
        headers = self._auth_header()
        attempts = self.config.max_retries + 1
        start = time.monotonic()
        last_error: BackendError | None = None
        for attempt in range(attempts):
            if attempt:
                # Exponential backoff with a small jitter to avoid lockstep.
                delay = self.config.backoff_base * (2 ** (attempt - 1))
                time.sleep(delay + random.uniform(0, delay * 0.1))
            try:
                response = self._session.post(
                    url, json=payload, headers=headers, timeout=self.config.timeout
                )
            except requests.Timeout:
                last_error = BackendTimeout(self.config.timeout)
                continue
            except requests.RequestException as e:
                last_error = BackendError(f"request failed: {e.__class__.__name__}")
                continue
            if response.status_code in RETRYABLE_STATUS:
                last_error = HttpStatusError(response.status_code)
                continue
            if response.status_code != 200:
                raise HttpStatusError(response.status_code, _safe_detail(response))
            return ChatResponse(
                text=_extract_content(response),
                latency=time.monotonic() - start,
                backend_id=self.backend_id,
            )
        assert last_error is not None
        raise last_error


def _safe_detail(response: requests.Response) -> str:
    try:
        return str(response.json().get("error", {}).get("message", ""))[:200]
    except (ValueError, AttributeError):
        return ""


def _extract_content(response: requests.Response) -> str:
    try:
        body = response.json()
        return str(body["choices"][0]["message"]["content"])
    except (ValueError, KeyError, IndexError, TypeError) as e:
        raise BackendError(f"malformed completion body: {e.__class__.__name__}") from None


def make_backend(config: BackendConfig) -> Backend:
    if config.kind == "scripted":
        if not config.script_path:
            raise ValueError("scripted backend requires script_path")
        return ScriptedBackend.from_file(config.script_path)
    return HttpBackend(config)

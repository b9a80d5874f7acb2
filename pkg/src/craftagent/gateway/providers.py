"""Chat/embedding providers: scripted, HTTP (chat-completions wire), replay."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import requests

from .cassette import Cassette, request_digest
from .embedding import EmbeddingVector, unit_normalized

ROLE_TAGS = ("curriculum", "codegen", "verifier", "qa_ask", "qa_answer", "describe", "decompose")


def expected_temperature(role_tag: str) -> float:
    """All roles run at temperature 0 except the curriculum at 0.1."""
    return 0.1 if role_tag == "curriculum" else 0.0


@dataclass(frozen=True)
class ChatRequest:
    system_prompt: str
    user_prompt: str
    temperature: float
    role_tag: str

    def digest(self) -> str:
        return request_digest(self.role_tag, self.system_prompt, self.user_prompt, self.temperature)


@dataclass
class ChatResponse:
    text: str
    prompt_tokens: int = 0
    completion_tokens: int = 0
    provider_id: str = ""
    latency: float = 0.0


class GatewayError(Exception):
    """Provider failed permanently (or retries were exhausted)."""


class TransientProviderError(Exception):
    """Retryable failure: timeouts, connection errors, 429/5xx."""


class ReplayMissError(GatewayError):
    def __init__(self, expected: Optional[str], got: str):
        super().__init__(f"replay miss: recorded digest {expected}, request digest {got}")
        self.expected = expected
        self.got = got


def _word_count(text: str) -> int:
    return len(text.split())


class ScriptedProvider:
    """Deterministic provider driven by a handler(request) -> text callable."""

    provider_id = "scripted"

    def __init__(self, handler: Callable[[ChatRequest], str]):
        self.handler = handler

    def chat(self, request: ChatRequest) -> ChatResponse:
        text = self.handler(request)
        if text is None:
            raise GatewayError(f"scripted provider has no response for role {request.role_tag}")
        return ChatResponse(
            text=text,
            prompt_tokens=_word_count(request.system_prompt) + _word_count(request.user_prompt),
            completion_tokens=_word_count(text),
            provider_id=self.provider_id,
        )


@dataclass
class RoleScript:
    """Convenience handler: per-role FIFO queues of canned responses."""

    queues: dict[str, list[str]] = field(default_factory=dict)
    default: Optional[str] = None

    def add(self, role_tag: str, *responses: str) -> "RoleScript":
        self.queues.setdefault(role_tag, []).extend(responses)
        return self

    def __call__(self, request: ChatRequest) -> str:
        queue = self.queues.get(request.role_tag)
        if queue:
            return queue.pop(0)
        if self.default is not None:
            return self.default
        raise GatewayError(f"no scripted response left for role {request.role_tag}")


class ReplayProvider:
    """Answers from a recorded cassette; never dispatches anywhere."""

    provider_id = "replay"

    def __init__(self, cassette: Cassette, strict: bool = True):
        self.cassette = cassette
        self.strict = strict
        self.cursor = 0

    def chat(self, request: ChatRequest) -> ChatResponse:
        digest = request.digest()
        if self.strict:
            if self.cursor >= len(self.cassette.entries):
                raise ReplayMissError(None, digest)
            entry = self.cassette.entries[self.cursor]
            if entry.digest != digest:
                raise ReplayMissError(entry.digest, digest)
            self.cursor += 1
        else:
            entry = next((e for e in self.cassette.entries if e.digest == digest), None)
            if entry is None:
                raise ReplayMissError(None, digest)
        return ChatResponse(
            text=entry.response_text,
            prompt_tokens=entry.prompt_tokens,
            completion_tokens=entry.completion_tokens,
            provider_id=self.provider_id,
        )


class HttpProvider:
    """Speaks the common chat-completions wire shape.

    POST {base_url}/chat/completions with model/messages/temperature;
    POST {base_url}/embeddings for vectors. Auth comes from the
    environment variable named by `token_env`.
    """

    provider_id = "http"

    def __init__(self, base_url: str, models: dict[str, str], embed_model: str = "",
                 token_env: str = "LLM_API_KEY", timeout: float = 60.0,
                 session: Optional[requests.Session] = None):
        self.base_url = base_url.rstrip("/")
        self.models = models
        self.embed_model = embed_model
        self.token_env = token_env
        self.timeout = timeout
        self.session = session or requests.Session()

    def _headers(self) -> dict[str, str]:
        token = os.environ.get(self.token_env, "")
        headers = {"Content-Type": "application/json"}
        if token:
            headers["Authorization"] = f"Bearer {token}"
        return headers

    def _post(self, path: str, payload: dict) -> dict:
        try:
            response = self.session.post(
                f"{self.base_url}{path}", json=payload, headers=self._headers(),
                timeout=self.timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            raise TransientProviderError(str(exc)) from exc
        if response.status_code == 429 or response.status_code >= 500:
            raise TransientProviderError(f"HTTP {response.status_code}: {response.text[:200]}")
        if response.status_code >= 400:
            raise GatewayError(f"HTTP {response.status_code}: {response.text[:200]}")
        return response.json()

    def chat(self, request: ChatRequest) -> ChatResponse:
        model = self.models.get(request.role_tag) or self.models.get("default", "")
        started = time.monotonic()
        data = self._post("/chat/completions", {
            "model": model,
            "messages": [
                {"role": "system", "content": request.system_prompt},
                {"role": "user", "content": request.user_prompt},
            ],
            "temperature": request.temperature,
        })
        usage = data.get("usage", {})
        return ChatResponse(
            text=data["choices"][0]["message"]["content"],
            prompt_tokens=int(usage.get("prompt_tokens", 0)),
            completion_tokens=int(usage.get("completion_tokens", 0)),
            provider_id=self.provider_id,
            latency=time.monotonic() - started,
        )

    def embed(self, text: str) -> EmbeddingVector:
        data = self._post("/embeddings", {"model": self.embed_model, "input": text})
        return unit_normalized([float(v) for v in data["data"][0]["embedding"]])

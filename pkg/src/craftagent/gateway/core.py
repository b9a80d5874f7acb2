"""Gateway front end: temperature policy, retries, accounting, recording."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

from .cassette import Cassette, CassetteEntry
from .embedding import DEFAULT_DIMENSION, EmbeddingVector, HashEmbedder
from .providers import (
    ChatRequest,
    ChatResponse,
    GatewayError,
    TransientProviderError,
    expected_temperature,
)


class PolicyError(GatewayError):
    """Request violates the role/temperature policy."""


@dataclass
class GatewayConfig:
    max_attempts: int = 3
    backoff_base: float = 0.5
    backoff_factor: float = 2.0
    context_budget_tokens: int = 8000
    embed_dimension: int = DEFAULT_DIMENSION
    # ablations may pin a different temperature per role
    temperature_overrides: dict[str, float] = field(default_factory=dict)
    sleep: Callable[[float], None] = time.sleep


@dataclass
class RoleUsage:
    calls: int = 0
    prompt_tokens: int = 0
    completion_tokens: int = 0


class Gateway:
    """Single entry point for chat and embedding used by every agent role."""

    def __init__(self, provider, embedder=None, cassette: Optional[Cassette] = None,
                 config: Optional[GatewayConfig] = None,
                 on_exchange: Optional[Callable[[ChatRequest, ChatResponse], None]] = None):
        self.provider = provider
        self.embedder = embedder
        self.cassette = cassette  # record target; replay uses a ReplayProvider
        self.config = config or GatewayConfig()
        self.usage: dict[str, RoleUsage] = {}
        self.on_exchange = on_exchange

    def required_temperature(self, role_tag: str) -> float:
        return self.config.temperature_overrides.get(role_tag, expected_temperature(role_tag))

    def request(self, role_tag: str, system_prompt: str, user_prompt: str) -> ChatRequest:
        return ChatRequest(
            system_prompt=system_prompt,
            user_prompt=user_prompt,
            temperature=self.required_temperature(role_tag),
            role_tag=role_tag,
        )

    def chat(self, request: ChatRequest) -> ChatResponse:
        expected = self.required_temperature(request.role_tag)
        if abs(request.temperature - expected) > 1e-9:
            raise PolicyError(
                f"role {request.role_tag} must dispatch at temperature {expected}, "
                f"got {request.temperature}")
        response = self._chat_with_retries(request)
        tally = self.usage.setdefault(request.role_tag, RoleUsage())
        tally.calls += 1
        tally.prompt_tokens += response.prompt_tokens
        tally.completion_tokens += response.completion_tokens
        if self.cassette is not None:
            self.cassette.append(CassetteEntry(
                digest=request.digest(),
                role_tag=request.role_tag,
                temperature=request.temperature,
                response_text=response.text,
                prompt_tokens=response.prompt_tokens,
                completion_tokens=response.completion_tokens,
            ))
        if self.on_exchange is not None:
            self.on_exchange(request, response)
        return response

    def _chat_with_retries(self, request: ChatRequest) -> ChatResponse:
        last: Optional[Exception] = None
        for attempt in range(self.config.max_attempts):
            try:
                return self.provider.chat(request)
            except TransientProviderError as exc:
                last = exc
                if attempt + 1 < self.config.max_attempts:
                    delay = self.config.backoff_base * self.config.backoff_factor ** attempt
                    self.config.sleep(delay)
        raise GatewayError(f"provider failed after {self.config.max_attempts} attempts: {last}")

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        if self.embedder is not None:
            return self.embedder.embed(text)
        if hasattr(self.provider, "embed"):
            return self.provider.embed(text)
        # hermetic fallback so offline runs never need a network
        self.embedder = HashEmbedder(self.config.embed_dimension)
        return self.embedder.embed(text)

    @property
    def embedder_id(self) -> str:
        if self.embedder is not None:
            return self.embedder.embedder_id
        if hasattr(self.provider, "embed"):
            return f"provider:{self.provider.provider_id}"
        return HashEmbedder(self.config.embed_dimension).embedder_id

    def account(self) -> dict[str, dict[str, int]]:
        """Per-role cumulative call and token counts."""
        return {
            role: {
                "calls": usage.calls,
                "prompt_tokens": usage.prompt_tokens,
                "completion_tokens": usage.completion_tokens,
            }
            for role, usage in sorted(self.usage.items())
        }

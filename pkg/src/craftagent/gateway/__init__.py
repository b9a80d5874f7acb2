from .cassette import Cassette, CassetteEntry, request_digest
from .core import Gateway, GatewayConfig, PolicyError, RoleUsage
from .embedding import DEFAULT_DIMENSION, EmbeddingVector, HashEmbedder, cosine, unit_normalized
from .providers import (
    ROLE_TAGS,
    ChatRequest,
    ChatResponse,
    GatewayError,
    HttpProvider,
    ReplayMissError,
    ReplayProvider,
    RoleScript,
    ScriptedProvider,
    TransientProviderError,
    expected_temperature,
)

__all__ = [
    "Cassette",
    "CassetteEntry",
    "request_digest",
    "Gateway",
    "GatewayConfig",
    "PolicyError",
    "RoleUsage",
    "DEFAULT_DIMENSION",
    "EmbeddingVector",
    "HashEmbedder",
    "cosine",
    "unit_normalized",
    "ROLE_TAGS",
    "ChatRequest",
    "ChatResponse",
    "GatewayError",
    "HttpProvider",
    "ReplayMissError",
    "ReplayProvider",
    "RoleScript",
    "ScriptedProvider",
    "TransientProviderError",
    "expected_temperature",
]

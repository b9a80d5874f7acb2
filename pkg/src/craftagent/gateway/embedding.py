"""Embedding vectors plus the deterministic hash embedder used in hermetic runs."""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass

DEFAULT_DIMENSION = 256
_TOKEN_RE = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class EmbeddingVector:
    components: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.components)


def unit_normalized(values: list[float]) -> EmbeddingVector:
    norm = math.sqrt(sum(v * v for v in values))
    if norm == 0.0:
        values = [0.0] * len(values)
        values[0] = 1.0
        norm = 1.0
    return EmbeddingVector(tuple(v / norm for v in values))


def cosine(a: EmbeddingVector, b: EmbeddingVector) -> float:
    if a.dimension != b.dimension:
        raise ValueError(f"dimension mismatch: {a.dimension} vs {b.dimension}")
    if a.components == b.components:
        return 1.0
    return sum(x * y for x, y in zip(a.components, b.components))


class HashEmbedder:
    """Feature-hashes word 1- and 2-grams into a fixed dimension.

    Deterministic and dependency-free so tests and offline runs never
    need a network embedding provider.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension
        self.embedder_id = f"hash-ngram-{dimension}"

    def embed(self, text: str) -> EmbeddingVector:
        if not text:
            raise ValueError("cannot embed empty text")
        tokens = _TOKEN_RE.findall(text.lower())
        grams = list(tokens)
        grams.extend(f"{a} {b}" for a, b in zip(tokens, tokens[1:]))
        values = [0.0] * self.dimension
        for gram in grams:
            digest = hashlib.sha256(gram.encode()).digest()
            index = int.from_bytes(digest[:4], "big") % self.dimension
            sign = 1.0 if digest[4] % 2 == 0 else -1.0
            values[index] += sign
        return unit_normalized(values)

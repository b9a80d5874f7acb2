"""Record/replay storage for chat exchanges, one JSON record per line."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass
from pathlib import Path


def request_digest(role_tag: str, system_prompt: str, user_prompt: str, temperature: float) -> str:
    blob = json.dumps([role_tag, system_prompt, user_prompt, round(temperature, 6)],
                      sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class CassetteEntry:
    digest: str
    role_tag: str
    temperature: float
    response_text: str
    prompt_tokens: int
    completion_tokens: int


class Cassette:
    """Ordered exchange log; `strict` replay consumes entries in order."""

    def __init__(self, entries: list[CassetteEntry] | None = None):
        self.entries: list[CassetteEntry] = list(entries or [])

    def append(self, entry: CassetteEntry) -> None:
        self.entries.append(entry)

    def save(self, path: str | Path) -> None:
        lines = [json.dumps(asdict(e), sort_keys=True) for e in self.entries]
        Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))

    @classmethod
    def load(cls, path: str | Path) -> "Cassette":
        entries = []
        for i, line in enumerate(Path(path).read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                raw = json.loads(line)
                entries.append(CassetteEntry(**raw))
            except (json.JSONDecodeError, TypeError) as exc:
                raise ValueError(f"corrupt cassette entry at line {i}: {exc}") from exc
        return cls(entries)

    def __len__(self) -> int:
        return len(self.entries)

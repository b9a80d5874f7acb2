"""Embedding-indexed store of verified skills with top-k cosine retrieval."""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .gateway import EmbeddingVector, Gateway, cosine
from .skillscript import ApiRegistry, ProgramSource, analyze, parse, print_program

DEFAULT_K = 5


class LibraryError(ValueError):
    pass


@dataclass
class Skill:
    name: str
    description: str
    embedding: EmbeddingVector
    source: ProgramSource
    created_at_iteration: int


@dataclass
class RetrievalQuery:
    plan_text: str
    env_feedback_text: str = ""
    k: int = DEFAULT_K

    def text(self) -> str:
        if self.env_feedback_text:
            return f"{self.plan_text}\n{self.env_feedback_text}"
        return self.plan_text


def describe_skill(source: ProgramSource, gateway: Gateway, template: str) -> str:
    """One-paragraph description from the auxiliary model at temperature 0."""
    request = gateway.request("describe", template, source.text)
    return gateway.chat(request).text.strip()


def _rename_function(source_text: str, old: str, new: str) -> str:
    program = parse(source_text)
    program.function.name = new
    return print_program(program)


class SkillLibrary:
    """Skills are append-only; refinements become new versioned entries."""

    def __init__(self, gateway: Gateway):
        self.gateway = gateway
        self.skills: dict[str, Skill] = {}  # insertion-ordered

    def __len__(self) -> int:
        return len(self.skills)

    def registry(self, skills: Optional[list[Skill]] = None) -> ApiRegistry:
        """Primitives plus the given skills (default: the whole library)."""
        registry = ApiRegistry()
        selected = list(self.skills.values()) if skills is None else skills
        for skill in selected:
            registry.add_skill(parse(skill.source.text).function, doc=skill.description)
        return registry

    def _versioned_name(self, name: str) -> str:
        if name not in self.skills:
            return name
        base = re.sub(r"V\d+$", "", name)
        version = 2
        while f"{base}V{version}" in self.skills:
            version += 1
        return f"{base}V{version}"

    def add_skill(self, source: ProgramSource | str, description: str,
                  created_at_iteration: int = 0) -> Skill:
        if isinstance(source, str):
            text = source
        else:
            text = source.text
        if not description.strip():
            raise LibraryError("skill description must be non-empty")
        program = parse(text)
        name = self._versioned_name(program.function.name)
        if name != program.function.name:
            text = _rename_function(text, program.function.name, name)
            program = parse(text)
        errors = analyze(program, self.registry())
        if errors:
            raise LibraryError(
                "skill failed static checks: " + "; ".join(str(e) for e in errors))
        skill = Skill(
            name=name,
            description=description,
            embedding=self.gateway.embed(description),
            source=ProgramSource(text=text, entry_name=name),
            created_at_iteration=created_at_iteration,
        )
        self.skills[name] = skill
        return skill

    def retrieve(self, query: RetrievalQuery) -> list[Skill]:
        """Top-k skills by cosine similarity; ties go to older skills."""
        if query.k < 1:
            raise LibraryError("k must be >= 1")
        if not self.skills:
            return []
        query_vector = self.gateway.embed(query.text())
        ranked = sorted(
            enumerate(self.skills.values()),
            key=lambda pair: (-cosine(query_vector, pair[1].embedding),
                              pair[1].created_at_iteration, pair[0]),
        )
        return [skill for _, skill in ranked[:query.k]]

    def similarities(self, query: RetrievalQuery) -> dict[str, float]:
        query_vector = self.gateway.embed(query.text())
        return {name: cosine(query_vector, s.embedding) for name, s in self.skills.items()}

    # ----- persistence ---------------------------------------------------

    def persist(self, path: str | Path) -> None:
        root = Path(path)
        root.mkdir(parents=True, exist_ok=True)
        lines = []
        for skill in self.skills.values():
            (root / f"{skill.name}.skill").write_text(skill.source.text)
            (root / f"{skill.name}.desc.txt").write_text(skill.description)
            lines.append(json.dumps({
                "name": skill.name,
                "description_digest": _digest(skill.description),
                "embedder": self.gateway.embedder_id,
                "dimension": skill.embedding.dimension,
                "embedding": list(skill.embedding.components),
                "created_at_iteration": skill.created_at_iteration,
            }, sort_keys=True))
        (root / "manifest").write_text("\n".join(lines) + ("\n" if lines else ""))

    @classmethod
    def load(cls, path: str | Path, gateway: Gateway) -> "SkillLibrary":
        root = Path(path)
        library = cls(gateway)
        manifest = root / "manifest"
        if not manifest.exists():
            raise LibraryError(f"no manifest in {root}")
        for i, line in enumerate(manifest.read_text().splitlines(), start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                name = entry["name"]
            except (json.JSONDecodeError, KeyError) as exc:
                raise LibraryError(f"corrupt manifest line {i}: {exc}") from exc
            source_path = root / f"{name}.skill"
            desc_path = root / f"{name}.desc.txt"
            if not source_path.exists():
                raise LibraryError(f"manifest entry {name}: missing {source_path.name}")
            if not desc_path.exists():
                raise LibraryError(f"manifest entry {name}: missing {desc_path.name}")
            description = desc_path.read_text()
            if _digest(description) != entry["description_digest"]:
                raise LibraryError(f"manifest entry {name}: description digest mismatch")
            text = source_path.read_text()
            program = parse(text)
            if program.function.name != name:
                raise LibraryError(
                    f"manifest entry {name}: source defines {program.function.name!r}")
            components = tuple(float(v) for v in entry["embedding"])
            if len(components) != int(entry["dimension"]):
                raise LibraryError(f"manifest entry {name}: embedding dimension mismatch")
            library.skills[name] = Skill(
                name=name,
                description=description,
                embedding=EmbeddingVector(components),
                source=ProgramSource(text=text, entry_name=name),
                created_at_iteration=int(entry["created_at_iteration"]),
            )
        return library


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()

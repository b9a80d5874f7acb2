"""Loads the versioned prompt template files bundled with the package."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources


@lru_cache(maxsize=None)
def load_template(name: str) -> str:
    return resources.files("craftagent.prompts").joinpath(f"{name}.txt").read_text()

"""Item-name rendering shared by feedback messages and task parsing."""

from __future__ import annotations

VOWELS = "aeiou"


def humanize(name: str) -> str:
    """``iron_chestplate`` -> ``iron chestplate``."""
    return name.replace("_", " ").strip()


def snake(text: str) -> str:
    """``iron chestplate`` -> ``iron_chestplate``."""
    return "_".join(text.lower().split())


def article(name: str) -> str:
    word = humanize(name)
    return "an" if word[:1] in VOWELS else "a"


def pluralize(name: str, count: int) -> str:
    """Naive plural for feedback text; names already ending in 's' are kept."""
    word = humanize(name)
    if count == 1 or word.endswith("s"):
        return word
    if word.endswith(("ch", "sh", "x")):
        return word + "es"
    return word + "s"

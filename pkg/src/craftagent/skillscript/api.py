"""Callable surface exposed to skill programs: primitives plus library skills."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .ast import Function

REQUIRED = object()


@dataclass(frozen=True)
class Param:
    name: str
    default: object = REQUIRED

    def render(self) -> str:
        if self.default is REQUIRED:
            return self.name
        if isinstance(self.default, bool):
            return f"{self.name}={'true' if self.default else 'false'}"
        if isinstance(self.default, str):
            return f'{self.name}="{self.default}"'
        return f"{self.name}={self.default}"


@dataclass(frozen=True)
class Signature:
    name: str
    params: tuple[Param, ...]
    doc: str
    kind: str  # "primitive" | "skill"

    @property
    def min_args(self) -> int:
        return sum(1 for p in self.params if p.default is REQUIRED)

    @property
    def max_args(self) -> int:
        return len(self.params)

    def render(self) -> str:
        return f"{self.name}({', '.join(p.render() for p in self.params)})"


def _sig(name: str, params: list[Param], doc: str) -> Signature:
    return Signature(name, tuple(params), doc, "primitive")


# Canonical primitive order used for deterministic doc rendering.
PRIMITIVES: list[Signature] = [
    _sig("mine_block", [Param("name"), Param("count", 1)],
         "Mine up to `count` blocks of the named kind within 32 blocks and collect the drops."),
    _sig("craft_item", [Param("name"), Param("count", 1)],
         "Craft the item from inventory ingredients; most recipes need a crafting table nearby."),
    _sig("smelt_item", [Param("name"), Param("fuel"), Param("count", 1)],
         "Smelt items in a furnace within 32 blocks, burning the named fuel."),
    _sig("place_item", [Param("name"), Param("dx", 0), Param("dz", 0)],
         "Place a block from the inventory at the given offset; (0, 0) picks a free spot nearby."),
    _sig("kill_mob", [Param("name"), Param("timeout", 300)],
         "Fight the nearest mob of that kind within 32 blocks and collect its drops."),
    _sig("explore_until", [Param("direction"), Param("max_ticks", 60), Param("until", False)],
         "Walk one block per tick in a compass direction until `until` becomes true or time runs out."),
    _sig("goto", [Param("x"), Param("y"), Param("z"), Param("range", 1)],
         "Walk to within `range` blocks of the position, digging through terrain if needed."),
    _sig("get_from_chest", [Param("x"), Param("y"), Param("z"), Param("name"), Param("count", 1)],
         "Move to the chest at the position and take items from it."),
    _sig("deposit_to_chest", [Param("x"), Param("y"), Param("z"), Param("name"), Param("count", 1)],
         "Move to the chest at the position and put items into it."),
    _sig("eat_item", [Param("name")],
         "Eat one food item from the inventory to restore hunger."),
    _sig("equip_item", [Param("name")],
         "Equip a held item; armor goes to its slot, anything else to the hand."),
]

# Query helpers usable inside expressions.
BUILTINS: list[Signature] = [
    _sig("inventory_count", [Param("name")], "Number of the named item currently held."),
    _sig("block_nearby", [Param("name")], "True if a block of that kind is within 32 blocks."),
    _sig("entity_nearby", [Param("name")], "True if a mob of that kind is within 32 blocks."),
    _sig("position_x", [], "Agent x coordinate."),
    _sig("position_y", [], "Agent y coordinate."),
    _sig("position_z", [], "Agent z coordinate."),
    _sig("health", [], "Agent health, 0..20."),
    _sig("hunger", [], "Agent hunger, 0..20."),
]

PRIMITIVE_NAMES = {s.name for s in PRIMITIVES}
BUILTIN_NAMES = {s.name for s in BUILTINS}


@dataclass
class StoredSkill:
    signature: Signature
    function: Function


class ApiRegistry:
    """Primitives plus the library skills currently in scope."""

    def __init__(self, skills: Optional[dict[str, StoredSkill]] = None):
        self.primitives = {s.name: s for s in PRIMITIVES}
        self.builtins = {s.name: s for s in BUILTINS}
        self.skills: dict[str, StoredSkill] = dict(skills or {})

    def add_skill(self, function: Function, doc: str = "") -> Signature:
        if function.name in self.primitives or function.name in self.builtins:
            raise ValueError(f"{function.name} shadows a primitive")
        if function.name in self.skills:
            raise ValueError(f"skill {function.name} already registered")
        signature = Signature(
            function.name, tuple(Param(p) for p in function.params), doc, "skill")
        self.skills[function.name] = StoredSkill(signature, function)
        return signature

    def resolve(self, name: str) -> Optional[Signature]:
        if name in self.primitives:
            return self.primitives[name]
        if name in self.skills:
            return self.skills[name].signature
        return None

    def skill_function(self, name: str) -> Function:
        return self.skills[name].function

    def copy(self) -> "ApiRegistry":
        return ApiRegistry(dict(self.skills))


def render_api_docs(registry: ApiRegistry) -> str:
    """Deterministic signature listing included in code-generation prompts."""
    lines = ["Environment primitives:"]
    for sig in PRIMITIVES:
        lines.append(f"  {sig.render()}")
        lines.append(f"      {sig.doc}")
    lines.append("")
    lines.append("Condition helpers (usable in expressions):")
    for sig in BUILTINS:
        lines.append(f"  {sig.render()}")
        lines.append(f"      {sig.doc}")
    if registry.skills:
        lines.append("")
        lines.append("Library skills in scope:")
        for name in sorted(registry.skills):
            stored = registry.skills[name]
            lines.append(f"  {stored.signature.render()}")
            if stored.signature.doc:
                first = stored.signature.doc.strip().splitlines()[0]
                lines.append(f"      {first}")
    return "\n".join(lines) + "\n"

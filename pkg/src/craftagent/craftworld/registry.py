"""Loads the block/recipe/mob data tables that define the craft world."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

import yaml


class RegistryError(ValueError):
    """Raised when a data table is malformed or internally inconsistent."""


@dataclass(frozen=True)
class BlockInfo:
    name: str
    drops: dict[str, int]
    tier: str
    tool: str


@dataclass(frozen=True)
class Recipe:
    output: str
    count: int
    inputs: dict[str, int]
    station: str  # none | crafting_table


@dataclass(frozen=True)
class MobInfo:
    name: str
    health: int
    damage: int
    drops: dict[str, int]


@dataclass
class Registry:
    """In-memory view of registry.yaml plus derived lookup helpers."""

    tool_tiers: list[str]
    blocks: dict[str, BlockInfo]
    recipes: dict[str, Recipe]
    smelting: dict[str, str]
    fuels: dict[str, int]
    mobs: dict[str, MobInfo]
    weapons: dict[str, int]
    foods: dict[str, int]
    _tier_rank: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self._tier_rank = {t: i for i, t in enumerate(self.tool_tiers)}

    def tier_rank(self, tier: str) -> int:
        if tier not in self._tier_rank:
            raise RegistryError(f"unknown tool tier: {tier}")
        return self._tier_rank[tier]

    def recipe_for(self, item: str) -> Optional[Recipe]:
        return self.recipes.get(item)

    def smelt_output(self, item: str) -> Optional[str]:
        return self.smelting.get(item)

    def is_placeable(self, item: str) -> bool:
        return item in self.blocks

    def best_tool(self, inventory: dict[str, int], family: str) -> tuple[Optional[str], str]:
        """Highest-tier tool of `family` held; returns (item or None, tier)."""
        best: Optional[str] = None
        best_rank = 0  # bare hands rank as tier "none"
        for item, count in inventory.items():
            if count <= 0 or not item.endswith("_" + family):
                continue
            tier = item.rsplit("_", 1)[0]
            rank = self._tier_rank.get(tier)
            if rank is not None and rank > best_rank:
                best, best_rank = item, rank
        return best, self.tool_tiers[best_rank]

    def weapon_damage(self, item: Optional[str]) -> int:
        if item is None:
            return 1
        return self.weapons.get(item, 1)

    def item_sources(self) -> dict[str, set[str]]:
        """item -> set of source tags, used for reachability validation."""
        sources: dict[str, set[str]] = {}

        def add(item: str, tag: str) -> None:
            sources.setdefault(item, set()).add(tag)

        for block in self.blocks.values():
            for item in block.drops:
                add(item, f"block:{block.name}")
        for mob in self.mobs.values():
            for item in mob.drops:
                add(item, f"mob:{mob.name}")
        for recipe in self.recipes.values():
            add(recipe.output, f"recipe:{recipe.output}")
        for inp, out in self.smelting.items():
            add(out, f"smelt:{inp}")
        return sources

    def validate(self) -> None:
        """Every item referenced by a recipe/smelt must have some source."""
        sources = self.item_sources()
        referenced: set[str] = set()
        for recipe in self.recipes.values():
            referenced.update(recipe.inputs)
        referenced.update(self.smelting)
        referenced.update(self.fuels)
        for item in sorted(referenced):
            if item not in sources:
                raise RegistryError(f"unreachable item: {item}")
        for name, recipe in self.recipes.items():
            if recipe.station not in ("none", "crafting_table"):
                raise RegistryError(f"recipe {name}: unknown station {recipe.station}")
            if recipe.count < 1 or any(n < 1 for n in recipe.inputs.values()):
                raise RegistryError(f"recipe {name}: non-positive count")
        for block in self.blocks.values():
            self.tier_rank(block.tier)


def _load_yaml(name: str) -> dict:
    text = resources.files("craftagent.craftworld.data").joinpath(name).read_text()
    return yaml.safe_load(text)


def load_registry(path: Optional[str] = None) -> Registry:
    if path is None:
        raw = _load_yaml("registry.yaml")
    else:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    blocks = {
        name: BlockInfo(name=name, drops=dict(info["drops"]), tier=info["tier"], tool=info.get("tool", "none"))
        for name, info in raw["blocks"].items()
    }
    recipes = {}
    for entry in raw["recipes"]:
        recipe = Recipe(
            output=entry["output"],
            count=int(entry["count"]),
            inputs={k: int(v) for k, v in entry["inputs"].items()},
            station=entry.get("station", "none"),
        )
        if recipe.output in recipes:
            raise RegistryError(f"duplicate recipe for {recipe.output}")
        recipes[recipe.output] = recipe
    mobs = {
        name: MobInfo(name=name, health=int(m["health"]), damage=int(m["damage"]), drops=dict(m["drops"]))
        for name, m in raw["mobs"].items()
    }
    registry = Registry(
        tool_tiers=list(raw["tool_tiers"]),
        blocks=blocks,
        recipes=recipes,
        smelting=dict(raw["smelting"]),
        fuels={k: int(v) for k, v in raw["fuels"].items()},
        mobs=mobs,
        weapons={k: int(v) for k, v in raw["weapons"].items()},
        foods={k: int(v) for k, v in raw["foods"].items()},
    )
    registry.validate()
    return registry

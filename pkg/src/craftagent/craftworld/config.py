"""World configuration: seeded terrain, biome layout, ore bands, mob tables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import yaml

from .registry import Registry, RegistryError, load_registry

REGION = 32  # regions are 32x32 columns; also the sensing radius in blocks


class ConfigError(ValueError):
    """Raised for malformed or unsatisfiable world configuration."""


@dataclass
class BiomeFeatures:
    surface: str = "grass_block"
    tree: Optional[str] = None
    trees: int = 0
    water: bool = False


@dataclass
class WorldConfig:
    seed: int = 0
    day_length_ticks: int = 24000
    biome_layout: dict[tuple[int, int], str] = field(default_factory=dict)
    biome_palette: list[str] = field(default_factory=list)
    biome_features: dict[str, BiomeFeatures] = field(default_factory=dict)
    ore_depth_table: dict[str, tuple[int, int, int]] = field(default_factory=dict)
    mob_spawn_table: dict[str, list[tuple[str, int]]] = field(default_factory=dict)
    base_height: int = 64
    height_variation: int = 4
    bedrock_floor: int = -60
    world_radius: int = 100000
    ticks_per_call: int = 10
    hunger_decay_every: int = 50
    starve_damage: int = 2
    goto_step_budget: int = 4000
    loot_chest_per_16_regions: int = 3

    def validate(self, registry: Registry) -> None:
        if self.day_length_ticks < 6:
            raise ConfigError("day_length_ticks must be at least 6")
        if not self.biome_palette:
            raise ConfigError("biome palette is empty")
        for biome in list(self.biome_layout.values()) + self.biome_palette:
            if biome not in self.biome_features:
                raise ConfigError(f"biome without features: {biome}")
        for biome, feats in self.biome_features.items():
            if feats.surface not in registry.blocks:
                raise ConfigError(f"biome {biome}: unknown surface block {feats.surface}")
            if feats.tree is not None and feats.tree not in registry.blocks:
                raise ConfigError(f"biome {biome}: unknown tree block {feats.tree}")
        for ore, (lo, hi, abundance) in self.ore_depth_table.items():
            if ore not in registry.blocks:
                raise ConfigError(f"ore table: unknown block {ore}")
            if lo > hi:
                raise ConfigError(f"ore table: {ore} has min_y > max_y")
            if abundance < 1:
                raise ConfigError(f"ore table: {ore} has non-positive abundance")
            if hi >= self.base_height - 2:
                raise ConfigError(f"ore table: {ore} band rises above ground")
            if lo <= self.bedrock_floor:
                raise ConfigError(f"ore table: {ore} band reaches bedrock")
        for biome, table in self.mob_spawn_table.items():
            for name, weight in table:
                if name not in registry.mobs:
                    raise ConfigError(f"mob table: unknown mob {name}")
                if weight < 0:
                    raise ConfigError(f"mob table: negative weight for {name}")


def _parse_region_key(key: str) -> tuple[int, int]:
    try:
        rx, rz = key.split(",")
        return int(rx), int(rz)
    except ValueError as exc:
        raise ConfigError(f"bad region key {key!r}, expected 'rx,rz'") from exc


def config_from_dict(raw: dict, seed: Optional[int] = None) -> WorldConfig:
    biomes = raw.get("biomes", {})
    features = {
        name: BiomeFeatures(
            surface=f.get("surface", "grass_block"),
            tree=f.get("tree"),
            trees=int(f.get("trees", 0)),
            water=bool(f.get("water", False)),
        )
        for name, f in biomes.get("features", {}).items()
    }
    ore_table = {
        name: (int(band[0]), int(band[1]), int(band[2]))
        for name, band in raw.get("ores", {}).items()
    }
    mob_table = {
        biome: [(m["name"], int(m["weight"])) for m in entries]
        for biome, entries in raw.get("mob_spawns", {}).items()
    }
    return WorldConfig(
        seed=int(raw.get("seed", 0)) if seed is None else seed,
        day_length_ticks=int(raw.get("day_length_ticks", 24000)),
        biome_layout={_parse_region_key(k): v for k, v in biomes.get("layout", {}).items()},
        biome_palette=list(biomes.get("palette", [])),
        biome_features=features,
        ore_depth_table=ore_table,
        mob_spawn_table=mob_table,
        base_height=int(raw.get("base_height", 64)),
        height_variation=int(raw.get("height_variation", 4)),
        bedrock_floor=int(raw.get("bedrock_floor", -60)),
        world_radius=int(raw.get("world_radius", 100000)),
        ticks_per_call=int(raw.get("ticks_per_call", 10)),
        hunger_decay_every=int(raw.get("hunger_decay_every", 50)),
        starve_damage=int(raw.get("starve_damage", 2)),
        goto_step_budget=int(raw.get("goto_step_budget", 4000)),
        loot_chest_per_16_regions=int(raw.get("loot_chest_per_16_regions", 3)),
    )


def default_config(seed: Optional[int] = None) -> WorldConfig:
    from .registry import _load_yaml

    return config_from_dict(_load_yaml("default_world.yaml"), seed=seed)


def load_config(path: str, seed: Optional[int] = None) -> WorldConfig:
    with open(path) as fh:
        raw = yaml.safe_load(fh)
    return config_from_dict(raw, seed=seed)


__all__ = [
    "REGION",
    "ConfigError",
    "BiomeFeatures",
    "WorldConfig",
    "config_from_dict",
    "default_config",
    "load_config",
    "Registry",
    "RegistryError",
    "load_registry",
]

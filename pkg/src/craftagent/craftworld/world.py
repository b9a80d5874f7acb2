"""Deterministic seeded craft world with the agent control primitives.

The world is a sparse voxel abstraction: terrain is an implicit height
field, and every minable deposit (trees, bulk dirt/stone, ore veins),
mob, and loot chest is a point of interest generated lazily per 32x32
region from the seed. Identical (config, primitive sequence) pairs
produce byte-identical event logs.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

from ..naming import article, humanize, pluralize
from .config import REGION, ConfigError, WorldConfig, default_config
from .registry import Registry, load_registry

SENSE_RADIUS = 32
TIME_LABELS = ["sunrise", "day", "noon", "sunset", "night", "midnight"]
EQUIP_SLOTS = ["hand", "head", "torso", "legs", "feet", "off_hand"]
STATIONS = ("crafting_table", "furnace")

DIRECTIONS = {
    "north": (0, -1),
    "south": (0, 1),
    "east": (1, 0),
    "west": (-1, 0),
    "northeast": (1, -1),
    "northwest": (-1, -1),
    "southeast": (1, 1),
    "southwest": (-1, 1),
}

LOOT_TEMPLATES = [
    {"coal": 3},
    {"string": 2},
    {"iron_ingot": 1},
    {"torch": 4},
]


class ActionError(Exception):
    """Execution-error class failures (unknown names, broken preconditions)."""

    def __init__(self, kind: str, message: str):
        super().__init__(message)
        self.kind = kind
        self.message = message


@dataclass
class Poi:
    poi_id: str
    pos: tuple[int, int, int]
    block: str
    qty: int


@dataclass
class Mob:
    mob_id: str
    name: str
    pos: tuple[int, int, int]
    alive: bool = True


@dataclass
class Region:
    rx: int
    rz: int
    biome: str
    pois: list[Poi]
    mobs: list[Mob]
    chest_pos: Optional[tuple[int, int, int]] = None
    chest_loot: Optional[dict[str, int]] = None


@dataclass
class AgentState:
    inventory: dict[str, int]
    equipment: dict[str, str]
    nearby_blocks: list[str]
    recently_seen_blocks: list[str]
    nearby_entities: list[str]
    known_chests: dict[str, object]  # "(x, y, z)" -> "Unknown" | {item: count}
    biome: str
    time_of_day: str
    health: int
    hunger: int
    position: tuple[int, int, int]

    def to_dict(self) -> dict:
        return {
            "inventory": dict(self.inventory),
            "equipment": dict(self.equipment),
            "nearby_blocks": list(self.nearby_blocks),
            "recently_seen_blocks": list(self.recently_seen_blocks),
            "nearby_entities": list(self.nearby_entities),
            "known_chests": {k: (v if v == "Unknown" else dict(v)) for k, v in self.known_chests.items()},
            "biome": self.biome,
            "time_of_day": self.time_of_day,
            "health": self.health,
            "hunger": self.hunger,
            "position": list(self.position),
        }


STATE_LABELS = {
    "inventory": "Inventory",
    "equipment": "Equipment",
    "nearby_blocks": "Nearby blocks",
    "position": "Position",
    "nearby_entities": "Nearby entities",
    "recently_seen_blocks": "Recently seen blocks",
    "biome": "Biome",
    "health": "Health",
    "hunger": "Hunger",
    "time": "Time",
    "chests": "Chests",
}


def render_state(state: AgentState, fields: Optional[Iterable[str]] = None,
                 inventory_override: Optional[dict[str, int]] = None) -> str:
    """Stable text rendering of (a subset of) the agent state for prompts."""
    if fields is None:
        fields = list(STATE_LABELS)
    lines = []
    for key in fields:
        label = STATE_LABELS[key]
        if key == "inventory":
            inv = inventory_override if inventory_override is not None else state.inventory
            lines.append(f"{label}: {dict(sorted(inv.items()))}")
        elif key == "equipment":
            lines.append(f"{label}: {dict(sorted(state.equipment.items()))}")
        elif key == "nearby_blocks":
            lines.append(f"{label}: {sorted(state.nearby_blocks)}")
        elif key == "position":
            lines.append(f"{label}: {tuple(state.position)}")
        elif key == "nearby_entities":
            lines.append(f"{label}: {sorted(state.nearby_entities)}")
        elif key == "recently_seen_blocks":
            lines.append(f"{label}: {sorted(state.recently_seen_blocks)}")
        elif key == "biome":
            lines.append(f"{label}: {state.biome}")
        elif key == "health":
            lines.append(f"{label}: {state.health}/20")
        elif key == "hunger":
            lines.append(f"{label}: {state.hunger}/20")
        elif key == "time":
            lines.append(f"{label}: {state.time_of_day}")
        elif key == "chests":
            chests = {k: (v if v == "Unknown" else dict(sorted(v.items())))
                      for k, v in sorted(state.known_chests.items())}
            lines.append(f"{label}: {chests}")
    return "\n".join(lines)


@dataclass
class PrimitiveResult:
    op: str
    messages: list[str]
    data: dict = field(default_factory=dict)


def _dist(a: tuple[int, int, int], b: tuple[int, int, int]) -> float:
    return math.sqrt((a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2 + (a[2] - b[2]) ** 2)


def _titled(name: str) -> str:
    """``iron_chestplate`` -> ``an iron chestplate``; plural names skip the article."""
    word = humanize(name)
    return word if word.endswith("s") else f"{article(name)} {word}"


class World:
    """Single-actor mutable world; see create_world()."""

    def __init__(self, config: WorldConfig, registry: Optional[Registry] = None,
                 event_sink: Optional[Callable[[dict], None]] = None):
        self.registry = registry if registry is not None else load_registry()
        self.registry.validate()
        config.validate(self.registry)
        self.config = config
        self.event_sink = event_sink

        self.tick = 0
        self.call_count = 0
        self.inventory: Counter = Counter()
        self.equipment: dict[str, str] = {}
        self.items_ever: set[str] = set()
        self.edits: dict[tuple[int, int, int], str] = {}
        self.chests: dict[tuple[int, int, int], Counter] = {}
        self.known_chests: dict[tuple[int, int, int], Optional[dict[str, int]]] = {}
        self.program_placements: list[tuple[tuple[int, int, int], str]] = []
        self.health = 20
        self.hunger = 20
        self.deaths = 0
        self._regions: dict[tuple[int, int], Region] = {}
        self._seen_blocks: set[str] = set()
        self._nearby_blocks: set[str] = set()
        self._nearby_entities: set[str] = set()

        self.position = self._spawn_position()
        self.spawn = self.position
        self._sense()

    # ----- deterministic generation -------------------------------------

    def _rng(self, *key) -> random.Random:
        data = repr((self.config.seed,) + key).encode()
        seed = int.from_bytes(hashlib.sha256(data).digest()[:8], "big")
        return random.Random(seed)

    def height(self, x: int, z: int) -> int:
        var = self.config.height_variation
        if var <= 0:
            return self.config.base_height
        return self.config.base_height + self._rng("h", x, z).randrange(var + 1)

    def biome_at_region(self, rx: int, rz: int) -> str:
        pinned = self.config.biome_layout.get((rx, rz))
        if pinned is not None:
            return pinned
        return self._rng("biome", rx, rz).choice(self.config.biome_palette)

    def _region(self, rx: int, rz: int) -> Region:
        key = (rx, rz)
        cached = self._regions.get(key)
        if cached is not None:
            return cached
        biome = self.biome_at_region(rx, rz)
        feats = self.config.biome_features[biome]
        x0, z0 = rx * REGION, rz * REGION
        pois: list[Poi] = []

        def surface_pos(rng: random.Random) -> tuple[int, int, int]:
            x, z = x0 + rng.randrange(REGION), z0 + rng.randrange(REGION)
            return (x, self.height(x, z) + 1, z)

        rng = self._rng("region", rx, rz)
        # bulk deposits: surface block, dirt, stone (a few blocks down)
        sx, sz = x0 + REGION // 2, z0 + REGION // 2
        h = self.height(sx, sz)
        pois.append(Poi(f"{rx},{rz}:surface", (sx, h, sz), feats.surface, 2048))
        if feats.surface != "dirt":
            pois.append(Poi(f"{rx},{rz}:dirt", (sx + 1, h, sz), "dirt", 2048))
        pois.append(Poi(f"{rx},{rz}:stone", (sx, h - 6, sz + 1), "stone", 8192))
        for i in range(feats.trees):
            x, y, z = surface_pos(rng)
            pois.append(Poi(f"{rx},{rz}:tree:{i}", (x, y, z), feats.tree, 4))
        for ore in sorted(self.config.ore_depth_table):
            lo, hi, abundance = self.config.ore_depth_table[ore]
            orng = self._rng("ore", ore, rx, rz)
            x = x0 + orng.randrange(REGION)
            z = z0 + orng.randrange(REGION)
            y = lo + orng.randrange(hi - lo + 1)
            pois.append(Poi(f"{rx},{rz}:ore:{ore}", (x, y, z), ore, abundance))

        mobs: list[Mob] = []
        table = self.config.mob_spawn_table.get(biome, [])
        names = [n for n, w in table if w > 0]
        weights = [w for _, w in table if w > 0]
        if names:
            mrng = self._rng("mobs", rx, rz)
            count = 2 + mrng.randrange(3)
            for i, name in enumerate(mrng.choices(names, weights=weights, k=count)):
                mobs.append(Mob(f"{rx},{rz}:mob:{i}", name, surface_pos(mrng)))

        chest_pos = None
        chest_loot = None
        crng = self._rng("chest", rx, rz)
        if crng.randrange(16) < self.config.loot_chest_per_16_regions:
            chest_pos = surface_pos(crng)
            chest_loot = dict(crng.choice(LOOT_TEMPLATES))

        region = Region(rx, rz, biome, pois, mobs, chest_pos, chest_loot)
        self._regions[key] = region
        return region

    def _spawn_position(self) -> tuple[int, int, int]:
        # nearest land region to the origin with trees, scanning outward
        for radius in range(0, 16):
            candidates = []
            for rx in range(-radius, radius + 1):
                for rz in range(-radius, radius + 1):
                    if max(abs(rx), abs(rz)) != radius:
                        continue
                    biome = self.biome_at_region(rx, rz)
                    feats = self.config.biome_features[biome]
                    if feats.tree is not None and feats.trees > 0 and not feats.water:
                        candidates.append((rx, rz))
            if candidates:
                rx, rz = sorted(candidates)[0]
                rng = self._rng("spawn")
                x = rx * REGION + rng.randrange(REGION)
                z = rz * REGION + rng.randrange(REGION)
                return (x, self.height(x, z) + 1, z)
        raise ConfigError("no spawnable biome with trees in palette")

    # ----- sensing -------------------------------------------------------

    def _nearby_regions(self) -> list[Region]:
        x, _, z = self.position
        rx0, rx1 = (x - SENSE_RADIUS) // REGION, (x + SENSE_RADIUS) // REGION
        rz0, rz1 = (z - SENSE_RADIUS) // REGION, (z + SENSE_RADIUS) // REGION
        return [self._region(rx, rz)
                for rx in range(rx0, rx1 + 1) for rz in range(rz0, rz1 + 1)]

    def _sense(self) -> None:
        blocks: set[str] = set()
        entities: set[str] = set()
        pos = self.position
        for region in self._nearby_regions():
            for poi in region.pois:
                if poi.qty > 0 and _dist(pos, poi.pos) <= SENSE_RADIUS:
                    blocks.add(poi.block)
            for mob in region.mobs:
                if mob.alive and _dist(pos, mob.pos) <= SENSE_RADIUS:
                    entities.add(mob.name)
            if region.chest_pos is not None and _dist(pos, region.chest_pos) <= SENSE_RADIUS:
                blocks.add("chest")
                self._touch_chest(region)
                if region.chest_pos not in self.known_chests:
                    self.known_chests[region.chest_pos] = None
        for bpos, name in self.edits.items():
            if _dist(pos, bpos) <= SENSE_RADIUS:
                blocks.add(name)
                if name == "chest" and bpos not in self.known_chests:
                    self.known_chests[bpos] = None
        self._nearby_blocks = blocks
        self._nearby_entities = entities
        self._seen_blocks |= blocks

    def _touch_chest(self, region: Region) -> None:
        if region.chest_pos is not None and region.chest_pos not in self.chests:
            self.chests[region.chest_pos] = Counter(region.chest_loot or {})

    def block_nearby(self, name: str) -> bool:
        return name in self._nearby_blocks

    def entity_nearby(self, name: str) -> bool:
        return name in self._nearby_entities

    def inventory_count(self, name: str) -> int:
        return self.inventory.get(name, 0)

    def current_biome(self) -> str:
        x, _, z = self.position
        return self._region(x // REGION, z // REGION).biome

    def time_of_day(self) -> str:
        idx = (self.tick % self.config.day_length_ticks) * len(TIME_LABELS) // self.config.day_length_ticks
        return TIME_LABELS[idx]

    def observe(self) -> AgentState:
        self._sense()
        inv = {k: v for k, v in sorted(self.inventory.items()) if v > 0}
        nearby = sorted(self._nearby_blocks)
        recently = sorted(self._seen_blocks - self._nearby_blocks - set(inv))
        chests = {}
        for cpos in sorted(self.known_chests):
            contents = self.known_chests[cpos]
            key = f"({cpos[0]}, {cpos[1]}, {cpos[2]})"
            chests[key] = "Unknown" if contents is None else dict(sorted(contents.items()))
        return AgentState(
            inventory=inv,
            equipment=dict(sorted(self.equipment.items())),
            nearby_blocks=nearby,
            recently_seen_blocks=recently,
            nearby_entities=sorted(self._nearby_entities),
            known_chests=chests,
            biome=self.current_biome(),
            time_of_day=self.time_of_day(),
            health=self.health,
            hunger=self.hunger,
            position=self.position,
        )

    # ----- bookkeeping ---------------------------------------------------

    def _credit(self, item: str, count: int) -> None:
        if count <= 0:
            return
        self.inventory[item] += count
        self.items_ever.add(item)

    def _debit(self, item: str, count: int) -> None:
        self.inventory[item] -= count
        if self.inventory[item] <= 0:
            del self.inventory[item]

    def _snapshot(self) -> dict:
        return {
            "inv": dict(self.inventory),
            "pos": self.position,
            "health": self.health,
            "hunger": self.hunger,
        }

    def _delta_digest(self, before: dict) -> str:
        after = self._snapshot()
        inv_delta = {}
        for item in set(before["inv"]) | set(after["inv"]):
            d = after["inv"].get(item, 0) - before["inv"].get(item, 0)
            if d:
                inv_delta[item] = d
        delta = {
            "inv": dict(sorted(inv_delta.items())),
            "pos": [after["pos"][i] - before["pos"][i] for i in range(3)],
            "health": after["health"] - before["health"],
            "hunger": after["hunger"] - before["hunger"],
        }
        blob = json.dumps(delta, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()[:16]

    def _advance_clock(self) -> list[str]:
        self.tick += self.config.ticks_per_call
        self.call_count += 1
        messages: list[str] = []
        if self.config.hunger_decay_every > 0 and self.call_count % self.config.hunger_decay_every == 0:
            if self.hunger > 0:
                self.hunger -= 1
            else:
                self.health = max(0, self.health - self.config.starve_damage)
                messages.append("I am starving.")
                if self.health == 0:
                    messages.extend(self.apply_death().messages)
        return messages

    def _run_primitive(self, op: str, args: dict, impl: Callable[[], PrimitiveResult]) -> PrimitiveResult:
        before = self._snapshot()
        tick = self.tick
        try:
            result = impl()
        except ActionError as err:
            self._emit_event(tick, op, args, [], before, error=f"{err.kind}: {err.message}")
            raise
        result.messages.extend(self._advance_clock())
        self._sense()
        self._emit_event(tick, op, args, result.messages, before)
        return result

    def _emit_event(self, tick: int, op: str, args: dict, feedback: list[str],
                    before: dict, error: Optional[str] = None) -> None:
        if self.event_sink is None:
            return
        record = {
            "type": "primitive",
            "tick": tick,
            "op": op,
            "args": args,
            "feedback": list(feedback),
            "delta": self._delta_digest(before),
        }
        if error is not None:
            record["error"] = error
        self.event_sink(record)

    # ----- primitives ----------------------------------------------------

    def mine_block(self, name: str, count: int = 1) -> PrimitiveResult:
        return self._run_primitive(
            "mine_block", {"name": name, "count": count}, lambda: self._mine_block(name, count))

    def _resolve_block(self, name: str) -> str:
        """Accepts a block name or an item name that some block drops."""
        if name in self.registry.blocks:
            return name
        candidates = sorted(b for b, info in self.registry.blocks.items() if name in info.drops)
        if not candidates:
            raise ActionError("unknown_block", f"unknown block: {name}")
        self._sense()
        for block in candidates:
            if block in self._nearby_blocks:
                return block
        return candidates[0]

    def _mine_block(self, name: str, count: int) -> PrimitiveResult:
        if count < 1:
            raise ActionError("precondition", f"mine_block count must be >= 1, got {count}")
        name = self._resolve_block(name)
        info = self.registry.blocks[name]
        result = PrimitiveResult("mine_block", [], {"mined": 0})
        if info.tool != "none":
            tool_item, tool_tier = self.registry.best_tool(self.inventory, info.tool)
            if tool_item is not None:
                self.equipment["hand"] = tool_item
            if self.registry.tier_rank(tool_tier) < self.registry.tier_rank(info.tier):
                result.messages.append(
                    f"I cannot mine {humanize(name)} because I need at least a {info.tier} {info.tool}")
                return result
        self._sense()
        sources: list[tuple[float, int, object]] = []
        for region in self._nearby_regions():
            for poi in region.pois:
                if poi.block == name and poi.qty > 0:
                    d = _dist(self.position, poi.pos)
                    if d <= SENSE_RADIUS:
                        sources.append((d, 0, poi))
        for bpos in sorted(self.edits):
            if self.edits[bpos] == name and _dist(self.position, bpos) <= SENSE_RADIUS:
                sources.append((_dist(self.position, bpos), 1, bpos))
        sources.sort(key=lambda s: (s[0], s[1], str(s[2])))
        mined = 0
        for _, kind, src in sources:
            if mined >= count:
                break
            if kind == 0:
                poi = src
                take = min(count - mined, poi.qty)
                poi.qty -= take
            else:
                del self.edits[src]
                take = 1
            for item, per in info.drops.items():
                self._credit(item, per * take)
            mined += take
        result.data["mined"] = mined
        if mined == count:
            result.messages.append(f"I mined {count} {pluralize(name, count)}")
        elif mined > 0:
            short = count - mined
            result.messages.append(
                f"I mined {mined} {pluralize(name, mined)} but cannot find {short} more nearby")
        else:
            result.messages.append(f"I cannot find any {humanize(name)} nearby")
        return result

    def craft_item(self, name: str, count: int = 1) -> PrimitiveResult:
        return self._run_primitive(
            "craft_item", {"name": name, "count": count}, lambda: self._craft_item(name, count))

    def _craft_item(self, name: str, count: int) -> PrimitiveResult:
        if count < 1:
            raise ActionError("precondition", f"craft_item count must be >= 1, got {count}")
        recipe = self.registry.recipe_for(name)
        if recipe is None:
            raise ActionError("no_recipe", f"no recipe for item: {name}")
        result = PrimitiveResult("craft_item", [], {"crafted": 0})
        applications = -(-count // recipe.count)  # ceil
        missing = []
        for ingredient in sorted(recipe.inputs):
            need = recipe.inputs[ingredient] * applications
            have = self.inventory.get(ingredient, 0)
            if have < need:
                missing.append((need - have, ingredient))
        if missing:
            needs = ", ".join(f"{n} more {pluralize(ing, n)}" for n, ing in missing)
            result.messages.append(f"I cannot make {_titled(name)} because I need: {needs}")
            return result
        if recipe.station == "crafting_table" and not self._station_nearby("crafting_table"):
            result.messages.append(
                f"I cannot craft {_titled(name)} because there is no crafting table nearby")
            return result
        for ingredient, per in recipe.inputs.items():
            self._debit(ingredient, per * applications)
        produced = recipe.count * applications
        self._credit(name, produced)
        result.data["crafted"] = produced
        result.messages.append(f"I crafted {produced} {pluralize(name, produced)}")
        return result

    def smelt_item(self, item: str, fuel: str, count: int = 1) -> PrimitiveResult:
        return self._run_primitive(
            "smelt_item", {"item": item, "fuel": fuel, "count": count},
            lambda: self._smelt_item(item, fuel, count))

    def _smelt_item(self, item: str, fuel: str, count: int) -> PrimitiveResult:
        if count < 1:
            raise ActionError("precondition", f"smelt_item count must be >= 1, got {count}")
        output = self.registry.smelt_output(item)
        if output is None:
            raise ActionError("not_smeltable", f"{item} cannot be smelted")
        result = PrimitiveResult("smelt_item", [], {"smelted": 0})
        if not self._station_nearby("furnace"):
            result.messages.append("I cannot smelt anything because there is no furnace nearby")
            return result
        if fuel not in self.registry.fuels:
            valid = ", ".join(sorted(self.registry.fuels))
            result.messages.append(
                f"I cannot use {humanize(fuel)} as fuel. Valid fuels are: {valid}")
            return result
        have = self.inventory.get(item, 0)
        if have < count:
            short = count - have
            result.messages.append(
                f"I cannot make {_titled(output)} because I need: "
                f"{short} more {pluralize(item, short)}")
            if have == 0:
                return result
        n = min(count, have)
        fuel_value = self.registry.fuels[fuel]
        fuel_capacity = self.inventory.get(fuel, 0) * fuel_value
        if fuel_capacity == 0:
            result.messages.append(f"I have no {humanize(fuel)} to burn")
            return result
        if fuel_capacity < n:
            result.messages.append(f"I only have fuel for {fuel_capacity} of {n}")
            n = fuel_capacity
        fuel_used = -(-n // fuel_value)
        self._debit(fuel, fuel_used)
        self._debit(item, n)
        self._credit(output, n)
        result.data["smelted"] = n
        result.messages.append(f"I smelted {n} {pluralize(item, n)} into {n} {pluralize(output, n)}")
        return result

    def _station_nearby(self, kind: str) -> bool:
        for bpos, name in self.edits.items():
            if name == kind and _dist(self.position, bpos) <= SENSE_RADIUS:
                return True
        return False

    def place_item(self, name: str, position: tuple[int, int, int]) -> PrimitiveResult:
        position = tuple(int(c) for c in position)
        return self._run_primitive(
            "place_item", {"name": name, "position": list(position)},
            lambda: self._place_item(name, position))

    def _place_item(self, name: str, position: tuple[int, int, int]) -> PrimitiveResult:
        if not self.registry.is_placeable(name):
            raise ActionError("not_placeable", f"{name} is not a placeable block")
        if _dist(self.position, position) > SENSE_RADIUS:
            raise ActionError("out_of_reach", f"position {position} is more than {SENSE_RADIUS} blocks away")
        result = PrimitiveResult("place_item", [], {"placed": False})
        if self.inventory.get(name, 0) < 1:
            result.messages.append(
                f"I cannot place {_titled(name)} because I have none in my inventory")
            return result
        if self._occupied(position):
            x, y, z = position
            result.messages.append(
                f"I cannot place {_titled(name)} at ({x}, {y}, {z}) "
                "because the position is occupied")
            return result
        self._debit(name, 1)
        self.edits[position] = name
        if name in STATIONS:
            self.program_placements.append((position, name))
        if name == "chest":
            self.chests[position] = Counter()
        result.data["placed"] = True
        x, y, z = position
        result.messages.append(f"I placed {_titled(name)} at ({x}, {y}, {z})")
        return result

    def _occupied(self, position: tuple[int, int, int]) -> bool:
        if position in self.edits:
            return True
        if position[1] <= self.config.bedrock_floor:
            return True
        for region in self._nearby_regions():
            if region.chest_pos == position:
                return True
            for poi in region.pois:
                if poi.qty > 0 and poi.pos == position:
                    return True
        return False

    def find_free_spot_near(self) -> tuple[int, int, int]:
        """First unoccupied cell adjacent to the agent, in a fixed scan order."""
        x, y, z = self.position
        for dx, dz in ((1, 0), (-1, 0), (0, 1), (0, -1), (1, 1), (-1, -1), (2, 0), (0, 2)):
            candidate = (x + dx, y, z + dz)
            if not self._occupied(candidate):
                return candidate
        return (x, y + 1, z)

    def kill_mob(self, name: str, timeout_ticks: int = 300) -> PrimitiveResult:
        return self._run_primitive(
            "kill_mob", {"name": name, "timeout_ticks": timeout_ticks},
            lambda: self._kill_mob(name, timeout_ticks))

    def _kill_mob(self, name: str, timeout_ticks: int) -> PrimitiveResult:
        if timeout_ticks < 1:
            raise ActionError("precondition", "timeout_ticks must be >= 1")
        result = PrimitiveResult("kill_mob", [], {"killed": False})
        target: Optional[Mob] = None
        best = None
        for region in self._nearby_regions():
            for mob in region.mobs:
                if mob.alive and mob.name == name:
                    d = _dist(self.position, mob.pos)
                    if d <= SENSE_RADIUS and (best is None or (d, mob.mob_id) < best):
                        best = (d, mob.mob_id)
                        target = mob
        if target is None:
            result.messages.append(f"No {humanize(name)} nearby")
            return result
        info = self.registry.mobs[name]
        weapon = None
        weapon_damage = 1
        for item, dmg in sorted(self.registry.weapons.items()):
            if self.inventory.get(item, 0) > 0 and dmg > weapon_damage:
                weapon, weapon_damage = item, dmg
        if weapon is not None:
            self.equipment["hand"] = weapon
        exchanges = -(-info.health // weapon_damage)
        if exchanges * self.config.ticks_per_call > timeout_ticks:
            result.messages.append(f"I could not defeat the {humanize(name)} within the time limit")
            return result
        damage_taken = info.damage * max(0, exchanges - 1)
        if damage_taken >= self.health:
            self.health = 0
            result.messages.append(f"The {humanize(name)} defeated me")
            result.messages.extend(self.apply_death().messages)
            return result
        self.health -= damage_taken
        target.alive = False
        for item in sorted(info.drops):
            self._credit(item, info.drops[item])
        result.data["killed"] = True
        loot = ", ".join(f"{n} {pluralize(i, n)}" for i, n in sorted(info.drops.items()))
        result.messages.append(f"I killed the {humanize(name)} and collected: {loot}")
        return result

    def explore_until(self, direction: tuple[int, int], max_ticks: int,
                      stop_predicate: Optional[Callable[["World"], bool]] = None) -> PrimitiveResult:
        return self._run_primitive(
            "explore_until", {"direction": list(direction), "max_ticks": max_ticks},
            lambda: self._explore_until(direction, max_ticks, stop_predicate))

    def _explore_until(self, direction: tuple[int, int], max_ticks: int,
                       stop_predicate: Optional[Callable[["World"], bool]]) -> PrimitiveResult:
        dx, dz = direction
        if max_ticks < 1:
            raise ActionError("precondition", "max_ticks must be >= 1")
        if (dx, dz) == (0, 0) or dx not in (-1, 0, 1) or dz not in (-1, 0, 1):
            raise ActionError("bad_direction", f"direction must be a unit step, got {direction}")
        steps = 0
        reason = "timeout"
        while True:
            self._sense()
            if stop_predicate is not None and stop_predicate(self):
                reason = "predicate"
                break
            if steps >= max_ticks:
                break
            x, y, z = self.position
            on_surface = y == self.height(x, z) + 1
            nx = max(-self.config.world_radius, min(self.config.world_radius, x + dx))
            nz = max(-self.config.world_radius, min(self.config.world_radius, z + dz))
            ny = self.height(nx, nz) + 1 if on_surface else y
            self.position = (nx, ny, nz)
            self.tick += 1
            steps += 1
        result = PrimitiveResult("explore_until", [], {"steps": steps, "reason": reason})
        if reason == "predicate":
            result.messages.append(f"I explored {steps} blocks and found what I was looking for")
        else:
            result.messages.append(f"I explored {steps} blocks and stopped at the time limit")
        return result

    def goto(self, x: int, y: int, z: int, range_: int = 1) -> PrimitiveResult:
        return self._run_primitive(
            "goto", {"x": x, "y": y, "z": z, "range": range_},
            lambda: self._goto((x, y, z), range_))

    def _goto(self, goal: tuple[int, int, int], range_: int) -> PrimitiveResult:
        gx, gy, gz = goal
        if abs(gx) > self.config.world_radius or abs(gz) > self.config.world_radius:
            raise ActionError("out_of_bounds", f"goal {goal} is outside the world")
        if range_ < 0:
            raise ActionError("precondition", "range must be >= 0")
        floor = self.config.bedrock_floor + 1
        steps = 0
        while _dist(self.position, goal) > range_ and steps < self.config.goto_step_budget:
            ax, ay, az = self.position
            nx = ax + (gx > ax) - (gx < ax)
            nz = az + (gz > az) - (gz < az)
            ny = ay + (gy > ay) - (gy < ay)
            ny = max(ny, floor)
            if (nx, ny, nz) == self.position:
                break  # cannot get any closer (bedrock in the way)
            self.position = (nx, ny, nz)
            self.tick += 1
            steps += 1
        arrived = _dist(self.position, goal) <= range_
        result = PrimitiveResult("goto", [], {"steps": steps, "arrived": arrived})
        ax, ay, az = self.position
        if arrived:
            result.messages.append(f"I arrived at ({ax}, {ay}, {az})")
        else:
            result.messages.append(
                f"I could not reach ({gx}, {gy}, {gz}); I stopped at ({ax}, {ay}, {az})")
        return result

    def chest_transfer(self, chest_position: tuple[int, int, int], items: dict[str, int],
                       direction: str) -> PrimitiveResult:
        chest_position = tuple(int(c) for c in chest_position)
        return self._run_primitive(
            "chest_transfer",
            {"position": list(chest_position), "items": dict(sorted(items.items())), "direction": direction},
            lambda: self._chest_transfer(chest_position, items, direction))

    def _chest_transfer(self, pos: tuple[int, int, int], items: dict[str, int],
                        direction: str) -> PrimitiveResult:
        if direction not in ("get", "deposit"):
            raise ActionError("precondition", f"direction must be get or deposit, got {direction}")
        for region in self._nearby_regions():
            self._touch_chest(region)
        # chests further away: walk first, then materialize surrounding regions
        if pos not in self.chests and self.edits.get(pos) != "chest":
            rx, rz = pos[0] // REGION, pos[2] // REGION
            region = self._region(rx, rz)
            self._touch_chest(region)
        if pos not in self.chests:
            raise ActionError("no_chest", f"no chest at ({pos[0]}, {pos[1]}, {pos[2]})")
        result = PrimitiveResult("chest_transfer", [], {"moved": {}})
        if _dist(self.position, pos) > 2:
            walk = self._goto(pos, 2)
            if not walk.data["arrived"]:
                result.messages.extend(walk.messages)
                return result
        chest = self.chests[pos]
        moved: dict[str, int] = {}
        for item in sorted(items):
            want = items[item]
            if want < 0:
                raise ActionError("precondition", f"negative count for {item}")
            if direction == "get":
                take = min(want, chest.get(item, 0))
                if take:
                    chest[item] -= take
                    if chest[item] <= 0:
                        del chest[item]
                    self._credit(item, take)
                moved[item] = take
                if take < want:
                    result.messages.append(
                        f"The chest only had {take} {pluralize(item, take)} of the {want} I wanted")
            else:
                give = min(want, self.inventory.get(item, 0))
                if give:
                    self._debit(item, give)
                    chest[item] += give
                moved[item] = give
                if give < want:
                    result.messages.append(
                        f"I only had {give} {pluralize(item, give)} of the {want} to deposit")
        self.known_chests[pos] = {k: v for k, v in sorted(chest.items())}
        result.data["moved"] = moved
        verb = "got" if direction == "get" else "deposited"
        summary = ", ".join(f"{n} {pluralize(i, n)}" for i, n in sorted(moved.items()))
        result.messages.append(f"I {verb} {summary or 'nothing'}"
                               f" {'from' if direction == 'get' else 'into'} the chest")
        return result

    def eat_item(self, name: str) -> PrimitiveResult:
        return self._run_primitive("eat_item", {"name": name}, lambda: self._eat_item(name))

    def _eat_item(self, name: str) -> PrimitiveResult:
        result = PrimitiveResult("eat_item", [], {"ate": False})
        value = self.registry.foods.get(name)
        if value is None:
            result.messages.append(f"I cannot eat {humanize(name)}")
            return result
        if self.inventory.get(name, 0) < 1:
            result.messages.append(f"I have no {humanize(name)} to eat")
            return result
        self._debit(name, 1)
        self.hunger = min(20, self.hunger + value)
        result.data["ate"] = True
        result.messages.append(f"I ate {_titled(name)}; hunger is now {self.hunger}/20")
        return result

    def equip_item(self, name: str, slot: Optional[str] = None) -> PrimitiveResult:
        return self._run_primitive(
            "equip_item", {"name": name, "slot": slot}, lambda: self._equip_item(name, slot))

    def _equip_item(self, name: str, slot: Optional[str]) -> PrimitiveResult:
        result = PrimitiveResult("equip_item", [], {"equipped": False})
        if self.inventory.get(name, 0) < 1:
            result.messages.append(f"I cannot equip {humanize(name)} because I have none in my inventory")
            return result
        if slot is None:
            if name.endswith("_helmet"):
                slot = "head"
            elif name.endswith("_chestplate"):
                slot = "torso"
            elif name.endswith("_leggings"):
                slot = "legs"
            elif name.endswith("_boots"):
                slot = "feet"
            elif name == "shield":
                slot = "off_hand"
            else:
                slot = "hand"
        if slot not in EQUIP_SLOTS:
            raise ActionError("precondition", f"unknown equipment slot: {slot}")
        self.equipment[slot] = name
        result.data["equipped"] = True
        result.messages.append(f"I equipped the {humanize(name)} in my {slot.replace('_', '-')} slot")
        return result

    def apply_death(self) -> PrimitiveResult:
        """Respawn at the surface column nearest the death point, inventory intact."""
        x, _, z = self.position
        self.position = (x, self.height(x, z) + 1, z)
        self.health = 20
        self.hunger = 20
        self.deaths += 1
        px, py, pz = self.position
        return PrimitiveResult(
            "apply_death", [f"I died and respawned at ({px}, {py}, {pz}) with my inventory intact"],
            {"respawn": [px, py, pz]})

    def begin_program(self) -> None:
        self.program_placements.clear()

    def recycle_stations(self) -> PrimitiveResult:
        recycled = []
        for pos, name in self.program_placements:
            if self.edits.get(pos) == name:
                del self.edits[pos]
                self._credit(name, 1)
                recycled.append(name)
        self.program_placements.clear()
        messages = [f"I recycled the {humanize(name)}" for name in recycled]
        result = PrimitiveResult("recycle_stations", messages, {"recycled": recycled})
        if self.event_sink is not None:
            self._emit_event(self.tick, "recycle_stations", {}, messages, self._snapshot())
        return result

    # ----- accounting helpers (used by tests and metrics) ------------------

    def total_stock(self) -> Counter:
        """Items across inventory, chests, generated deposits, and live mobs."""
        stock = Counter(self.inventory)
        for contents in self.chests.values():
            stock.update(contents)
        for region in self._regions.values():
            for poi in region.pois:
                if poi.qty > 0:
                    info = self.registry.blocks[poi.block]
                    for item, per in info.drops.items():
                        stock[item] += per * poi.qty
            for mob in region.mobs:
                if mob.alive:
                    stock.update(self.registry.mobs[mob.name].drops)
            if region.chest_pos is not None and region.chest_pos not in self.chests:
                stock.update(region.chest_loot or {})
        for name in self.edits.values():
            info = self.registry.blocks.get(name)
            if info:
                for item, per in info.drops.items():
                    stock[item] += per
        return stock

    def iter_pois(self) -> Iterable[Poi]:
        for region in self._regions.values():
            yield from region.pois


def create_world(config: Optional[WorldConfig] = None, registry: Optional[Registry] = None,
                 event_sink: Optional[Callable[[dict], None]] = None) -> World:
    """Build a world at tick 0 with the agent at a biome-dependent spawn."""
    if config is None:
        config = default_config()
    return World(config, registry=registry, event_sink=event_sink)

from .config import REGION, BiomeFeatures, ConfigError, WorldConfig, config_from_dict, default_config, load_config
from .registry import BlockInfo, MobInfo, Recipe, Registry, RegistryError, load_registry
from .world import (
    DIRECTIONS,
    EQUIP_SLOTS,
    SENSE_RADIUS,
    TIME_LABELS,
    ActionError,
    AgentState,
    PrimitiveResult,
    World,
    create_world,
    render_state,
)

__all__ = [
    "REGION",
    "BiomeFeatures",
    "ConfigError",
    "WorldConfig",
    "config_from_dict",
    "default_config",
    "load_config",
    "BlockInfo",
    "MobInfo",
    "Recipe",
    "Registry",
    "RegistryError",
    "load_registry",
    "DIRECTIONS",
    "EQUIP_SLOTS",
    "SENSE_RADIUS",
    "TIME_LABELS",
    "ActionError",
    "AgentState",
    "PrimitiveResult",
    "World",
    "create_world",
    "render_state",
]

from __future__ import annotations

import pytest

from craftagent.craftworld import create_world, default_config

# seed 3 spawns in a forest with oak logs, coal and iron in sensing range
FOREST_SEED = 3


@pytest.fixture
def forest_world():
    return create_world(default_config(seed=FOREST_SEED))


@pytest.fixture
def registry(forest_world):
    return forest_world.registry

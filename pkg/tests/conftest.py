import numpy as np
import pytest

from partblend import dataset, index_store
from partblend.manifold import SammonConfig

FAST_CFG = index_store.IndexConfig(resolution=64, sammon=SammonConfig(dim=8))


@pytest.fixture(scope="session")
def grid_items():
    return dataset.generate_grid(
        dataset.default_leg_styles(3), dataset.default_back_styles(3)
    )


@pytest.fixture(scope="session")
def grid_index(grid_items):
    return index_store.build_index(
        [m for _, _, m in grid_items],
        FAST_CFG,
        names=[n for n, _, _ in grid_items],
    )


@pytest.fixture(scope="session")
def mixed_items():
    """Small random corpus containing both armed and armless chairs."""
    rng = np.random.default_rng(42)
    items = []
    for i in range(8):
        p = dataset.random_chair_params(rng)
        items.append((f"chair_{i}", p, dataset.generate_chair(p)))
    arms = {p.armrests for _, p, _ in items}
    assert "none" in arms and arms != {"none"}
    return items


@pytest.fixture(scope="session")
def mixed_index(mixed_items):
    return index_store.build_index(
        [m for _, _, m in mixed_items],
        FAST_CFG,
        names=[n for n, _, _ in mixed_items],
    )

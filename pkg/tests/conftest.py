"""Shared fixtures: small discretized domains and a seeded-field factory."""

import numpy as np
import pytest
from scipy import ndimage

from rieszlab import GridField, cube_domain, discretize


@pytest.fixture(scope="session")
def unit_square():
    """(grid, mask) for the unit square at a small test resolution."""
    return discretize(cube_domain(2), 32)


@pytest.fixture(scope="session")
def field_factory():
    """Builds seeded random fields smoothed by one averaging pass."""

    def make(grid, mask, seed=0, signed=False, scale=1.0):
        rng = np.random.default_rng(seed)
        vals = rng.random(grid.res)
        if signed:
            vals = vals - 0.5
        vals = ndimage.uniform_filter(vals, size=3, mode="nearest") * scale
        return GridField(grid, mask, vals)

    return make

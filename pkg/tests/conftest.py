import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from tadpole import GraphFunction, GridSpec, TadpoleGeometry


@pytest.fixture
def geom():
    return TadpoleGeometry(1.0)


@pytest.fixture
def grid():
    return GridSpec(x_max=10.0, n_queue=401, n_head=101)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


def random_graph_function(geom, grid, rng) -> GraphFunction:
    q = rng.normal(size=grid.n_queue) + 1j * rng.normal(size=grid.n_queue)
    h = rng.normal(size=grid.n_head) + 1j * rng.normal(size=grid.n_head)
    return GraphFunction(geom, grid, q, h)

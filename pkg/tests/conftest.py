"""Shared fixtures; makes the top-level packages importable."""

import sys
from pathlib import Path

import numpy as np
import pytest

ROOT = Path(__file__).resolve().parent.parent
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from models.neural.dropout import MaskSource  # noqa: E402
from models.neural.network import NetworkDef, NetworkState, init_network  # noqa: E402


@pytest.fixture
def small_mlp():
    """3 -> 5 -> 4 -> 2 network with dropout before each hidden output."""
    net_def = NetworkDef.mlp([5, 4], p_d=0.3, last_layer_bias=True, input_dim=3, output_dim=2)
    return net_def, init_network(net_def, seed=11)


@pytest.fixture
def equal_weight_single():
    """K=500 single-layer network with every weight 0.04."""
    def make(p_d: float = 0.5, w: float = 0.04, K: int = 500):
        net_def = NetworkDef.single_layer(K, p_d)
        state = NetworkState([{}, {'W': np.full((K, 1), w)}], rng_seed=0)
        return net_def, state
    return make


@pytest.fixture
def mask_source():
    return MaskSource(1234)
